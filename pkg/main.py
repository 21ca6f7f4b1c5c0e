#!/usr/bin/env python3
"""
RezQu Workbench - memory/qubit/bus architecture simulator
"""

import argparse
import logging
import sys
import warnings

import config
from src.errors import ConfigError, InvalidArgumentError, NumericalError, OptimizerStagnationWarning
from src.workbench.config_loader import EXPERIMENTS, FORMATS, ExperimentConfig
from src.workbench.runners import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_STAGNATION = 4

logger = logging.getLogger("rezqu.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=config.TOOL_NAME,
        description="Spectra, MOVE pulse design, error budgets and tunneling measurement "
                    "for the memory-qubit-bus architecture.",
    )
    parser.add_argument("--version", action="version", version=f"{config.TOOL_NAME} {config.TOOL_VERSION}")
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub = subparsers.add_parser(name, help=f"run the {name} experiment")
        sub.add_argument("--config", default=None,
                         help=f"experiment JSON (default: {config.DEFAULT_CONFIGS[name]})")
        sub.add_argument("--out", default=None, help="output path; stdout when unset")
        sub.add_argument("--format", choices=FORMATS, default=None)
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--workers", type=int, default=None)
        sub.add_argument("--reproducible", action="store_true",
                         help="omit the timestamp so identical inputs give identical bytes")
        sub.add_argument("--strict", action="store_true",
                         help="treat optimizer stagnation as a numerical failure")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("--verbose", "-v", action="store_true")
        verbosity.add_argument("--quiet", "-q", action="store_true")
    return parser


def configure_logging(verbose: bool, quiet: bool):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)


def load_config(args) -> ExperimentConfig:
    path = args.config or config.DEFAULT_CONFIGS[args.experiment]
    cfg = ExperimentConfig.load(path)
    if cfg.experiment != args.experiment:
        raise ConfigError('experiment', f"config is for {cfg.experiment!r}, not {args.experiment!r}")
    return cfg.with_overrides(out=args.out, fmt=args.format, seed=args.seed, workers=args.workers)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        cfg = load_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            result = run_experiment(cfg)
    except (ConfigError, InvalidArgumentError) as error:
        logger.error("[Config] %s", error)
        return EXIT_CONFIG
    except NumericalError as error:
        logger.error("[Numerics] %s: %s", type(error).__name__, error)
        return EXIT_NUMERICAL

    if result.stagnated and args.strict:
        logger.error("[Optimizer] stagnated above machine accuracy; no output written (--strict)")
        return EXIT_NUMERICAL
    text = result.write(reproducible=args.reproducible)
    if text is not None:
        sys.stdout.write(text)
    else:
        logger.info("[Output] wrote %s", cfg.output['path'])
    if result.stagnated:
        warnings.warn("optimizer stagnated; best-found design written", OptimizerStagnationWarning)
        return EXIT_STAGNATION
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
