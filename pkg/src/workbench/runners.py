"""Named experiment runners; each turns one ExperimentConfig into a SweepResult."""

import logging
import math
from multiprocessing import Pool
from typing import Callable, Dict, List, Sequence

import numpy as np

from ..budget.estimators import ArchitectureParams, error_budget, landau_zener_error
from ..budget.tails import tail_error_front_ramp, tail_error_kth_qubit
from ..dynamics.integrator import StateVector, landau_zener_transition, propagate
from ..dynamics.pulses import erf_ramp
from ..errors import ConfigError, InvalidArgumentError, LabelingError, NumericalError
from ..hamiltonian.basis import MEMORY, QUBIT, block_labels, enumerate_basis
from ..measurement.tunneling import MeasurementParams, decay_report
from ..move.design import analytic_design, eigenbasis_populations, move_with_occupied_bus
from ..move.families import FAMILIES, Direction, ErfFamily, MoveMode, oriented_family
from ..move.optimizer import optimize_move
from ..spectra.perturbation import omega_zz_exact, omega_zz_fourth_order
from ..spectra.system import eigensystem_at
from ..units import to_angular, to_ghz, to_mhz
from .config_loader import ExperimentConfig
from .output import SweepResult

logger = logging.getLogger("rezqu.workbench")


def parallel_map(function: Callable, jobs: Sequence, workers: int) -> List:
    """Map in sweep order, over a process pool when more than one worker is allowed."""
    jobs = list(jobs)
    if workers > 1 and len(jobs) > 1:
        with Pool(min(workers, len(jobs))) as pool:
            return pool.map(function, jobs)
    return [function(job) for job in jobs]


def frequency_grid(cfg: ExperimentConfig) -> np.ndarray:
    """Qubit frequencies (GHz) from the start/stop/step keys, strictly between bus and memory."""
    p = cfg.parameters
    start, stop, step = p['f_q_start_ghz'], p['f_q_stop_ghz'], p['f_q_step_ghz']
    if step <= 0:
        raise ConfigError('parameters.f_q_step_ghz', "must be positive")
    if stop < start:
        raise ConfigError('parameters.f_q_stop_ghz', "must not be below f_q_start_ghz")
    f_b, f_m = cfg.device['f_b_ghz'], cfg.device['f_m_ghz']
    if not f_b < start < f_m:
        raise ConfigError('parameters.f_q_start_ghz', f"must lie strictly between {f_b} and {f_m} GHz")
    if not f_b < stop < f_m:
        raise ConfigError('parameters.f_q_stop_ghz', f"must lie strictly between {f_b} and {f_m} GHz")
    count = int(round((stop - start) / step))
    return np.round(start + step * np.arange(count + 1), 12)


def _label_name(label) -> str:
    return f"{label.n_m}{label.n_q}{label.n_b}"


# Spectrum

def _spectrum_point(job):
    params, f_q = job
    omega_q = to_angular(f_q)
    energies = {}
    for n_exc in (0, 1, 2):
        try:
            system = eigensystem_at(params, omega_q, n_exc)
        except LabelingError as error:
            logger.warning("[Spectrum] f_q=%.6g GHz, block %d: %s", f_q, n_exc, error)
            continue
        energies.update((label, system.energy(label)) for label in system.labels)
    return [float(to_ghz(energies[label])) if label in energies else math.nan for label in enumerate_basis()]


def run_spectrum(cfg: ExperimentConfig) -> SweepResult:
    params = cfg.device_params()
    grid = frequency_grid(cfg)
    columns = ['f_q_ghz'] + [f"e_{_label_name(label)}_ghz" for label in enumerate_basis()]
    result = SweepResult(cfg, columns)
    points = parallel_map(_spectrum_point, [(params, float(f)) for f in grid], cfg.workers)
    for f_q, energies in zip(grid, points):
        result.add_row([float(f_q)] + energies)
    return result


# Idling sweep

def _safe(compute: Callable[[], float]) -> float:
    try:
        return float(to_mhz(compute()))
    except NumericalError as error:
        logger.warning("[Idling] %s", error)
        return math.nan


def _idling_point(job):
    params, f_q = job
    omega_q = to_angular(f_q)
    with_gd = params.replace(include_gd=True)
    without_gd = params.replace(include_gd=False)
    return [
        _safe(lambda: omega_zz_exact(without_gd, omega_q)),
        _safe(lambda: omega_zz_exact(with_gd, omega_q)),
        _safe(lambda: omega_zz_fourth_order(without_gd, omega_q)),
    ]


def run_idling_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Exact (with and without g_d) and fourth-order Omega_ZZ/2pi in MHz across f_q."""
    grid = frequency_grid(cfg)
    columns = ['g_ghz', 'f_q_ghz', 'omega_zz_exact_nogd_mhz', 'omega_zz_exact_gd_mhz', 'omega_zz_4th_mhz']
    result = SweepResult(cfg, columns)
    jobs = []
    for index, g in enumerate(cfg.parameters['g_values_ghz']):
        if g < 0:
            raise ConfigError(f'parameters.g_values_ghz[{index}]', "must be non-negative")
        params = cfg.device_params(g_m=g, g_b=g)
        jobs.extend((params, float(f_q)) for f_q in grid)
    for (params, f_q), values in zip(jobs, parallel_map(_idling_point, jobs, cfg.workers)):
        result.add_row([params.g_m, f_q] + values)
    logger.info("[Idling] %d points", len(result.rows))
    return result


# MOVE

def _move_family(cfg: ExperimentConfig, direction: Direction):
    p = cfg.parameters
    name = p['family']
    if name not in FAMILIES:
        raise ConfigError('parameters.family', f"must be one of {sorted(FAMILIES)}")
    options = {}
    if name == ErfFamily.name:
        options['sigma'] = p['sigma_ns']
    return oriented_family(name, direction, p['f_q_start_ghz'], p['f_q_end_ghz'], **options)


def _direction(cfg: ExperimentConfig) -> Direction:
    try:
        return Direction(cfg.parameters['direction'])
    except ValueError:
        raise ConfigError('parameters.direction',
                          f"must be one of {[d.value for d in Direction]}") from None


def run_move(cfg: ExperimentConfig) -> SweepResult:
    """Design a MOVE pulse and emit its samples with bare and eigenbasis populations."""
    p = cfg.parameters
    params = cfg.device_params()
    direction = _direction(cfg)
    family = _move_family(cfg, direction)
    if cfg.experiment == 'move-analytic':
        design = analytic_design(params, family, direction, p['dt_ns'])
    else:
        try:
            mode = MoveMode(p['mode'])
        except ValueError:
            raise ConfigError('parameters.mode', "must be two_param or four_param") from None
        if mode is MoveMode.ANALYTIC:
            raise ConfigError('parameters.mode', "must be two_param or four_param")
        if p['n_starts'] < 1:
            raise ConfigError('parameters.n_starts', "must be at least 1")
        design = optimize_move(params, family, mode, direction, seed=cfg.seed, workers=cfg.workers,
                               options={'n_starts': p['n_starts']}, dt=p['dt_ns'])

    pulse = design.pulse(params)
    initial = QUBIT if direction is Direction.QUBIT_TO_MEMORY else MEMORY
    start = eigensystem_at(params, float(pulse.omega(0.0)), 1)
    psi0 = StateVector(start.vector(initial), tuple(block_labels(1)))
    trajectory = propagate(params, pulse, psi0, dt=p['dt_ns']).sampled(p['sample_ns'])
    eigen = eigenbasis_populations(params, pulse, trajectory)
    bare = trajectory.populations()

    names = [_label_name(label) for label in trajectory.basis]
    columns = ['t_ns', 'f_q_ghz'] + [f"p_{name}" for name in names] + ['p_eigen_0', 'p_eigen_1', 'p_eigen_2']
    result = SweepResult(cfg, columns, stagnated=design.stagnated)
    frequencies = pulse.frequency_ghz(trajectory.times)
    for row, t in enumerate(trajectory.times):
        result.add_row([float(t), float(frequencies[row])] + [float(v) for v in bare[row]]
                       + [float(v) for v in eigen[row]])

    result.summary = {
        'achieved_error': design.achieved_error,
        'tail_gamma': design.tail_gamma,
        'occupied_bus_error': move_with_occupied_bus(params, design, p['dt_ns']),
        'overshoot_mhz': float(to_mhz(design.overshoot)),
        'tau_ns': design.tau,
        'flat_duration_ns': design.flat_duration,
        'varphi': design.varphi,
        'front_0': design.front[0],
        'front_1': design.front[1],
        't_end_ns': float(pulse.t_end),
    }
    result.records['design'] = design.to_record()
    logger.info("[Move] %s %s: error %.3e", design.family, design.mode.value, design.achieved_error)
    return result


# Tail sweep

def _tail_point(job):
    params, sigma, p = job
    ramp = erf_ramp(p['f_q_start_ghz'], params.f_m, sigma, p['margin_sigmas'])
    values = [sigma, tail_error_front_ramp(ramp, params.g_b, params.f_b)]
    if p['include_move_error']:
        family = ErfFamily(p['f_q_start_ghz'], p['f_q_end_ghz'], sigma=sigma, margin=p['margin_sigmas'])
        design = optimize_move(params, family, MoveMode.TWO_PARAM, options={'n_starts': p['n_starts']},
                               dt=p['dt_ns'])
        designed = tail_error_front_ramp(design.pulse(params), params.g_b, params.f_b)
        values += [design.achieved_error, designed]
    return values


def run_tail_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Front-ramp tail error against the erf width, optionally beside optimized MOVE errors."""
    p = cfg.parameters
    params = cfg.device_params()
    for index, sigma in enumerate(p['sigma_values_ns']):
        if sigma <= 0:
            raise ConfigError(f'parameters.sigma_values_ns[{index}]', "must be positive")
    columns = ['sigma_ns', 'tail_error_ramp']
    if p['include_move_error']:
        columns += ['move_error_two_param', 'tail_error_design']
    result = SweepResult(cfg, columns)
    jobs = [(params, sigma, p) for sigma in p['sigma_values_ns']]
    for values in parallel_map(_tail_point, jobs, cfg.workers):
        result.add_row(values)
    return result


# Landau-Zener

def run_lz_estimate(cfg: ExperimentConfig) -> SweepResult:
    """Closed-form crossing errors beside a two-level sweep through resonance."""
    p = cfg.parameters
    g = to_angular(p['g_ghz'])
    delta_b = to_angular(p['delta_b_ghz'])
    delta_mk = to_angular(p['delta_mk_ghz'])
    if delta_b == 0:
        raise ConfigError('parameters.delta_b_ghz', "must be nonzero")
    if delta_mk == 0:
        raise ConfigError('parameters.delta_mk_ghz', "must be nonzero")
    columns = ['sweep_rate_ghz_per_ns', 'lz_qubit_qubit', 'lz_oracle', 'oracle_ratio', 'lz_qubit_memory']
    result = SweepResult(cfg, columns)
    for index, rate in enumerate(p['sweep_rates_ghz_per_ns']):
        if rate <= 0:
            raise ConfigError(f'parameters.sweep_rates_ghz_per_ns[{index}]', "must be positive")
        sweep = to_angular(rate)
        estimate = landau_zener_error(g, g, delta_b, sweep)
        oracle = landau_zener_transition(g * g / delta_b, sweep, p['half_window_ns'])
        memory = landau_zener_error(g, g, delta_b, sweep, g_mk=g, delta_mk=delta_mk)
        result.add_row([rate, estimate, oracle, oracle / estimate, memory])
    return result


# Measurement

def run_measurement(cfg: ExperimentConfig) -> SweepResult:
    """Survival trajectories for bare and eigenstate readout, with closed-form summary."""
    p = cfg.parameters
    try:
        mp = MeasurementParams(f_m=cfg.device['f_m_ghz'], f_q=p['f_q_ghz'], g_m=cfg.device['g_m_ghz'],
                               gamma=p['gamma_per_ns'], t_meas=p['t_meas_ns'])
    except InvalidArgumentError as error:
        raise ConfigError('parameters', str(error)) from None
    report = decay_report(mp, spacing=p['sample_ns'])
    result = SweepResult(cfg, report.header())
    for row in report.rows():
        result.add_row(row)
    result.summary = report.summary()
    return result


# Error budget

def run_error_budget(cfg: ExperimentConfig) -> SweepResult:
    """All closed-form error terms per (N, N_op), with the RezQu-to-conventional idling ratio."""
    p = cfg.parameters
    params = cfg.device_params()
    g = to_angular(p['g_ghz'])
    delta = to_angular(p['delta_ghz'])
    if delta == 0:
        raise ConfigError('parameters.delta_ghz', "must be nonzero")
    sweep = to_angular(p['sweep_rate_ghz_per_ns'])
    f_idle = params.f_b + p['delta_ghz']
    tail_move = tail_error_front_ramp(erf_ramp(f_idle, params.f_m, 1.0), p['g_ghz'], params.f_b)
    tail_k = tail_error_kth_qubit(erf_ramp(f_idle, params.f_b, 1.0), p['g_ghz'], p['g_ghz'],
                                  params.f_m - 0.5 * p['delta_ghz'], params.f_b)
    columns = None
    result = None
    for n_qubits in p['n_qubits_values']:
        for n_ops in p['n_ops_values']:
            try:
                arch = ArchitectureParams.symmetric(n_qubits, n_ops, g, delta)
            except InvalidArgumentError as error:
                raise ConfigError('parameters.n_qubits_values', str(error)) from None
            budget = error_budget(arch, params.eta_angular, sweep, tail_move=tail_move, tail_qubit_k=tail_k)
            values = budget.as_dict()
            if result is None:
                columns = ['n_qubits', 'n_ops'] + list(values) + ['ratio_rezqu_conventional']
                result = SweepResult(cfg, columns)
            ratio = values['idle_rezqu'] / values['idle_conventional']
            result.add_row([n_qubits, n_ops] + list(values.values()) + [ratio])
    return result


RUNNERS: Dict[str, Callable[[ExperimentConfig], SweepResult]] = {
    'spectrum': run_spectrum,
    'idling-sweep': run_idling_sweep,
    'move-analytic': run_move,
    'move-optimize': run_move,
    'tail-sweep': run_tail_sweep,
    'lz-estimate': run_lz_estimate,
    'measurement': run_measurement,
    'error-budget': run_error_budget,
}


class ExperimentRunner:
    """Runs one configured experiment and logs its progress."""

    def __init__(self, cfg: ExperimentConfig):
        self.config = cfg
        self.logger = logging.getLogger("rezqu.workbench")

    def log(self, message: str):
        self.logger.info(f"[{self.config.experiment}] {message}")

    def run(self) -> SweepResult:
        self.log(f"config sha256 {self.config.sha256()[:12]}, {self.config.workers} worker(s)")
        result = RUNNERS[self.config.experiment](self.config)
        self.log(f"{len(result.rows)} rows")
        return result


def run_experiment(cfg: ExperimentConfig) -> SweepResult:
    return ExperimentRunner(cfg).run()
