"""Multi-start derivative-free optimization of MOVE pulses."""

import logging
import math
import warnings
from dataclasses import replace
from multiprocessing import Pool
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

import config
from ..errors import InvalidArgumentError, NumericalError, OptimizerStagnationWarning
from ..hamiltonian.system import DeviceParams
from .design import MoveDesign, analytic_design, design_flat_part, move_error, rabi_frequency, validity_flags
from .families import Direction, MoveMode, apply_direction

logger = logging.getLogger("rezqu.move")

FAILED = 1.0


class MoveObjective:
    """MOVE error as a function of scaled design coordinates around a start point."""

    def __init__(self, params: DeviceParams, family, direction: Direction, mode: MoveMode,
                 start: MoveDesign, dt: float = config.DEFAULT_DT_NS):
        self.params = params
        self.family = family
        self.direction = direction
        self.mode = mode
        self.front = tuple(start.front)
        origin = [start.overshoot, start.flat_duration]
        scale = [max(0.1 * params.g_m_angular, 1e-3), 0.1]
        if mode is MoveMode.FOUR_PARAM:
            origin = list(start.front) + origin
            scale = list(family.front_scale()) + scale
        self.origin = np.array(origin, dtype=float)
        self.scale = np.array(scale, dtype=float)
        self.dt = dt

    @property
    def dimension(self) -> int:
        return len(self.origin)

    def unpack(self, z) -> Tuple[Tuple[float, float], float, float]:
        x = self.origin + np.asarray(z, dtype=float) * self.scale
        if self.mode is MoveMode.FOUR_PARAM:
            return (float(x[0]), float(x[1])), float(x[2]), float(x[3])
        return self.front, float(x[0]), float(x[1])

    def report(self, z):
        front, overshoot, duration = self.unpack(z)
        try:
            pulse = self.family.build(self.params, front, overshoot, duration)
            return move_error(self.params, apply_direction(pulse, self.direction), self.direction, self.dt)
        except (InvalidArgumentError, NumericalError):
            return None

    def __call__(self, z) -> float:
        report = self.report(z)
        return FAILED if report is None else report.err

    def residuals(self, z) -> np.ndarray:
        """Stay and bus amplitudes; their squared norm is the error of a unitary step."""
        report = self.report(z)
        if report is None:
            return np.ones(4)
        return np.array([report.stay.real, report.stay.imag, report.bus.real, report.bus.imag])


def start_points(dimension: int, origin: np.ndarray, scale: np.ndarray, n_starts: int,
                 perturbation: float, seed: int) -> Sequence[np.ndarray]:
    """The unperturbed start plus relative perturbations of every parameter."""
    rng = np.random.default_rng(seed)
    points = [np.zeros(dimension)]
    magnitude = perturbation * np.maximum(np.abs(origin), scale) / scale
    for _ in range(n_starts - 1):
        points.append(rng.uniform(-1.0, 1.0, dimension) * magnitude)
    return points


def _local_search(objective: MoveObjective, z0: np.ndarray, options: dict) -> Tuple[float, Tuple[float, ...]]:
    simplex = np.vstack([z0] + [z0 + 0.2 * row for row in np.eye(len(z0))])
    result = optimize.minimize(
        objective, z0, method=options["method"],
        options={
            "xatol": options["xatol"],
            "fatol": options["fatol"],
            "maxfev": options["max_evaluations"],
            "initial_simplex": simplex,
        },
    )
    return float(result.fun), tuple(float(v) for v in result.x)


def _run_start(job):
    objective, z0, options = job
    return _local_search(objective, z0, options)


def _polish(objective: MoveObjective, z: np.ndarray, options: dict) -> Tuple[float, Tuple[float, ...]]:
    result = optimize.least_squares(objective.residuals, z, method="trf", xtol=1e-15, ftol=1e-15,
                                    gtol=1e-15, max_nfev=options["polish_evaluations"])
    return objective(result.x), tuple(float(v) for v in result.x)


def optimize_move(params: DeviceParams, family, mode: MoveMode = MoveMode.FOUR_PARAM,
                  direction: Direction = Direction.QUBIT_TO_MEMORY, seed: int = 0,
                  workers: int = 1, start: Optional[MoveDesign] = None,
                  options: Optional[dict] = None, dt: float = config.DEFAULT_DT_NS) -> MoveDesign:
    """Minimize the MOVE error over 2 (overshoot, duration) or 4 (plus front ramp) parameters.

    Two-parameter runs keep the family's default front ramp; four-parameter runs start from
    the analytic design. Returns the best design found; warns when a four-parameter run
    stays above machine accuracy.
    """
    mode = MoveMode(mode)
    if mode is MoveMode.ANALYTIC:
        raise InvalidArgumentError("optimize_move needs two_param or four_param mode")
    settings = dict(config.OPTIMIZER, **(options or {}))
    if settings["n_starts"] < 1:
        raise InvalidArgumentError("at least one optimizer start is required")

    if start is None:
        start = _starting_design(params, family, mode, direction, dt)
    objective = MoveObjective(params, family, direction, mode, start, dt)
    points = start_points(objective.dimension, objective.origin, objective.scale,
                          settings["n_starts"], settings["perturbation"], seed)
    jobs = [(objective, z0, settings) for z0 in points]
    if workers > 1 and len(jobs) > 1:
        with Pool(min(workers, len(jobs))) as pool:
            results = pool.map(_run_start, jobs)
    else:
        results = [_run_start(job) for job in jobs]
    for index, (err, _) in enumerate(results):
        logger.debug("[Optimizer] start %d: error %.3e", index, err)

    best_err, best_z = min(results)
    polished_err, polished_z = _polish(objective, np.array(best_z), settings)
    if polished_err < best_err:
        best_err, best_z = polished_err, polished_z

    front, overshoot, duration = objective.unpack(best_z)
    pulse = apply_direction(family.build(params, front, overshoot, duration), direction)
    report = move_error(params, pulse, direction, dt)
    tau = math.pi / rabi_frequency(params.g_m_angular, overshoot) - duration
    stagnated = mode is MoveMode.FOUR_PARAM and report.err > config.MACHINE_ACCURACY_ERROR
    if stagnated:
        logger.warning("[Optimizer] best error %.3e above machine accuracy", report.err)
        warnings.warn(f"optimizer stagnated at error {report.err:.3e}", OptimizerStagnationWarning, stacklevel=2)
    logger.info("[Optimizer] %s %s, error %.3e", family.name, mode.value, report.err)

    return replace(
        start,
        mode=mode,
        direction=direction,
        front=front,
        overshoot=overshoot,
        tau=tau,
        flat_duration=duration,
        varphi=math.pi * overshoot / (4.0 * params.g_m_angular),
        achieved_error=report.err,
        tail_gamma=report.tail_gamma,
        stagnated=stagnated,
        flags=validity_flags(params, overshoot, tau),
    )


def _starting_design(params: DeviceParams, family, mode: MoveMode, direction: Direction,
                     dt: float) -> MoveDesign:
    if mode is MoveMode.FOUR_PARAM:
        return analytic_design(params, family, direction, dt)
    front = family.default_front(params)
    flat = design_flat_part(params, family, front)
    # the default front follows the overshoot it was built for
    front = family.default_front(params, flat.overshoot)
    flat = design_flat_part(params, family, front, flat.overshoot)
    return MoveDesign(
        family=family.name,
        direction=direction,
        mode=mode,
        f_m=params.f_m,
        f_start=family.f_start,
        f_end=family.f_end,
        front=front,
        overshoot=flat.overshoot,
        tau=flat.tau,
        flat_duration=flat.flat_duration,
        varphi=flat.varphi,
        achieved_error=math.nan,
        unconstrained_front=True,
    )
