"""MOVE error evaluation and the analytic first-order pulse design."""

import logging
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg, optimize

import config
from ..dynamics.integrator import Trajectory, propagator_over
from ..dynamics.pulses import PulseShape
from ..dynamics.quadrature import oscillatory_integral
from ..errors import DegenerateDetuningError, DesignFailure, InvalidArgumentError, ValidityWarning
from ..hamiltonian.basis import BUS, MEMORY, MEMORY_BUS, QUBIT, QUBIT_BUS, BasisLabel
from ..hamiltonian.system import DeviceParams, assemble_hamiltonian
from ..spectra.system import eigensystem_at
from .families import Direction, MoveMode, apply_direction, make_family

logger = logging.getLogger("rezqu.move")


@dataclass(frozen=True)
class MoveErrorReport:
    err: float
    tail_gamma: float  # bus population at t_f in the dressed basis
    direction: Direction
    target: complex = 0j
    stay: complex = 0j  # amplitude left on the initial dressed state
    bus: complex = 0j


_ENDPOINTS = {
    # direction: (initial, target, bus) labels in the single-excitation block
    Direction.QUBIT_TO_MEMORY: (QUBIT, MEMORY, BUS),
    Direction.MEMORY_TO_QUBIT: (MEMORY, QUBIT, BUS),
}


def _endpoint_amplitudes(params: DeviceParams, pulse: PulseShape, n_exc: int,
                         initial: BasisLabel, target: BasisLabel, others: Tuple[BasisLabel, ...],
                         dt: float) -> Tuple[complex, ...]:
    required = (initial, target) + tuple(others)
    start = eigensystem_at(params, float(pulse.omega(0.0)), n_exc, required)
    end = eigensystem_at(params, float(pulse.omega(pulse.t_end)), n_exc, required)
    propagator = propagator_over(params, pulse, n_exc, dt=dt)
    evolved = propagator.apply(start.vector(initial))
    return tuple(complex(np.vdot(end.vector(label), evolved)) for label in (target,) + others)


def move_error(params: DeviceParams, pulse: PulseShape,
               direction: Direction = Direction.QUBIT_TO_MEMORY,
               dt: float = config.DEFAULT_DT_NS) -> MoveErrorReport:
    """1 - |<target|U|initial>|^2 between dressed states at the pulse endpoints."""
    initial, target, bus = _ENDPOINTS[direction]
    target_amp, stay_amp, bus_amp = _endpoint_amplitudes(params, pulse, 1, initial, target,
                                                         (initial, bus), dt)
    err = min(max(1.0 - abs(target_amp) ** 2, 0.0), 1.0)
    return MoveErrorReport(
        err=err,
        tail_gamma=abs(bus_amp) ** 2,
        direction=direction,
        target=target_amp,
        stay=stay_amp,
        bus=bus_amp,
    )


def eigenbasis_populations(params: DeviceParams, pulse: PulseShape, trajectory: Trajectory) -> np.ndarray:
    """Single-excitation populations in the instantaneous eigenbasis, ascending-energy order."""
    populations = np.empty((len(trajectory.times), 3))
    for row, t in enumerate(trajectory.times):
        hamiltonian = assemble_hamiltonian(params, float(pulse.omega(t)))
        _, vectors = linalg.eigh(hamiltonian.block(1))
        populations[row] = np.abs(vectors.conj().T @ trajectory.amplitudes[row]) ** 2
    return populations


# Front ramp

@dataclass(frozen=True)
class FrontRampDesign:
    front: Tuple[float, float]
    residual: float
    converged: bool
    unconstrained: bool = False
    clearance: float = math.inf  # GHz between the intermediate front level and the flat frequency


def front_ramp_residual(params: DeviceParams, pulse: PulseShape) -> complex:
    """Normalized bus tail left at the end of the front ramp; zero for a tail-free ramp."""
    omega_b = params.omega_b
    separation = params.omega_m - omega_b
    detuning_start = float(pulse.omega(0.0)) - omega_b
    if detuning_start == 0:
        raise DegenerateDetuningError("pulse starts on resonance with the bus")
    t_stop = pulse.front_window_end

    def phase(t):
        return pulse.phase(t) - omega_b * t

    integral = oscillatory_integral(lambda t: 1.0, phase, 0.0, t_stop, pulse.breakpoints)
    closing = np.exp(-1j * float(phase(t_stop)))
    return complex(separation / detuning_start - 1j * separation * integral - closing)


def _residual_or_none(params, family, front, overshoot):
    rabi = rabi_frequency(params.g_m_angular, overshoot)
    try:
        pulse = family.build(params, front, overshoot, math.pi / rabi if rabi > 0 else 0.0)
    except InvalidArgumentError:
        return None
    return front_ramp_residual(params, pulse)


def _numeric_jacobian(function, x, steps):
    columns = []
    for i, h in enumerate(steps):
        shift = np.zeros_like(x)
        shift[i] = h
        upper, lower = function(x + shift), function(x - shift)
        if upper is None or lower is None:
            return None
        derivative = (upper - lower) / (2.0 * h)
        columns.append([derivative.real, derivative.imag])
    return np.array(columns).T


def _damped_newton(function, x0, scale, tolerance, max_iterations):
    x = np.array(x0, dtype=float)
    value = function(x)
    if value is None:
        return x, math.inf, False
    for _ in range(max_iterations):
        if abs(value) < tolerance:
            return x, abs(value), True
        jacobian = _numeric_jacobian(function, x, 1e-6 * np.asarray(scale))
        if jacobian is None:
            break
        step = np.linalg.lstsq(jacobian, -np.array([value.real, value.imag]), rcond=None)[0]
        damping = 1.0
        while damping > 1.0 / 64:
            candidate = x + damping * step
            trial = function(candidate)
            if trial is not None and abs(trial) < abs(value):
                x, value = candidate, trial
                break
            damping /= 2
        else:
            break
    return x, abs(value), abs(value) < tolerance


def minimum_clearance(params: DeviceParams) -> float:
    """Smallest admissible gap (GHz) between the intermediate front level and the flat frequency."""
    return config.FRONT_CLEARANCE_COUPLINGS * params.g_m


def _front_design(params, family, x, size, overshoot) -> FrontRampDesign:
    front = (float(x[0]), float(x[1]))
    return FrontRampDesign(front, size, True, clearance=family.front_clearance(params, front, overshoot))


def _unconstrained_front(params, family, overshoot) -> FrontRampDesign:
    logger.info("[Move] bus decoupled, front ramp unconstrained")
    front = family.default_front(params, overshoot)
    return FrontRampDesign(front, 0.0, True, unconstrained=True,
                           clearance=family.front_clearance(params, front, overshoot))


def front_ramp_roots(params: DeviceParams, family, overshoot: float = 0.0,
                     limit: int = config.FRONT_ROOT_LIMIT) -> List[FrontRampDesign]:
    """Distinct tail-free front ramps that keep clear of the memory, widest clearance first.

    Newton runs from the best-scoring admissible points of the family's candidate grid and
    stops after `limit` distinct roots.
    """
    if params.g_b == 0:
        return [_unconstrained_front(params, family, overshoot)]
    clearance = minimum_clearance(params)

    def residual(x):
        return _residual_or_none(params, family, x, overshoot)

    scored = []
    for candidate in family.candidate_fronts(params, overshoot):
        if family.front_clearance(params, candidate, overshoot) < clearance:
            continue
        value = residual(candidate)
        if value is not None:
            scored.append((abs(value), tuple(candidate)))
    scored.sort()

    scale = np.asarray(family.front_scale())
    roots = []
    for _, start in scored[:config.FRONT_ROOT_STARTS]:
        x, size, converged = _damped_newton(residual, start, scale, config.ROOT_TOLERANCE,
                                            config.ROOT_MAX_ITERATIONS)
        if not converged:
            continue
        design = _front_design(params, family, x, size, overshoot)
        if design.clearance < clearance:
            logger.debug("[Move] front root %s too close to the memory", design.front)
            continue
        if any(np.all(np.abs(np.subtract(design.front, root.front)) <= 1e-4 * scale) for root in roots):
            continue
        roots.append(design)
        if len(roots) >= limit:
            break
    roots.sort(key=lambda root: -root.clearance)
    for root in roots:
        logger.debug("[Move] front root %s, clearance %.4f GHz", root.front, root.clearance)
    return roots


def design_front_ramp(params: DeviceParams, family, overshoot: float = 0.0,
                      initial: Optional[Tuple[float, float]] = None) -> FrontRampDesign:
    """Two front-ramp parameters that leave no bus tail at the start of the flat part.

    A converged root next to `initial` is kept when it clears the memory; otherwise the
    widest-clearance root of the candidate grid is returned.
    """
    if params.g_b == 0:
        return _unconstrained_front(params, family, overshoot)

    def residual(x):
        return _residual_or_none(params, family, x, overshoot)

    scale = family.front_scale()
    if initial is not None:
        x, size, converged = _damped_newton(residual, initial, scale, config.ROOT_TOLERANCE,
                                            config.ROOT_MAX_ITERATIONS)
        if converged:
            design = _front_design(params, family, x, size, overshoot)
            if design.clearance >= minimum_clearance(params):
                return design

    roots = front_ramp_roots(params, family, overshoot)
    if roots:
        return roots[0]

    def squared(x):
        value = residual(x)
        return math.inf if value is None else abs(value) ** 2

    start = initial if initial is not None else family.default_front(params, overshoot)
    fallback = optimize.minimize(squared, start, method="Nelder-Mead",
                                 options={"xatol": 1e-12, "fatol": 1e-24, "maxfev": 4000})
    x, size, converged = _damped_newton(residual, fallback.x, scale, config.ROOT_TOLERANCE,
                                        config.ROOT_MAX_ITERATIONS)
    if not converged:
        raise DesignFailure(f"front ramp root not found, residual {size:.3e}", residual=size)
    design = _front_design(params, family, x, size, overshoot)
    logger.warning("[Move] only front root found is %.4f GHz from the flat frequency", design.clearance)
    return design


# Flat part

@dataclass(frozen=True)
class FlatDesign:
    overshoot: float  # D, rad/ns
    tau: float  # ns
    varphi: float
    flat_duration: float
    pulse: PulseShape
    iterations: int


def rabi_frequency(g_m: float, overshoot: float) -> float:
    return math.sqrt(4.0 * g_m ** 2 + overshoot ** 2)


def flat_condition(params: DeviceParams, pulse: PulseShape) -> complex:
    """Right-hand side whose real part gives D/2g_m^2 and imaginary part gives tau."""
    omega_m = params.omega_m
    detuning_start = omega_m - float(pulse.omega(0.0))
    detuning_end = omega_m - float(pulse.omega(pulse.t_end))
    if detuning_start == 0 or detuning_end == 0:
        raise DegenerateDetuningError("pulse endpoint resonant with the memory")

    def accumulated(t):
        return omega_m * t - pulse.phase(t)

    front = oscillatory_integral(lambda t: 1.0, lambda t: -accumulated(t), 0.0, pulse.t1, pulse.breakpoints)
    rear = oscillatory_integral(lambda t: 1.0, accumulated, pulse.t2, pulse.t_end, pulse.breakpoints)
    closing = np.exp(-1j * float(accumulated(pulse.t_end))) / detuning_end
    return complex(1.0 / detuning_start + closing + 1j * front + 1j * rear)


def design_flat_part(params: DeviceParams, family, front: Tuple[float, float],
                     overshoot: float = 0.0) -> FlatDesign:
    """Overshoot D and duration correction tau for fixed ramps, by fixed-point iteration."""
    g_m = params.g_m_angular
    if g_m == 0:
        raise InvalidArgumentError("memory coupling is zero; no transfer possible")
    tau = 0.0
    for iteration in range(1, config.FLAT_MAX_ITERATIONS + 1):
        duration = math.pi / rabi_frequency(g_m, overshoot) - tau
        if duration < 0:
            raise DesignFailure(f"negative flat duration {duration:.3f} ns", residual=abs(tau))
        pulse = family.build(params, front, overshoot, duration)
        condition = flat_condition(params, pulse)
        new_overshoot = 2.0 * g_m ** 2 * condition.real
        new_tau = condition.imag
        change = abs(new_overshoot - overshoot) + abs(new_tau - tau) * g_m
        overshoot, tau = new_overshoot, new_tau
        if change < config.FLAT_TOLERANCE:
            break
    else:
        logger.warning("[Move] flat part not converged after %d iterations", config.FLAT_MAX_ITERATIONS)
    duration = math.pi / rabi_frequency(g_m, overshoot) - tau
    if duration < 0:
        raise DesignFailure(f"negative flat duration {duration:.3f} ns", residual=abs(tau))
    pulse = family.build(params, front, overshoot, duration)
    return FlatDesign(
        overshoot=overshoot,
        tau=tau,
        varphi=math.pi * overshoot / (4.0 * g_m),
        flat_duration=duration,
        pulse=pulse,
        iterations=iteration,
    )


# Design record

@dataclass(frozen=True)
class MoveDesign:
    """A complete MOVE pulse: family, four design parameters and the achieved error."""
    family: str
    direction: Direction
    mode: MoveMode
    f_m: float  # GHz, fixes the flat frequency
    f_start: float  # family endpoints in qubit->memory orientation
    f_end: float
    front: Tuple[float, float]
    overshoot: float  # D, rad/ns
    tau: float
    flat_duration: float
    varphi: float
    achieved_error: float
    tail_gamma: float = 0.0
    unconstrained_front: bool = False
    stagnated: bool = False
    flags: Tuple[str, ...] = field(default=())

    def family_object(self):
        return make_family(self.family, self.f_start, self.f_end)

    def pulse(self, params: Optional[DeviceParams] = None) -> PulseShape:
        """The applied pulse; a params override only changes the memory frequency reference."""
        reference = params if params is not None else _FrequencyReference(self.f_m)
        base = self.family_object().build(reference, self.front, self.overshoot, self.flat_duration)
        return apply_direction(base, self.direction)

    def with_result(self, report: MoveErrorReport) -> "MoveDesign":
        return replace(self, achieved_error=report.err, tail_gamma=report.tail_gamma)

    def to_record(self) -> str:
        lines = ["# move design"]
        for item in fields(self):
            lines.append(f"{item.name} = {_format_value(getattr(self, item.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "MoveDesign":
        values = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        known = {item.name for item in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidArgumentError(f"unknown design record keys {sorted(unknown)}")
        try:
            return cls(
                family=values["family"],
                direction=Direction(values["direction"]),
                mode=MoveMode(values["mode"]),
                f_m=float(values["f_m"]),
                f_start=float(values["f_start"]),
                f_end=float(values["f_end"]),
                front=tuple(float(v) for v in values["front"].split(",")),
                overshoot=float(values["overshoot"]),
                tau=float(values["tau"]),
                flat_duration=float(values["flat_duration"]),
                varphi=float(values["varphi"]),
                achieved_error=float(values["achieved_error"]),
                tail_gamma=float(values.get("tail_gamma", "0")),
                unconstrained_front=values.get("unconstrained_front", "false") == "true",
                stagnated=values.get("stagnated", "false") == "true",
                flags=tuple(flag for flag in values.get("flags", "").split(",") if flag),
            )
        except KeyError as missing:
            raise InvalidArgumentError(f"design record lacks {missing}") from None


@dataclass(frozen=True)
class _FrequencyReference:
    f_m: float


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (Direction, MoveMode)):
        return value.value
    if isinstance(value, tuple):
        return ",".join(_format_value(item) if not isinstance(item, str) else item for item in value)
    return str(value)


def validity_flags(params: DeviceParams, overshoot: float, tau: float) -> Tuple[str, ...]:
    """Leading-order validity of a design: small overshoot and small duration correction."""
    g_m = params.g_m_angular
    flags = []
    if abs(overshoot / g_m) >= config.SMALL_OVERSHOOT_LIMIT:
        flags.append("large-overshoot")
    if abs(tau) >= config.SMALL_TAU_FRACTION * math.pi / rabi_frequency(g_m, overshoot):
        flags.append("large-duration-correction")
    for flag in flags:
        logger.warning("[Move] design outside leading-order validity: %s", flag)
        warnings.warn(f"MOVE design outside leading-order validity: {flag}", ValidityWarning, stacklevel=3)
    return tuple(flags)


def _refine_root(params: DeviceParams, family, root: FrontRampDesign):
    """Alternate flat-part and front-ramp solves starting from one front-ramp root."""
    overshoot = 0.0
    front_design = root
    for sweep in range(config.DESIGN_SWEEPS):
        flat = design_flat_part(params, family, front_design.front, overshoot)
        overshoot = flat.overshoot
        front_design = design_front_ramp(params, family, overshoot, initial=front_design.front)
        logger.debug("[Move] sweep %d: D/2pi=%.6f GHz, tau=%.4f ns", sweep, overshoot / (2 * math.pi), flat.tau)
    return front_design, design_flat_part(params, family, front_design.front, overshoot)


def analytic_design(params: DeviceParams, family, direction: Direction = Direction.QUBIT_TO_MEMORY,
                    dt: float = config.DEFAULT_DT_NS) -> MoveDesign:
    """Alternate the front-ramp and flat-part solves, then measure the resulting error.

    Every admissible front-ramp root is carried through the alternation and the design
    with the smallest MOVE error is kept. The family is given in qubit->memory orientation;
    memory->qubit MOVEs apply its time reversal.
    """
    roots = front_ramp_roots(params, family) or [design_front_ramp(params, family)]
    best, failure = None, None
    for root in roots:
        try:
            front_design, flat = _refine_root(params, family, root)
        except DesignFailure as error:
            logger.info("[Move] front root %s dropped: %s", root.front, error)
            failure = error
            continue
        report = move_error(params, apply_direction(flat.pulse, direction), direction, dt)
        logger.debug("[Move] front root %s gives error %.3e", root.front, report.err)
        if best is None or report.err < best[2].err:
            best = (front_design, flat, report)
    if best is None:
        raise failure
    front_design, flat, report = best
    logger.info("[Move] analytic %s design, error %.3e", family.name, report.err)
    return MoveDesign(
        family=family.name,
        direction=direction,
        mode=MoveMode.ANALYTIC,
        f_m=params.f_m,
        f_start=family.f_start,
        f_end=family.f_end,
        front=front_design.front,
        overshoot=flat.overshoot,
        tau=flat.tau,
        flat_duration=flat.flat_duration,
        varphi=flat.varphi,
        achieved_error=report.err,
        tail_gamma=report.tail_gamma,
        unconstrained_front=front_design.unconstrained,
        flags=validity_flags(params, flat.overshoot, flat.tau),
    )


def move_with_occupied_bus(params: DeviceParams, design: MoveDesign,
                           dt: float = config.DEFAULT_DT_NS) -> float:
    """Error of the same pulse when the bus already holds a photon (two-excitation block)."""
    pulse = design.pulse(params)
    if design.direction is Direction.QUBIT_TO_MEMORY:
        initial, target = QUBIT_BUS, MEMORY_BUS
    else:
        initial, target = MEMORY_BUS, QUBIT_BUS
    (amplitude,) = _endpoint_amplitudes(params, pulse, 2, initial, target, (), dt)
    return min(max(1.0 - abs(amplitude) ** 2, 0.0), 1.0)
