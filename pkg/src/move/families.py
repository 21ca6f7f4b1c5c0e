"""Two-parameter front-ramp pulse families for the qubit->memory MOVE."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import config
from ..dynamics.pulses import ErfRampPulse, PiecewiseLinearPulse, PulseShape
from ..errors import InvalidArgumentError
from ..hamiltonian.system import DeviceParams
from ..units import to_ghz


class Direction(Enum):
    QUBIT_TO_MEMORY = "qubit->memory"
    MEMORY_TO_QUBIT = "memory->qubit"


class MoveMode(Enum):
    ANALYTIC = "analytic"
    TWO_PARAM = "two_param"
    FOUR_PARAM = "four_param"


def flat_frequency(params: DeviceParams, overshoot: float) -> float:
    """Qubit frequency (GHz) on the flat part, Delta_m = -D."""
    return params.f_m + to_ghz(overshoot)


@dataclass(frozen=True)
class PiecewiseLinearFamily:
    """Front ramp of two straight segments, flat part, straight rear ramp."""
    f_start: float
    f_end: float
    ramp_slope: float = config.RAMP_SLOPE_GHZ_PER_NS
    max_front_slope: float = config.MAX_FRONT_SLOPE_GHZ_PER_NS

    name = "piecewise-linear"
    front_names = ("front_slope_ghz_per_ns", "knee_ghz")

    def default_front(self, params: DeviceParams, overshoot: float = 0.0) -> Tuple[float, float]:
        """A single straight front ramp at the fixed slope."""
        f_flat = flat_frequency(params, overshoot)
        slope = math.copysign(self.ramp_slope, f_flat - self.f_start)
        return slope, 0.5 * (self.f_start + f_flat)

    def front_scale(self) -> Tuple[float, float]:
        return 0.05, 0.02

    def candidate_fronts(self, params: DeviceParams, overshoot: float) -> Sequence[Tuple[float, float]]:
        f_flat = flat_frequency(params, overshoot)
        span = f_flat - self.f_start
        candidates = []
        for step in range(1, 21):
            magnitude = self.max_front_slope * step / 20.0
            for fraction in (-0.5, -0.3, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
                slope = math.copysign(magnitude, fraction * span)
                candidates.append((slope, self.f_start + fraction * span))
        return candidates

    def front_clearance(self, params: DeviceParams, front: Sequence[float], overshoot: float) -> float:
        """Distance (GHz) from the knee to the flat frequency; negative past it."""
        f_flat = flat_frequency(params, overshoot)
        return math.copysign(1.0, f_flat - self.f_start) * (f_flat - float(front[1]))

    def build(self, params: DeviceParams, front: Sequence[float], overshoot: float,
              flat_duration: float) -> PiecewiseLinearPulse:
        slope, knee = (float(value) for value in front)
        f_flat = flat_frequency(params, overshoot)
        if slope == 0 or abs(slope) > self.max_front_slope:
            raise InvalidArgumentError(f"front slope {slope:g} GHz/ns outside (0, {self.max_front_slope:g}]")
        t_knee = (knee - self.f_start) / slope
        if not t_knee > 0:
            raise InvalidArgumentError("knee frequency not reachable with this slope")
        if knee == f_flat:
            raise InvalidArgumentError("knee coincides with the flat frequency")
        if flat_duration < 0:
            raise InvalidArgumentError(f"negative flat duration {flat_duration:g} ns")
        t1 = t_knee + abs(f_flat - knee) / self.ramp_slope
        t2 = t1 + flat_duration
        t_final = t2 + abs(self.f_end - f_flat) / self.ramp_slope
        points = [(0.0, self.f_start), (t_knee, knee), (t1, f_flat)]
        if flat_duration > 0:
            points.append((t2, f_flat))
        if t_final > t2:
            points.append((t_final, self.f_end))
        return PiecewiseLinearPulse(tuple(points), flat_start=t1, flat_end=t2)


@dataclass(frozen=True)
class ErfFamily:
    """Front ramp as the sum of two shifted error functions, erf rear ramp."""
    f_start: float
    f_end: float
    sigma: float = config.ERF_SIGMA_NS
    margin: float = config.ERF_MARGIN_SIGMAS

    name = "erf"
    front_names = ("front_shift_ns", "front_ratio")

    def default_front(self, params: DeviceParams, overshoot: float = 0.0) -> Tuple[float, float]:
        """A single error-function front step."""
        return 0.0, 1.0

    def front_scale(self) -> Tuple[float, float]:
        return 0.2 * self.sigma, 0.05

    def candidate_fronts(self, params: DeviceParams, overshoot: float) -> Sequence[Tuple[float, float]]:
        return [(shift * self.sigma, ratio)
                for shift in (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
                for ratio in (-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5)]

    def front_clearance(self, params: DeviceParams, front: Sequence[float], overshoot: float) -> float:
        """Distance (GHz) from the level between the two front steps to the flat frequency."""
        shift, ratio = (float(value) for value in front)
        rise = abs(flat_frequency(params, overshoot) - self.f_start)
        return rise * (1.0 - ratio) if shift > 0 else rise

    def build(self, params: DeviceParams, front: Sequence[float], overshoot: float,
              flat_duration: float) -> ErfRampPulse:
        shift, ratio = (float(value) for value in front)
        return ErfRampPulse(
            f_start=self.f_start,
            f_flat=flat_frequency(params, overshoot),
            f_end=self.f_end,
            sigma=self.sigma,
            front_shift=shift,
            front_ratio=ratio,
            flat_duration=flat_duration,
            margin=self.margin,
        )


FAMILIES = {
    PiecewiseLinearFamily.name: PiecewiseLinearFamily,
    ErfFamily.name: ErfFamily,
}


def make_family(name: str, f_start: float, f_end: float, **options):
    """Family by name; options are the family's optional fields."""
    if name not in FAMILIES:
        raise InvalidArgumentError(f"unknown pulse family {name!r}; expected one of {sorted(FAMILIES)}")
    return FAMILIES[name](f_start, f_end, **options)


def oriented_family(name: str, direction: Direction, f_q_start: float, f_q_end: float, **options):
    """Family in qubit->memory orientation; memory->qubit pulses are its time reversal."""
    if direction is Direction.MEMORY_TO_QUBIT:
        return make_family(name, f_q_end, f_q_start, **options)
    return make_family(name, f_q_start, f_q_end, **options)


def apply_direction(pulse: PulseShape, direction: Direction) -> PulseShape:
    return pulse.reversed() if direction is Direction.MEMORY_TO_QUBIT else pulse
