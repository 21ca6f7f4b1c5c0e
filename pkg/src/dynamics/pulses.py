"""Qubit-frequency pulse shapes omega_q(t)."""

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.special import erf

import config
from ..errors import InvalidArgumentError
from ..units import to_angular

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def step_profile(u):
    """Integrated unit Gaussian, S(u) = (1 + erf(u / sqrt 2)) / 2."""
    return 0.5 * (1.0 + erf(np.asarray(u, dtype=float) / _SQRT2))


def step_density(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)


def step_antiderivative(u):
    """F with F' = S."""
    u = np.asarray(u, dtype=float)
    return 0.5 * (u + u * erf(u / _SQRT2) + _SQRT_2_OVER_PI * np.exp(-0.5 * u * u))


class PulseShape:
    """Qubit frequency trajectory on [0, t_end], evaluated in GHz and rad/ns."""

    t_end: float

    # Linear-frequency primitives (GHz, GHz/ns, cycles)
    def frequency_ghz(self, t):
        raise NotImplementedError

    def slope_ghz(self, t):
        raise NotImplementedError

    def phase_cycles(self, t):
        raise NotImplementedError

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior times where omega_q is not smooth."""
        return ()

    @property
    def t1(self) -> float:
        """Start of the flat part."""
        raise NotImplementedError

    @property
    def t2(self) -> float:
        """End of the flat part."""
        raise NotImplementedError

    @property
    def front_window_end(self) -> float:
        return self.t1

    @property
    def rear_window_start(self) -> float:
        return self.t2

    # Angular views
    def omega(self, t):
        return to_angular(self.frequency_ghz(t))

    def omega_dot(self, t):
        return to_angular(self.slope_ghz(t))

    def phase(self, t):
        """Integral of omega_q from 0 to t (rad)."""
        return to_angular(self.phase_cycles(t))

    def reversed(self) -> "PulseShape":
        return ReversedPulse(self)

    def samples(self, spacing: float = config.TRAJECTORY_SAMPLE_NS) -> Tuple[np.ndarray, np.ndarray]:
        count = max(2, int(math.ceil(self.t_end / spacing)) + 1)
        times = np.linspace(0.0, self.t_end, count)
        return times, self.frequency_ghz(times)

    def describe(self) -> Dict[str, object]:
        raise NotImplementedError


@dataclass(frozen=True)
class PiecewiseLinearPulse(PulseShape):
    """Linear interpolation through (t, f_q) knots."""
    points: Tuple[Tuple[float, float], ...]
    flat_start: float = None
    flat_end: float = None
    _times: np.ndarray = field(init=False, repr=False, compare=False)
    _freqs: np.ndarray = field(init=False, repr=False, compare=False)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = tuple((float(t), float(f)) for t, f in self.points)
        if len(points) < 2:
            raise InvalidArgumentError("a piecewise-linear pulse needs at least two points")
        times = np.array([t for t, _ in points])
        freqs = np.array([f for _, f in points])
        if times[0] != 0.0:
            raise InvalidArgumentError(f"pulse must start at t=0, got {times[0]}")
        if np.any(np.diff(times) <= 0) or not np.all(np.isfinite(times)):
            raise InvalidArgumentError("breakpoint times must be finite and strictly increasing")
        if np.any(freqs <= 0):
            raise InvalidArgumentError("pulse frequencies must be positive")
        widths = np.diff(times)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, '_times', times)
        object.__setattr__(self, '_freqs', freqs)
        object.__setattr__(self, '_slopes', np.diff(freqs) / widths)
        object.__setattr__(self, '_cumulative',
                           np.concatenate([[0.0], np.cumsum(0.5 * (freqs[:-1] + freqs[1:]) * widths)]))
        if self.flat_start is None:
            object.__setattr__(self, 'flat_start', float(times[1]) if len(times) > 2 else 0.0)
        if self.flat_end is None:
            object.__setattr__(self, 'flat_end', float(times[-2]) if len(times) > 2 else float(times[-1]))

    @property
    def t_end(self) -> float:
        return float(self._times[-1])

    @property
    def t1(self) -> float:
        return self.flat_start

    @property
    def t2(self) -> float:
        return self.flat_end

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(t) for t in self._times[1:-1])

    def frequency_ghz(self, t):
        return np.interp(t, self._times, self._freqs)

    def _segment(self, t):
        index = np.searchsorted(self._times, t, side='right') - 1
        return np.clip(index, 0, len(self._slopes) - 1)

    def slope_ghz(self, t):
        t = np.asarray(t, dtype=float)
        slope = self._slopes[self._segment(t)]
        return np.where((t < 0.0) | (t > self.t_end), 0.0, slope)

    def phase_cycles(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.clip(t, 0.0, self.t_end)
        index = self._segment(inside)
        start = self._times[index]
        value = self._cumulative[index] + 0.5 * (inside - start) * (self._freqs[index] + self.frequency_ghz(inside))
        # constant continuation outside the pulse window
        value = value + self._freqs[0] * np.minimum(t, 0.0)
        return value + self._freqs[-1] * np.maximum(t - self.t_end, 0.0)

    def describe(self) -> Dict[str, object]:
        return {
            'shape': 'piecewise-linear',
            'points': [list(point) for point in self.points],
            'flat_start': self.flat_start,
            'flat_end': self.flat_end,
        }


@dataclass(frozen=True)
class ErfRampPulse(PulseShape):
    """Error-function ramps: a two-step front ramp, a flat part and one rear step."""
    f_start: float
    f_flat: float
    f_end: float
    sigma: float = config.ERF_SIGMA_NS
    front_shift: float = 0.0  # delay of the second front step (ns)
    front_ratio: float = 1.0  # weight of the first front step
    flat_duration: float = 0.0  # between the front and rear inflection points
    margin: float = config.ERF_MARGIN_SIGMAS
    rear_sigma: float = None

    def __post_init__(self):
        if self.rear_sigma is None:
            object.__setattr__(self, 'rear_sigma', self.sigma)
        if not (self.sigma > 0 and self.rear_sigma > 0):
            raise InvalidArgumentError("erf widths must be positive")
        if self.front_shift < 0:
            raise InvalidArgumentError(f"front_shift must be non-negative, got {self.front_shift}")
        if self.flat_duration < 0:
            raise InvalidArgumentError(f"flat_duration must be non-negative, got {self.flat_duration}")
        if min(self.f_start, self.f_flat, self.f_end) <= 0:
            raise InvalidArgumentError("pulse frequencies must be positive")

    # Step centers
    @property
    def first_center(self) -> float:
        return self.margin * self.sigma

    @property
    def second_center(self) -> float:
        return self.first_center + self.front_shift

    @property
    def rear_center(self) -> float:
        return self.second_center + self.flat_duration

    @property
    def t_end(self) -> float:
        return self.rear_center + self.margin * self.rear_sigma

    @property
    def t1(self) -> float:
        return self.second_center

    @property
    def t2(self) -> float:
        return self.rear_center

    @property
    def front_window_end(self) -> float:
        return self.second_center + min(self.margin * self.sigma, 0.5 * self.flat_duration)

    @property
    def rear_window_start(self) -> float:
        return self.rear_center - min(self.margin * self.rear_sigma, 0.5 * self.flat_duration)

    def _steps(self):
        rise = self.f_flat - self.f_start
        return (
            (rise * self.front_ratio, self.first_center, self.sigma),
            (rise * (1.0 - self.front_ratio), self.second_center, self.sigma),
            (self.f_end - self.f_flat, self.rear_center, self.rear_sigma),
        )

    def frequency_ghz(self, t):
        t = np.asarray(t, dtype=float)
        value = np.full_like(t, self.f_start)
        for height, center, width in self._steps():
            value = value + height * step_profile((t - center) / width)
        return value

    def slope_ghz(self, t):
        t = np.asarray(t, dtype=float)
        value = np.zeros_like(t)
        for height, center, width in self._steps():
            value = value + height * step_density((t - center) / width) / width
        return value

    def phase_cycles(self, t):
        t = np.asarray(t, dtype=float)
        value = self.f_start * t
        for height, center, width in self._steps():
            value = value + height * width * (step_antiderivative((t - center) / width)
                                              - step_antiderivative(-center / width))
        return value

    def describe(self) -> Dict[str, object]:
        values = dataclasses.asdict(self)
        values['shape'] = 'erf'
        return values


@dataclass(frozen=True)
class ReversedPulse(PulseShape):
    """Time reversal t -> t_end - t of another pulse."""
    base: PulseShape

    @property
    def t_end(self) -> float:
        return self.base.t_end

    @property
    def t1(self) -> float:
        return self.t_end - self.base.t2

    @property
    def t2(self) -> float:
        return self.t_end - self.base.t1

    @property
    def front_window_end(self) -> float:
        return self.t_end - self.base.rear_window_start

    @property
    def rear_window_start(self) -> float:
        return self.t_end - self.base.front_window_end

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(sorted(self.t_end - b for b in self.base.breakpoints))

    def frequency_ghz(self, t):
        return self.base.frequency_ghz(self.t_end - np.asarray(t, dtype=float))

    def slope_ghz(self, t):
        return -self.base.slope_ghz(self.t_end - np.asarray(t, dtype=float))

    def phase_cycles(self, t):
        total = self.base.phase_cycles(self.t_end)
        return total - self.base.phase_cycles(self.t_end - np.asarray(t, dtype=float))

    def reversed(self) -> PulseShape:
        return self.base

    def describe(self) -> Dict[str, object]:
        return {'shape': 'reversed', 'base': self.base.describe()}


def constant_pulse(f_q: float, duration: float) -> PiecewiseLinearPulse:
    return PiecewiseLinearPulse(((0.0, f_q), (duration, f_q)), flat_start=0.0, flat_end=duration)


def linear_sweep(points: Sequence[Tuple[float, float]]) -> PiecewiseLinearPulse:
    return PiecewiseLinearPulse(tuple(points))


def erf_ramp(f_start: float, f_stop: float, sigma: float,
             margin: float = config.ERF_MARGIN_SIGMAS) -> ErfRampPulse:
    """Single error-function ramp followed by a flat part that holds its tail."""
    return ErfRampPulse(f_start, f_stop, f_stop, sigma, front_shift=0.0, front_ratio=1.0,
                        flat_duration=2.0 * margin * sigma, margin=margin)
