"""Adaptive quadrature of oscillatory integrals split at fixed phase increments."""

import math
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

import config


def phase_knots(phase: Callable, t_start: float, t_stop: float,
                step: float = config.PHASE_SPLIT, extra: Sequence[float] = ()) -> np.ndarray:
    """Times where the phase crosses multiples of `step`, plus the window ends and `extra`."""
    count = max(64, int(math.ceil((t_stop - t_start) * config.PHASE_SAMPLES_PER_NS)))
    times = np.linspace(t_start, t_stop, count + 1)
    levels = np.floor(np.asarray(phase(times), dtype=float) / step)
    knots = [t_start, t_stop]
    for i in np.nonzero(np.diff(levels))[0]:
        # one knot per sampled crossing, placed by linear interpolation
        left, right = float(times[i]), float(times[i + 1])
        phi_left, phi_right = float(phase(left)), float(phase(right))
        target = step * max(levels[i], levels[i + 1])
        if phi_right != phi_left:
            fraction = (target - phi_left) / (phi_right - phi_left)
            knots.append(left + min(max(fraction, 0.0), 1.0) * (right - left))
    knots.extend(b for b in extra if t_start < b < t_stop)
    return np.unique(np.array(knots, dtype=float))


def oscillatory_integral(amplitude: Callable, phase: Callable, t_start: float, t_stop: float,
                         breakpoints: Sequence[float] = (),
                         epsabs: float = config.QUADRATURE_ABS_TOL) -> complex:
    """Integral of amplitude(t) * exp(-i phase(t)) over [t_start, t_stop]."""
    if t_stop <= t_start:
        return 0j

    def integrand(t):
        value = complex(amplitude(t)) * np.exp(-1j * float(phase(t)))
        return np.array([value.real, value.imag])

    knots = phase_knots(phase, t_start, t_stop, extra=breakpoints)
    result, _ = quad_vec(integrand, t_start, t_stop, epsabs=epsabs, epsrel=0.0,
                         points=knots[1:-1], limit=10000)
    return complex(result[0], result[1])
