"""Adiabatic tail errors left on the bus or on another qubit by a pulse ramp."""

from typing import Tuple

from ..dynamics.pulses import PulseShape
from ..dynamics.quadrature import oscillatory_integral
from ..errors import InvalidArgumentError
from ..units import to_angular


def _window(pulse: PulseShape, window: str) -> Tuple[float, float]:
    if window == 'front':
        return 0.0, pulse.front_window_end
    if window == 'rear':
        return pulse.rear_window_start, pulse.t_end
    raise InvalidArgumentError(f"window must be 'front' or 'rear', got {window!r}")


def tail_error_front_ramp(pulse: PulseShape, g_b: float, f_b: float, window: str = 'front') -> float:
    """|int g_b w_q'(t) / Delta_b(t)^2 exp(-i A(t)) dt|^2 over the ramp window (inputs in GHz)."""
    coupling = to_angular(g_b)
    omega_b = to_angular(f_b)
    t_start, t_stop = _window(pulse, window)

    def amplitude(t):
        return coupling * pulse.omega_dot(t) / (pulse.omega(t) - omega_b) ** 2

    def phase(t):
        return pulse.phase(t) - omega_b * t

    value = oscillatory_integral(amplitude, phase, t_start, t_stop, pulse.breakpoints)
    return abs(value) ** 2


def tail_error_kth_qubit(pulse: PulseShape, g_b: float, g_bk: float, f_qk: float, f_b: float,
                         window: str = 'front') -> float:
    """Tail left on the k-th qubit through the bus during a qubit-bus MOVE ramp (inputs in GHz)."""
    omega_qk = to_angular(f_qk)
    delta_bk = omega_qk - to_angular(f_b)
    if delta_bk == 0:
        raise InvalidArgumentError("k-th qubit resonant with the bus")
    coupling = to_angular(g_b) * to_angular(g_bk) / delta_bk
    t_start, t_stop = _window(pulse, window)

    def amplitude(t):
        return coupling * pulse.omega_dot(t) / (pulse.omega(t) - omega_qk) ** 2

    def phase(t):
        return pulse.phase(t) - omega_qk * t

    value = oscillatory_integral(amplitude, phase, t_start, t_stop, pulse.breakpoints)
    return abs(value) ** 2
