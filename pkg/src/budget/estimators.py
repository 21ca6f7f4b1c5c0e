"""Closed-form worst-case error estimates for RezQu and conventional architectures."""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import config
from ..errors import InvalidArgumentError, PoleError, ValidityWarning

logger = logging.getLogger("rezqu.budget")


@dataclass(frozen=True)
class ArchitectureParams:
    """Typical device-section parameters, angular units (rad/ns)."""
    n_qubits: int
    n_ops: int
    delta_m: float  # idling memory-qubit detuning
    delta_b: float  # idling qubit-bus detuning
    g_m: float
    g_b: float
    memory_spacing: Optional[float] = None  # defaults to delta_m / N
    memory_bus: Optional[float] = None  # omega_m - omega_b, defaults to delta_m + delta_b
    # k-th section
    g_mk: Optional[float] = None
    g_bk: Optional[float] = None
    delta_mk: Optional[float] = None
    delta_bk: Optional[float] = None
    omega_qk: Optional[float] = None

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_ops < 1:
            raise InvalidArgumentError("need at least one qubit and one operation")
        for name in ('delta_m', 'delta_b', 'memory_spacing', 'memory_bus', 'delta_mk', 'delta_bk'):
            value = getattr(self, name)
            if value is not None and value == 0:
                raise InvalidArgumentError(f"{name} must be nonzero")
        if self.memory_spacing is None:
            object.__setattr__(self, 'memory_spacing', self.delta_m / self.n_qubits)
        if self.memory_bus is None:
            object.__setattr__(self, 'memory_bus', self.delta_m + self.delta_b)
        # Unset k-th section values mirror this section
        for name, default in (('g_mk', self.g_m), ('g_bk', self.g_b),
                              ('delta_mk', self.delta_m), ('delta_bk', self.delta_b)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)

    @classmethod
    def symmetric(cls, n_qubits: int, n_ops: int, g: float, delta: float, **overrides) -> "ArchitectureParams":
        """Identical sections with g_m = g_b = g and Delta_m = Delta_b = Delta."""
        return cls(n_qubits=n_qubits, n_ops=n_ops, delta_m=delta, delta_b=delta, g_m=g, g_b=g, **overrides)


def idling_error(omega_zz: float, t: float, amplitude11: Optional[complex] = None) -> float:
    """Quadratic idling error (Omega t)^2, or p(1-p)(Omega t)^2 for |11> weight p."""
    angle = omega_zz * t
    if abs(angle) > config.IDLING_VALIDITY_LIMIT:
        warnings.warn(f"|Omega_ZZ t| = {abs(angle):.3g} exceeds the small-angle range", ValidityWarning,
                      stacklevel=2)
    if amplitude11 is None:
        return angle ** 2
    weight = abs(amplitude11) ** 2
    return weight * (1.0 - weight) * angle ** 2


def idling_overlap_error(omega_zz: float, t: float, amplitude11: Optional[complex] = None) -> float:
    """Exact 1 - |<desired|actual>|^2 for a phase Omega t picked up by |11> only."""
    weight = 0.5 if amplitude11 is None else abs(amplitude11) ** 2
    return 2.0 * weight * (1.0 - weight) * (1.0 - math.cos(omega_zz * t))


def _coupling_ratio(g_m: float, g_b: float) -> float:
    smallest = min(g_m, g_b)
    if smallest == 0:
        raise InvalidArgumentError("max/min coupling factor needs nonzero couplings")
    return max(g_m, g_b) / smallest


def idle_rezqu_worstcase(arch: ArchitectureParams, eta: float) -> float:
    """g_m^3 g_b^3 eta^2 N^2 N_op^2 / (Delta_m^4 Delta_b^4) * max(g)/min(g)."""
    ratio = _coupling_ratio(arch.g_m, arch.g_b)
    return ((arch.g_m * arch.g_b) ** 3 * eta ** 2 * arch.n_qubits ** 2 * arch.n_ops ** 2
            / (arch.delta_m ** 4 * arch.delta_b ** 4) * ratio)


def omega_zz_conventional(g_b: float, delta_b: float, eta: float) -> float:
    """Qubit-bus ZZ coupling of a bus-only architecture."""
    if delta_b == 0:
        raise InvalidArgumentError("Delta_b must be nonzero")
    if delta_b == eta:
        raise PoleError("Delta_b equals eta: bus resonant with the qubit 1-2 transition")
    return -2.0 * g_b ** 2 * eta / (delta_b * (delta_b - eta))


def idle_conventional(arch: ArchitectureParams, eta: float) -> float:
    return arch.g_b ** 2 * eta ** 2 * arch.n_qubits ** 2 * arch.n_ops ** 2 / arch.delta_b ** 4


def conventional_crowding_error(arch: ArchitectureParams) -> float:
    """Spectral-crowding counterpart of the memory XX error without memories."""
    return arch.n_qubits ** 2 * arch.n_ops ** 2 * arch.g_b ** 4 / arch.delta_b ** 4


@dataclass(frozen=True)
class MemoryMemoryErrors:
    omega_xx: float
    err_xx: float
    err_zz: float


def memory_memory_errors(arch: ArchitectureParams, eta: float) -> MemoryMemoryErrors:
    """XX exchange between memories and the resulting retrieval and ZZ errors."""
    if arch.memory_bus == 0:
        raise InvalidArgumentError("omega_m - omega_b must be nonzero")
    couplings = (arch.g_m, arch.g_b, arch.g_mk, arch.g_bk)
    if min(couplings) == 0:
        return MemoryMemoryErrors(0.0, 0.0, 0.0)
    omega_xx = 2.0 * arch.g_m * arch.g_mk * arch.g_b * arch.g_bk / (arch.delta_m * arch.delta_mk * arch.memory_bus)
    err_xx = arch.n_ops ** 2 * (omega_xx / arch.memory_spacing) ** 2
    err_zz = ((arch.g_m * arch.g_b) ** 7 * eta ** 2 * arch.n_qubits ** 4 * arch.n_ops ** 2
              / (arch.delta_m ** 8 * arch.delta_b ** 8) * _coupling_ratio(arch.g_m, arch.g_b))
    return MemoryMemoryErrors(omega_xx, err_xx, err_zz)


def landau_zener_error(g_b: float, g_bk: float, delta_b: float, sweep_rate: float,
                       g_mk: Optional[float] = None, delta_mk: Optional[float] = None) -> float:
    """Crossing error with another qubit, or with another memory when g_mk is given."""
    if sweep_rate == 0:
        raise InvalidArgumentError("zero sweep rate: adiabatic limit, estimate not valid")
    if delta_b == 0:
        raise InvalidArgumentError("Delta_b must be nonzero")
    error = 2.0 * math.pi * g_b ** 2 * g_bk ** 2 / (delta_b ** 2 * abs(sweep_rate))
    if g_mk is not None:
        if not delta_mk:
            raise InvalidArgumentError("Delta_mk must be nonzero for the qubit-memory crossing")
        error *= g_mk ** 2 / delta_mk ** 2
    return error


@dataclass(frozen=True)
class ErrorTerm:
    name: str
    value: float
    formula: str


@dataclass
class ErrorBudget:
    """Named dimensionless error terms with the formula each came from."""
    terms: Dict[str, ErrorTerm] = field(default_factory=dict)

    def add(self, name: str, value: float, formula: str):
        if value < 0:
            raise InvalidArgumentError(f"error term {name} is negative: {value}")
        self.terms[name] = ErrorTerm(name, float(value), formula)

    def value(self, name: str) -> float:
        return self.terms[name].value

    def as_dict(self) -> Dict[str, float]:
        return {name: term.value for name, term in self.terms.items()}


def error_budget(arch: ArchitectureParams, eta: float, sweep_rate: float,
                 tail_move: Optional[float] = None, tail_qubit_k: Optional[float] = None) -> ErrorBudget:
    """Every closed-form term at one architecture point."""
    budget = ErrorBudget()
    budget.add('idle_rezqu', idle_rezqu_worstcase(arch, eta), 'rezqu-idle-worst-case')
    budget.add('idle_conventional', idle_conventional(arch, eta), 'conventional-idle')
    memory = memory_memory_errors(arch, eta)
    budget.add('xx_memory_memory', memory.err_xx, 'memory-xx-retrieval')
    budget.add('zz_memory_memory', memory.err_zz, 'memory-zz-worst-case')
    if tail_move is not None:
        budget.add('tail_move', tail_move, 'front-ramp-tail')
    if tail_qubit_k is not None:
        budget.add('tail_qubit_k', tail_qubit_k, 'kth-qubit-tail')
    budget.add('lz_qubit_qubit', landau_zener_error(arch.g_b, arch.g_bk, arch.delta_b, sweep_rate),
               'lz-qubit-qubit')
    budget.add('lz_qubit_memory',
               landau_zener_error(arch.g_b, arch.g_bk, arch.delta_b, sweep_rate,
                                  g_mk=arch.g_mk, delta_mk=arch.delta_mk),
               'lz-qubit-memory')
    logger.debug("[Budget] N=%d N_op=%d: %s", arch.n_qubits, arch.n_ops, budget.as_dict())
    return budget
