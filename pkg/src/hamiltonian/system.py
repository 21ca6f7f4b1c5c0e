"""RWA Hamiltonian of the memory-qubit-bus system."""

import dataclasses
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidArgumentError
from ..units import to_angular
from .basis import BasisLabel, enumerate_basis


@dataclass(frozen=True)
class DeviceParams:
    """Static parameters of a truncated mqb device, in linear GHz."""
    f_m: float  # memory
    f_b: float  # bus
    eta: float  # qubit anharmonicity
    g_m: float  # memory-qubit coupling
    g_b: float  # qubit-bus coupling
    include_gd: bool = False

    def __post_init__(self):
        for name in ('f_m', 'f_b', 'eta', 'g_m', 'g_b'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
        if not self.f_m > self.f_b > 0:
            raise InvalidArgumentError(f"need f_m > f_b > 0, got f_m={self.f_m}, f_b={self.f_b}")
        if self.g_m < 0 or self.g_b < 0:
            raise InvalidArgumentError("couplings must be non-negative")
        if self.eta < 0:
            raise InvalidArgumentError("anharmonicity must be non-negative")

    # Angular values (rad/ns)
    @property
    def omega_m(self) -> float:
        return to_angular(self.f_m)

    @property
    def omega_b(self) -> float:
        return to_angular(self.f_b)

    @property
    def eta_angular(self) -> float:
        return to_angular(self.eta)

    @property
    def g_m_angular(self) -> float:
        return to_angular(self.g_m)

    @property
    def g_b_angular(self) -> float:
        return to_angular(self.g_b)

    @property
    def midpoint_omega_q(self) -> float:
        """Qubit frequency where the fourth-order ZZ coupling vanishes."""
        return 0.5 * (self.omega_m + self.omega_b)

    def direct_coupling(self, omega_q):
        """g_d = 2 g_m g_b / omega_q, zero when disabled."""
        if not self.include_gd:
            return np.zeros_like(np.asarray(omega_q, dtype=float))
        return 2.0 * self.g_m_angular * self.g_b_angular / np.asarray(omega_q, dtype=float)

    def replace(self, **changes) -> "DeviceParams":
        return dataclasses.replace(self, **changes)

    def scaled_couplings(self, factor: float) -> "DeviceParams":
        return self.replace(g_m=self.g_m * factor, g_b=self.g_b * factor)


class Coupling(NamedTuple):
    """One off-diagonal ladder element; value = factor * g_kind."""
    row: int
    col: int
    kind: str  # 'm', 'b' or 'd'
    factor: float


def ladder_couplings(basis: Sequence[BasisLabel]) -> List[Coupling]:
    """Ladder couplings inside each excitation block, one entry per connected pair."""
    index = {label: i for i, label in enumerate(basis)}
    couplings = []
    for col, label in enumerate(basis):
        n_m, n_q, n_b = label.n_m, label.n_q, label.n_b
        # qubit -> memory
        target = BasisLabel(n_m + 1, n_q - 1, n_b) if n_q > 0 else None
        if target in index:
            couplings.append(Coupling(index[target], col, 'm', math.sqrt((n_m + 1) * n_q)))
        # qubit -> bus
        target = BasisLabel(n_m, n_q - 1, n_b + 1) if n_q > 0 else None
        if target in index:
            couplings.append(Coupling(index[target], col, 'b', math.sqrt(n_q * (n_b + 1))))
        # bus -> memory, direct capacitive path
        target = BasisLabel(n_m + 1, n_q, n_b - 1) if n_b > 0 else None
        if target in index:
            couplings.append(Coupling(index[target], col, 'd', math.sqrt((n_m + 1) * n_b)))
    return couplings


def frame_offsets(params: DeviceParams, basis: Sequence[BasisLabel]) -> Tuple[np.ndarray, np.ndarray]:
    """Bare energy split as offset + n_q * omega_q for each label."""
    offsets = np.array([
        label.n_m * params.omega_m + label.n_b * params.omega_b
        - (params.eta_angular if label.n_q == 2 else 0.0)
        for label in basis
    ])
    qubit_counts = np.array([float(label.n_q) for label in basis])
    return offsets, qubit_counts


def bare_energy(params: DeviceParams, label: BasisLabel, omega_q: float) -> float:
    offsets, counts = frame_offsets(params, [label])
    return float(offsets[0] + counts[0] * omega_q)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense RWA Hamiltonian over an ordered bare basis (rad/ns)."""
    matrix: np.ndarray
    basis: Tuple[BasisLabel, ...]
    omega_q: Optional[float] = None

    def index_of(self, label: BasisLabel) -> int:
        return self.basis.index(label)

    def block_indices(self, n_exc: int) -> np.ndarray:
        indices = [i for i, label in enumerate(self.basis) if label.n_exc == n_exc]
        if not indices:
            raise InvalidArgumentError(f"no states with {n_exc} excitations in this basis")
        return np.array(indices)

    def block_basis(self, n_exc: int) -> Tuple[BasisLabel, ...]:
        return tuple(self.basis[i] for i in self.block_indices(n_exc))

    def block(self, n_exc: int) -> np.ndarray:
        indices = self.block_indices(n_exc)
        return self.matrix[np.ix_(indices, indices)]


def assemble_hamiltonian(params: DeviceParams, omega_q: float, max_excitation: int = 2) -> HamiltonianMatrix:
    """Assemble the RWA Hamiltonian at a fixed qubit frequency omega_q (rad/ns)."""
    if not omega_q > 0:
        raise InvalidArgumentError(f"omega_q must be positive, got {omega_q!r}")
    basis = tuple(enumerate_basis(max_excitation))
    offsets, counts = frame_offsets(params, basis)
    matrix = np.diag(offsets + counts * omega_q).astype(complex)

    strengths = {
        'm': params.g_m_angular,
        'b': params.g_b_angular,
        'd': float(params.direct_coupling(omega_q)),
    }
    for coupling in ladder_couplings(basis):
        value = strengths[coupling.kind] * coupling.factor
        matrix[coupling.row, coupling.col] = value
        matrix[coupling.col, coupling.row] = value

    matrix.setflags(write=False)
    return HamiltonianMatrix(matrix=matrix, basis=basis, omega_q=float(omega_q))
