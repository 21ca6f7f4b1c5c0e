"""Time-dependent generators split into diagonal frame energies and couplings."""

from typing import Hashable, Tuple

import numpy as np

from ..hamiltonian.basis import BasisLabel, block_labels
from ..hamiltonian.system import DeviceParams, frame_offsets, ladder_couplings
from .pulses import PulseShape


class BlockGenerator:
    """H(t) = diag(E(t)) + V(t) over one closed set of states.

    Integration runs in the co-moving frame psi~ = exp(i theta) psi with
    theta_k(t) = integral of E_k from 0 to t, where the generator becomes
    K(t) = exp(i theta) V(t) exp(-i theta).
    """

    basis: Tuple[Hashable, ...] = ()
    hermitian: bool = True

    def frame_energies(self, t) -> np.ndarray:
        raise NotImplementedError

    def frame_phases(self, t) -> np.ndarray:
        raise NotImplementedError

    def coupling(self, t) -> np.ndarray:
        raise NotImplementedError

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def comoving_generator(self, t) -> np.ndarray:
        theta = self.frame_phases(t)
        rotation = np.exp(1j * (theta[..., :, np.newaxis] - theta[..., np.newaxis, :]))
        return self.coupling(t) * rotation

    def hamiltonian(self, t) -> np.ndarray:
        """Bare-frame H(t), shape (..., d, d)."""
        energies = self.frame_energies(t)
        return self.coupling(t) + energies[..., :, np.newaxis] * np.eye(self.dimension)


class MqbBlockGenerator(BlockGenerator):
    """One excitation block of the memory-qubit-bus system under a qubit pulse."""

    def __init__(self, params: DeviceParams, pulse: PulseShape, n_exc: int):
        self.params = params
        self.pulse = pulse
        self.n_exc = n_exc
        self.basis: Tuple[BasisLabel, ...] = tuple(block_labels(n_exc))
        self._offsets, self._qubit_counts = frame_offsets(params, self.basis)
        self._couplings = ladder_couplings(self.basis)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return self.pulse.breakpoints

    def frame_energies(self, t) -> np.ndarray:
        omega_q = np.asarray(self.pulse.omega(t), dtype=float)
        return self._offsets + self._qubit_counts * omega_q[..., np.newaxis]

    def frame_phases(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase_q = np.asarray(self.pulse.phase(t), dtype=float)
        return self._offsets * t[..., np.newaxis] + self._qubit_counts * phase_q[..., np.newaxis]

    def coupling(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        d = self.dimension
        matrix = np.zeros(t.shape + (d, d), dtype=complex)
        strengths = {'m': self.params.g_m_angular, 'b': self.params.g_b_angular}
        if any(c.kind == 'd' for c in self._couplings):
            strengths['d'] = self.params.direct_coupling(self.pulse.omega(t))
        for c in self._couplings:
            value = strengths[c.kind] * c.factor
            matrix[..., c.row, c.col] = value
            matrix[..., c.col, c.row] = value
        return matrix


class LandauZenerGenerator(BlockGenerator):
    """Two levels crossing linearly at t = 0 with a constant coupling."""

    def __init__(self, coupling: float, sweep_rate: float):
        self.coupling_strength = float(coupling)
        self.sweep_rate = float(sweep_rate)
        self.basis = ('moving', 'other')

    def frame_energies(self, t) -> np.ndarray:
        half = 0.5 * self.sweep_rate * np.asarray(t, dtype=float)
        return np.stack([half, -half], axis=-1)

    def frame_phases(self, t) -> np.ndarray:
        quarter = 0.25 * self.sweep_rate * np.asarray(t, dtype=float) ** 2
        return np.stack([quarter, -quarter], axis=-1)

    def coupling(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        matrix = np.zeros(t.shape + (2, 2), dtype=complex)
        matrix[..., 0, 1] = self.coupling_strength
        matrix[..., 1, 0] = self.coupling_strength
        return matrix


class TunnelingGenerator(BlockGenerator):
    """Memory-qubit pair with the qubit level decaying at rate gamma."""

    hermitian = False

    def __init__(self, omega_m: float, omega_q: float, g_m: float, gamma: float):
        self.energies = np.array([omega_m, omega_q], dtype=float)
        self.g_m = float(g_m)
        self.gamma = float(gamma)
        self.basis = (BasisLabel(1, 0, 0), BasisLabel(0, 1, 0))

    def frame_energies(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.energies, t.shape + (2,)).copy()

    def frame_phases(self, t) -> np.ndarray:
        return np.asarray(t, dtype=float)[..., np.newaxis] * self.energies

    def coupling(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        matrix = np.zeros(t.shape + (2, 2), dtype=complex)
        matrix[..., 0, 1] = self.g_m
        matrix[..., 1, 0] = self.g_m
        matrix[..., 1, 1] = -0.5j * self.gamma
        return matrix
