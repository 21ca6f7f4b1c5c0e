"""Memory-qubit pair under tunneling measurement: decay rates and readout error of bare vs eigenstates."""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

import config
from ..dynamics.generators import TunnelingGenerator
from ..dynamics.integrator import StateVector, propagate_generator
from ..errors import ExceptionalPointError, InvalidArgumentError, PoleError, ValidityWarning
from ..units import to_angular

logger = logging.getLogger("rezqu.measurement")

INITIAL_STATES = ('bare', 'eigen')


@dataclass(frozen=True)
class MeasurementParams:
    f_m: float  # GHz
    f_q: float  # GHz
    g_m: float  # GHz
    gamma: float  # 1/ns
    t_meas: float  # ns

    def __post_init__(self):
        for name in ('f_m', 'f_q', 'g_m', 'gamma', 't_meas'):
            value = getattr(self, name)
            if isinstance(value, bool) or not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be a finite number, got {value!r}")
        if self.f_m <= 0 or self.f_q <= 0:
            raise InvalidArgumentError("frequencies must be positive")
        if self.g_m < 0:
            raise InvalidArgumentError(f"g_m must be non-negative, got {self.g_m}")
        if self.gamma <= 0:
            raise InvalidArgumentError(f"tunneling rate must be positive, got {self.gamma}")
        if self.t_meas < 0:
            raise InvalidArgumentError(f"t_meas must be non-negative, got {self.t_meas}")

    @property
    def omega_m(self) -> float:
        return to_angular(self.f_m)

    @property
    def omega_q(self) -> float:
        return to_angular(self.f_q)

    @property
    def coupling(self) -> float:
        return to_angular(self.g_m)

    @property
    def delta_m(self) -> float:
        return self.omega_m - self.omega_q

    @property
    def weak_coupling(self) -> bool:
        """g_m well below both the detuning and the tunneling rate."""
        limit = config.WEAK_COUPLING_FRACTION * min(abs(self.delta_m), self.gamma)
        return self.coupling <= limit

    @property
    def saturated(self) -> bool:
        """Long enough for the closed-form long-time errors to apply."""
        return self.gamma * self.t_meas >= config.LONG_TIME_GAMMAS

    def hamiltonian(self, gamma: Optional[float] = None) -> np.ndarray:
        """Non-Hermitian H over (|10>, |01>); the qubit level decays at rate gamma."""
        gamma = self.gamma if gamma is None else gamma
        return np.array([
            [self.omega_m, self.coupling],
            [self.coupling, self.omega_q - 0.5j * gamma],
        ], dtype=complex)

    def generator(self) -> TunnelingGenerator:
        return TunnelingGenerator(self.omega_m, self.omega_q, self.coupling, self.gamma)


@dataclass(frozen=True)
class DecayEigensystem:
    energies: np.ndarray  # (memory-like, qubit-like), complex rad/ns
    right: np.ndarray  # columns in the same order
    left: np.ndarray
    condition: float

    @property
    def gamma_m(self) -> float:
        return float(-2.0 * self.energies[0].imag)

    @property
    def gamma_q(self) -> float:
        return float(-2.0 * self.energies[1].imag)

    def coefficients(self, psi0: np.ndarray) -> np.ndarray:
        """Expansion of psi0 over the right eigenvectors."""
        numerators = self.left.conj().T @ psi0
        norms = np.einsum('ij,ij->j', self.left.conj(), self.right)
        return numerators / norms


def weak_coupling_rates(mp: MeasurementParams) -> Tuple[float, float]:
    """Leading-order (Gamma_m, Gamma_q) for g_m small against the detuning and the rate."""
    gamma_m = mp.coupling ** 2 * mp.gamma / (mp.delta_m ** 2 + (mp.gamma / 2.0) ** 2)
    return gamma_m, mp.gamma - gamma_m


def splitting_condition(mp: MeasurementParams) -> float:
    """(coupling scale / eigenvalue splitting)^2; diverges where the eigenvectors coalesce."""
    half_detuning = 0.5 * (mp.delta_m + 0.5j * mp.gamma)
    splitting = 2.0 * abs(np.sqrt(half_detuning ** 2 + mp.coupling ** 2))
    scale = max(mp.coupling, abs(half_detuning))
    if splitting == 0.0:
        return math.inf
    return (scale / splitting) ** 2


def decay_eigensystem(mp: MeasurementParams) -> DecayEigensystem:
    """Exact complex eigenpairs, memory-like state first."""
    hamiltonian = mp.hamiltonian()
    shift = mp.omega_m
    energies, left, right = linalg.eig(hamiltonian - shift * np.eye(2), left=True, right=True)
    energies = energies + shift
    condition = max(float(np.linalg.cond(right)), splitting_condition(mp))
    if not math.isfinite(condition) or condition > config.EXCEPTIONAL_POINT_CONDITION:
        raise ExceptionalPointError(
            f"eigenvectors coalesce (condition number {condition:.3e})", condition=condition)
    memory_weight = np.abs(right[0]) ** 2 / np.sum(np.abs(right) ** 2, axis=0)
    order = np.argsort(-memory_weight, kind='stable')
    return DecayEigensystem(
        energies=energies[order],
        right=right[:, order],
        left=left[:, order],
        condition=condition,
    )


def initial_state(mp: MeasurementParams, initial: str) -> np.ndarray:
    """Bare qubit excitation, or the qubit-like eigenstate before tunneling is switched on."""
    if initial == 'bare':
        return np.array([0.0, 1.0], dtype=complex)
    if initial == 'eigen':
        _, vectors = linalg.eigh(mp.hamiltonian(gamma=0.0))
        index = int(np.argmax(np.abs(vectors[1])))
        vector = vectors[:, index]
        return vector * (abs(vector[1]) / vector[1])
    raise InvalidArgumentError(f"initial must be one of {INITIAL_STATES}, got {initial!r}")


def exact_survival(mp: MeasurementParams, initial: str, times) -> np.ndarray:
    """State at the given times from the matrix exponential; rows are (alpha, beta)."""
    psi0 = initial_state(mp, initial)
    hamiltonian = mp.hamiltonian()
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return np.array([linalg.expm(-1j * hamiltonian * t) @ psi0 for t in times])


def decay_trajectories(mp: MeasurementParams, initial: str, spacing: float = config.TRAJECTORY_SAMPLE_NS,
                       dt: float = config.DEFAULT_DT_NS) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled (times, |alpha|^2, |beta|^2) from the step integrator."""
    generator = mp.generator()
    psi0 = StateVector(initial_state(mp, initial), generator.basis)
    if mp.t_meas == 0:
        populations = np.abs(psi0.amplitudes) ** 2
        return np.zeros(1), populations[:1], populations[1:]
    trajectory = propagate_generator(generator, psi0, (0.0, mp.t_meas), dt).sampled(spacing)
    populations = trajectory.populations()
    return trajectory.times, populations[:, 0], populations[:, 1]


def survival_error(mp: MeasurementParams, initial: str = 'bare', method: str = 'integrator',
                   dt: float = config.DEFAULT_DT_NS) -> float:
    """Probability that the state has not tunneled by t_meas, i.e. <psi|psi>."""
    if method == 'exact':
        state = exact_survival(mp, initial, mp.t_meas)[0]
    elif method == 'integrator':
        generator = mp.generator()
        psi0 = StateVector(initial_state(mp, initial), generator.basis)
        if mp.t_meas == 0:
            return psi0.norm() ** 2
        state = propagate_generator(generator, psi0, (0.0, mp.t_meas), dt, keep_trajectory=False).amplitudes[-1]
    else:
        raise InvalidArgumentError(f"method must be 'integrator' or 'exact', got {method!r}")
    return float(np.vdot(state, state).real)


def long_time_error(mp: MeasurementParams, initial: str, t: Optional[float] = None) -> float:
    """Surviving memory-like component |C_m|^2 exp(-Gamma_m t)."""
    t = mp.t_meas if t is None else t
    system = decay_eigensystem(mp)
    coefficient = system.coefficients(initial_state(mp, initial))[0]
    weight = abs(coefficient) ** 2 * float(np.vdot(system.right[:, 0], system.right[:, 0]).real)
    return weight * math.exp(-system.gamma_m * t)


def err_bare_closed(mp: MeasurementParams, t: Optional[float] = None) -> float:
    """exp(-Gamma_m t) g_m^2 / (Delta_m^2 + (Gamma/2)^2)."""
    t = mp.t_meas if t is None else t
    gamma_m, _ = weak_coupling_rates(mp)
    return math.exp(-gamma_m * t) * mp.coupling ** 2 / (mp.delta_m ** 2 + (mp.gamma / 2.0) ** 2)


def ratio_closed(mp: MeasurementParams) -> float:
    """Eigen-to-bare long-time error ratio, Gamma^2 / (4 Delta_m^2)."""
    if mp.delta_m == 0:
        raise PoleError("memory and qubit degenerate; ratio undefined")
    return mp.gamma ** 2 / (4.0 * mp.delta_m ** 2)


@dataclass(frozen=True)
class DecayReport:
    gamma_m: float
    gamma_q: float
    gamma_m_weak: float
    gamma_q_weak: float
    err_bare: float
    err_eigen: float
    err_bare_closed: float
    ratio_closed: float
    weak_coupling: bool
    times: np.ndarray
    alpha2_bare: np.ndarray
    beta2_bare: np.ndarray
    alpha2_eigen: np.ndarray
    beta2_eigen: np.ndarray

    @property
    def ratio(self) -> float:
        return self.err_eigen / self.err_bare if self.err_bare > 0 else math.inf

    def header(self) -> List[str]:
        return ['t_ns', 'alpha2_bare', 'beta2_bare', 'alpha2_eigen', 'beta2_eigen']

    def rows(self) -> List[Tuple[float, ...]]:
        return [
            (float(t), float(a_b), float(b_b), float(a_e), float(b_e))
            for t, a_b, b_b, a_e, b_e in zip(self.times, self.alpha2_bare, self.beta2_bare,
                                             self.alpha2_eigen, self.beta2_eigen)
        ]

    def summary(self) -> dict:
        return {
            'gamma_m_per_ns': self.gamma_m,
            'gamma_q_per_ns': self.gamma_q,
            'gamma_m_weak_per_ns': self.gamma_m_weak,
            'err_bare': self.err_bare,
            'err_eigen': self.err_eigen,
            'ratio': self.ratio,
            'err_bare_closed': self.err_bare_closed,
            'ratio_closed': self.ratio_closed,
        }


def decay_report(mp: MeasurementParams, spacing: float = config.TRAJECTORY_SAMPLE_NS,
                 dt: float = config.DEFAULT_DT_NS) -> DecayReport:
    if not mp.weak_coupling:
        logger.warning("[Measurement] coupling not weak against detuning and rate; closed forms approximate")
        warnings.warn("weak-coupling conditions violated", ValidityWarning, stacklevel=2)
    system = decay_eigensystem(mp)
    gamma_m_weak, gamma_q_weak = weak_coupling_rates(mp)
    times, alpha2_bare, beta2_bare = decay_trajectories(mp, 'bare', spacing, dt)
    _, alpha2_eigen, beta2_eigen = decay_trajectories(mp, 'eigen', spacing, dt)
    err_bare = float(alpha2_bare[-1] + beta2_bare[-1])
    err_eigen = float(alpha2_eigen[-1] + beta2_eigen[-1])
    logger.info("[Measurement] err_bare %.3e, err_eigen %.3e", err_bare, err_eigen)
    return DecayReport(
        gamma_m=system.gamma_m,
        gamma_q=system.gamma_q,
        gamma_m_weak=gamma_m_weak,
        gamma_q_weak=gamma_q_weak,
        err_bare=err_bare,
        err_eigen=err_eigen,
        err_bare_closed=err_bare_closed(mp),
        ratio_closed=ratio_closed(mp),
        weak_coupling=mp.weak_coupling,
        times=times,
        alpha2_bare=alpha2_bare,
        beta2_bare=beta2_bare,
        alpha2_eigen=alpha2_eigen,
        beta2_eigen=beta2_eigen,
    )
