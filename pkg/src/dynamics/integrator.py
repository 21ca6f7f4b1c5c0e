"""Fixed-step fourth-order propagation in the co-moving frame."""

import logging
import math
from dataclasses import dataclass, field
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np

import config
from ..errors import InvalidArgumentError, StepSizeError
from ..hamiltonian.basis import BasisLabel, block_labels
from ..hamiltonian.system import DeviceParams, frame_offsets
from .generators import BlockGenerator, LandauZenerGenerator, MqbBlockGenerator
from .pulses import PulseShape

logger = logging.getLogger("rezqu.dynamics")


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over an ordered basis at one instant."""
    amplitudes: np.ndarray
    basis: Tuple[Hashable, ...]
    time: float = 0.0
    frame: str = 'bare'

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (len(self.basis),):
            raise InvalidArgumentError(
                f"{amplitudes.shape[0] if amplitudes.ndim else 0} amplitudes for {len(self.basis)} basis states"
            )
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'basis', tuple(self.basis))

    @classmethod
    def basis_state(cls, label: Hashable, basis: Sequence[Hashable], time: float = 0.0) -> "StateVector":
        amplitudes = np.zeros(len(basis), dtype=complex)
        amplitudes[list(basis).index(label)] = 1.0
        return cls(amplitudes, tuple(basis), time)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, label: Hashable) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def population(self, label: Hashable) -> float:
        return abs(self.amplitude(label)) ** 2

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Trajectory:
    """Bare-frame amplitudes on the integration grid."""
    times: np.ndarray
    amplitudes: np.ndarray  # (n_times, n_basis)
    basis: Tuple[Hashable, ...]
    frame: str = 'bare'

    @property
    def final(self) -> StateVector:
        return self.state(-1)

    def state(self, index: int) -> StateVector:
        return StateVector(self.amplitudes[index], self.basis, float(self.times[index]), self.frame)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def column(self, label: Hashable) -> np.ndarray:
        return self.amplitudes[:, self.basis.index(label)]

    def sampled(self, spacing: float) -> "Trajectory":
        """Rows nearest to a regular grid with the given spacing, endpoints kept."""
        if spacing <= 0:
            return self
        targets = np.arange(self.times[0], self.times[-1], spacing)
        picks = np.unique(np.append(np.searchsorted(self.times, targets), len(self.times) - 1))
        return Trajectory(self.times[picks], self.amplitudes[picks], self.basis, self.frame)

    def header(self) -> List[str]:
        columns = ['t_ns']
        for label in self.basis:
            name = _column_name(label)
            columns += [f're_{name}', f'im_{name}']
        columns += [f'p_{_column_name(label)}' for label in self.basis]
        return columns

    def rows(self) -> List[Tuple[float, ...]]:
        populations = self.populations()
        rows = []
        for i, t in enumerate(self.times):
            row = [float(t)]
            for amplitude in self.amplitudes[i]:
                row += [float(amplitude.real), float(amplitude.imag)]
            row += [float(p) for p in populations[i]]
            rows.append(tuple(row))
        return rows


def _column_name(label: Hashable) -> str:
    if isinstance(label, BasisLabel):
        return f"{label.n_m}{label.n_q}{label.n_b}"
    return str(label)


@dataclass(frozen=True)
class Propagator:
    """Bare-frame evolution operator of one block between two times."""
    matrix: np.ndarray
    basis: Tuple[Hashable, ...]
    t_initial: float
    t_final: float

    def unitarity_defect(self) -> float:
        identity = np.eye(len(self.basis))
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - identity)))

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector

    def element(self, bra: np.ndarray, ket: np.ndarray) -> complex:
        """<bra|U|ket> for block-coordinate vectors."""
        return complex(np.vdot(bra, self.matrix @ ket))

    def then(self, later: "Propagator") -> "Propagator":
        """Composition: this evolution followed by `later`."""
        if not math.isclose(later.t_initial, self.t_final, abs_tol=1e-12):
            raise InvalidArgumentError("propagators are not contiguous in time")
        return Propagator(later.matrix @ self.matrix, self.basis, self.t_initial, later.t_final)


# Grid and step construction

def time_grid(t_start: float, t_stop: float, dt: float, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Uniform-per-segment grid with every interior breakpoint as a node."""
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt!r}")
    if t_stop < t_start:
        raise InvalidArgumentError(f"t_span must be ordered, got ({t_start}, {t_stop})")
    if t_stop == t_start:
        return np.array([t_start])
    knots = [t_start] + sorted(b for b in set(breakpoints) if t_start < b < t_stop) + [t_stop]
    pieces = []
    for left, right in zip(knots[:-1], knots[1:]):
        count = max(1, int(math.ceil((right - left) / dt - 1e-9)))
        pieces.append(np.linspace(left, right, count + 1)[:-1])
    pieces.append(np.array([t_stop]))
    return np.concatenate(pieces)


def rk4_step_matrices(generator: BlockGenerator, grid: np.ndarray) -> np.ndarray:
    """Classical RK4 one-step maps P_n for y' = -i K(t) y, batched over the grid."""
    widths = np.diff(grid)[:, np.newaxis, np.newaxis]
    nodes = -1j * generator.comoving_generator(grid)
    middles = -1j * generator.comoving_generator(grid[:-1] + 0.5 * np.diff(grid))
    identity = np.eye(generator.dimension)
    m1, m3 = nodes[:-1], nodes[1:]
    k2 = middles @ (identity + 0.5 * widths * m1)
    k3 = middles @ (identity + 0.5 * widths * k2)
    k4 = m3 @ (identity + widths * k3)
    return identity + widths / 6.0 * (m1 + 2.0 * k2 + 2.0 * k3 + k4)


def chain_product(steps: np.ndarray) -> np.ndarray:
    """P_{n-1} ... P_1 P_0 by pairwise reduction."""
    dimension = steps.shape[-1]
    if steps.shape[0] == 0:
        return np.eye(dimension, dtype=complex)
    matrices = steps
    while matrices.shape[0] > 1:
        if matrices.shape[0] % 2:
            matrices = np.concatenate([matrices, np.eye(dimension, dtype=complex)[np.newaxis]], axis=0)
        matrices = matrices[1::2] @ matrices[0::2]
    return matrices[0]


def prefix_products(steps: np.ndarray) -> np.ndarray:
    """Cumulative products C_k = P_{k-1} ... P_0 with C_0 = I."""
    dimension = steps.shape[-1]
    cumulative = np.concatenate([np.eye(dimension, dtype=complex)[np.newaxis], steps], axis=0)
    offset = 1
    while offset < cumulative.shape[0]:
        cumulative[offset:] = cumulative[offset:] @ cumulative[:-offset]
        offset *= 2
    return cumulative


# Frame changes

def _frame_factor(generator: BlockGenerator, t: float, sign: float) -> np.ndarray:
    return np.exp(sign * 1j * generator.frame_phases(np.asarray(float(t))))


def evolve_block(generator: BlockGenerator, amplitudes: np.ndarray, t_span: Tuple[float, float],
                 dt: float = config.DEFAULT_DT_NS, keep_trajectory: bool = True) -> Trajectory:
    """Integrate one closed block; input and output amplitudes are bare-frame."""
    t_start, t_stop = t_span
    grid = time_grid(t_start, t_stop, dt, generator.breakpoints)
    comoving = _frame_factor(generator, t_start, +1.0) * np.asarray(amplitudes, dtype=complex)
    steps = rk4_step_matrices(generator, grid)
    if keep_trajectory:
        states = prefix_products(steps) @ comoving
        times = grid
    else:
        states = (chain_product(steps) @ comoving)[np.newaxis]
        times = grid[-1:]
    bare = np.exp(-1j * generator.frame_phases(times)) * states
    return Trajectory(times, bare, tuple(generator.basis))


def block_propagator(generator: BlockGenerator, t_span: Tuple[float, float],
                     dt: float = config.DEFAULT_DT_NS) -> Propagator:
    t_start, t_stop = t_span
    grid = time_grid(t_start, t_stop, dt, generator.breakpoints)
    interaction = chain_product(rk4_step_matrices(generator, grid))
    matrix = (_frame_factor(generator, t_stop, -1.0)[:, np.newaxis] * interaction
              * _frame_factor(generator, t_start, +1.0)[np.newaxis, :])
    return Propagator(matrix, tuple(generator.basis), float(t_start), float(t_stop))


def _check_norm(initial: float, final: float, dt: float):
    drift = abs(final - initial)
    if drift > config.NORM_TOLERANCE:
        raise StepSizeError(f"norm drifted by {drift:.3e} with dt={dt:g} ns; refine the step", drift=drift, dt=dt)


def propagate_generator(generator: BlockGenerator, psi0: StateVector, t_span: Tuple[float, float],
                        dt: float = config.DEFAULT_DT_NS, refine: bool = True,
                        keep_trajectory: bool = True) -> Trajectory:
    """Propagate a state living entirely in one generator's basis."""
    if tuple(psi0.basis) != tuple(generator.basis):
        raise InvalidArgumentError("initial state basis does not match the generator")
    trajectory = evolve_block(generator, psi0.amplitudes, t_span, dt, keep_trajectory)
    halvings = 0
    while refine:
        finer = evolve_block(generator, psi0.amplitudes, t_span, dt / 2, keep_trajectory)
        change = float(np.linalg.norm(finer.amplitudes[-1] - trajectory.amplitudes[-1]))
        dt /= 2
        trajectory = finer
        halvings += 1
        logger.debug("[Dynamics] dt=%g ns, refinement change %.3e", dt, change)
        if change < config.REFINEMENT_TOLERANCE:
            break
        if halvings >= config.MAX_DT_HALVINGS:
            raise StepSizeError(f"no convergence after {halvings} halvings (change {change:.3e})",
                                drift=change, dt=dt)
    if generator.hermitian:
        _check_norm(psi0.norm(), float(np.linalg.norm(trajectory.amplitudes[-1])), dt)
    return trajectory


def propagate(params: DeviceParams, pulse: PulseShape, psi0: StateVector,
              t_span: Optional[Tuple[float, float]] = None, dt: float = config.DEFAULT_DT_NS,
              refine: bool = True) -> Trajectory:
    """Trajectory of an mqb state under a qubit pulse; blocks evolve independently."""
    if t_span is None:
        t_span = (psi0.time, pulse.t_end)
    if not math.isclose(abs(psi0.norm()), 1.0, abs_tol=1e-8):
        raise InvalidArgumentError(f"initial state must be normalized, norm={psi0.norm():.12g}")
    position = {label: i for i, label in enumerate(psi0.basis)}
    blocks = sorted({label.n_exc for label in psi0.basis})
    pieces = {}
    times = None
    for n_exc in blocks:
        labels = block_labels(n_exc)
        if any(label not in position for label in labels):
            raise InvalidArgumentError(f"basis must contain the whole {n_exc}-excitation block")
        indices = [position[label] for label in labels]
        block_state = StateVector(psi0.amplitudes[indices], tuple(labels), psi0.time)
        generator = MqbBlockGenerator(params, pulse, n_exc)
        if block_state.norm() == 0.0:
            trajectory = evolve_block(generator, block_state.amplitudes, t_span, dt)
        else:
            normalized = StateVector(block_state.amplitudes / block_state.norm(), block_state.basis, psi0.time)
            trajectory = propagate_generator(generator, normalized, t_span, dt, refine)
            trajectory = Trajectory(trajectory.times, trajectory.amplitudes * block_state.norm(), trajectory.basis)
        pieces[n_exc] = (indices, trajectory)
        times = trajectory.times if times is None or len(trajectory.times) > len(times) else times

    amplitudes = np.zeros((len(times), len(psi0.basis)), dtype=complex)
    for indices, trajectory in pieces.values():
        if len(trajectory.times) != len(times):
            trajectory = _resample(trajectory, times)
        amplitudes[:, indices] = trajectory.amplitudes
    return Trajectory(times, amplitudes, psi0.basis)


def _resample(trajectory: Trajectory, times: np.ndarray) -> Trajectory:
    picks = np.clip(np.searchsorted(trajectory.times, times), 0, len(trajectory.times) - 1)
    return Trajectory(times, trajectory.amplitudes[picks], trajectory.basis)


def propagator_over(params: DeviceParams, pulse: PulseShape, block: int,
                    t_span: Optional[Tuple[float, float]] = None,
                    dt: float = config.DEFAULT_DT_NS) -> Propagator:
    """Bare-frame propagator of one excitation block across the pulse."""
    if t_span is None:
        t_span = (0.0, pulse.t_end)
    propagator = block_propagator(MqbBlockGenerator(params, pulse, block), t_span, dt)
    defect = propagator.unitarity_defect()
    if defect > config.UNITARITY_TOLERANCE:
        raise StepSizeError(f"propagator unitarity defect {defect:.3e}; refine dt={dt:g} ns", drift=defect, dt=dt)
    return propagator


def comoving_phases(state: StateVector, pulse: PulseShape, params: DeviceParams) -> np.ndarray:
    """Frame phases of each basis label at the state's time."""
    offsets, counts = frame_offsets(params, state.basis)
    return offsets * state.time + counts * float(pulse.phase(state.time))


def to_comoving(state: StateVector, pulse: PulseShape, params: DeviceParams) -> StateVector:
    """Factor out exp(-i theta): alpha e^{i w_m t}, beta e^{i int w_q}, gamma e^{i w_b t}."""
    factor = np.exp(1j * comoving_phases(state, pulse, params))
    return StateVector(state.amplitudes * factor, state.basis, state.time, 'comoving')


def from_comoving(state: StateVector, pulse: PulseShape, params: DeviceParams) -> StateVector:
    factor = np.exp(-1j * comoving_phases(state, pulse, params))
    return StateVector(state.amplitudes * factor, state.basis, state.time, 'bare')


def landau_zener_transition(coupling: float, sweep_rate: float, half_window: float = 20.0,
                            dt: float = config.DEFAULT_DT_NS) -> float:
    """Population left on the other level after a linear sweep through resonance."""
    generator = LandauZenerGenerator(coupling, sweep_rate)
    psi0 = StateVector.basis_state('moving', generator.basis, -half_window)
    trajectory = propagate_generator(generator, psi0, (-half_window, half_window), dt, refine=False,
                                     keep_trajectory=False)
    return float(abs(trajectory.amplitudes[-1, 1]) ** 2)
