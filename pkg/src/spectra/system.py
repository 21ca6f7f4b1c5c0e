"""Block diagonalization and dressed-state labeling."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

import config
from ..errors import InvalidArgumentError, LabelingError
from ..hamiltonian.basis import BasisLabel
from ..hamiltonian.system import DeviceParams, HamiltonianMatrix, assemble_hamiltonian


@dataclass(frozen=True)
class StateLabel:
    """Assignment of one eigenvector to its dominant bare state."""
    index: int
    overlap: float  # |<bare|eigen>|^2


@dataclass(frozen=True)
class EigenSystem:
    """Labeled eigenpairs of one excitation block."""
    eigenvalues: np.ndarray  # ascending, rad/ns
    eigenvectors: np.ndarray  # columns, block-local coordinates
    basis: Tuple[BasisLabel, ...]
    indices: np.ndarray  # positions of the block inside the full basis
    labels: Dict[BasisLabel, StateLabel] = field(default_factory=dict)

    @property
    def n_exc(self) -> int:
        return self.basis[0].n_exc

    def energy(self, label: BasisLabel) -> float:
        return float(self.eigenvalues[self.labels[label].index])

    def vector(self, label: BasisLabel) -> np.ndarray:
        """Dressed state dominated by `label`, in block coordinates."""
        return self.eigenvectors[:, self.labels[label].index]

    def embedded(self, label: BasisLabel, dimension: int) -> np.ndarray:
        """Dressed state as a vector over the full basis."""
        full = np.zeros(dimension, dtype=complex)
        full[self.indices] = self.vector(label)
        return full

    def overlap(self, label: BasisLabel) -> float:
        return self.labels[label].overlap


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column real positive."""
    vectors = np.array(vectors, dtype=complex)
    lead = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[lead, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)[np.newaxis, :]


def label_eigenvectors(vectors: np.ndarray, basis: Sequence[BasisLabel],
                       threshold: float = config.LABEL_OVERLAP_THRESHOLD,
                       required: Optional[Iterable[BasisLabel]] = None) -> Dict[BasisLabel, StateLabel]:
    """Map each bare label to the eigenvector it dominates.

    With `required`, only those labels are assigned and mixing elsewhere in the block is ignored.
    """
    weights = np.abs(vectors) ** 2  # weights[bare, eigen]
    if required is not None:
        return _label_required(weights, tuple(basis), required, threshold)
    labels = {}
    for eigen_index in range(weights.shape[1]):
        column = weights[:, eigen_index]
        order = np.argsort(column)[::-1]
        best = int(order[0])
        if column[best] <= threshold + config.LABEL_ROUNDOFF:
            second = int(order[1]) if len(order) > 1 else best
            raise LabelingError(
                f"eigenvector {eigen_index} has no dominant bare state "
                f"({basis[best]}: {column[best]:.3f}, {basis[second]}: {column[second]:.3f})",
                pair=(basis[best], basis[second]),
                overlap=float(column[best]),
            )
        label = basis[best]
        if label in labels:
            other = labels[label].index
            raise LabelingError(
                f"{label} dominates eigenvectors {other} and {eigen_index}",
                pair=(label, label),
                overlap=float(column[best]),
            )
        labels[label] = StateLabel(index=eigen_index, overlap=float(column[best]))
    return labels


def _label_required(weights: np.ndarray, basis: Tuple[BasisLabel, ...], required: Iterable[BasisLabel],
                    threshold: float) -> Dict[BasisLabel, StateLabel]:
    labels = {}
    for label in required:
        if label not in basis:
            continue
        row = weights[basis.index(label)]
        eigen_index = int(np.argmax(row))
        overlap = float(row[eigen_index])
        if overlap <= threshold + config.LABEL_ROUNDOFF:
            column = weights[:, eigen_index].copy()
            column[basis.index(label)] = -1.0
            rival = basis[int(np.argmax(column))] if len(basis) > 1 else label
            raise LabelingError(f"{label} has no dominant eigenvector (best overlap {overlap:.3f})",
                                pair=(label, rival), overlap=overlap)
        labels[label] = StateLabel(index=eigen_index, overlap=overlap)
    return labels


def diagonalize_block(hamiltonian: HamiltonianMatrix, n_exc: int,
                      required: Optional[Iterable[BasisLabel]] = None) -> EigenSystem:
    """Exact eigenpairs of one excitation block, labeled by dominant bare state."""
    if isinstance(n_exc, bool) or n_exc not in (0, 1, 2):
        raise InvalidArgumentError(f"n_exc must be 0, 1 or 2, got {n_exc!r}")
    indices = hamiltonian.block_indices(n_exc)
    basis = hamiltonian.block_basis(n_exc)
    eigenvalues, eigenvectors = linalg.eigh(hamiltonian.block(n_exc))
    eigenvectors = fix_phases(eigenvectors)
    labels = label_eigenvectors(eigenvectors, basis, required=required)
    return EigenSystem(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        basis=basis,
        indices=indices,
        labels=labels,
    )


def eigensystem_at(params: DeviceParams, omega_q: float, n_exc: int,
                   required: Optional[Iterable[BasisLabel]] = None) -> EigenSystem:
    return diagonalize_block(assemble_hamiltonian(params, omega_q), n_exc, required)
