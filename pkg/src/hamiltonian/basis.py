"""Truncated bare basis of the memory-qubit-bus system."""

import itertools
import re
from dataclasses import dataclass
from typing import List

from ..errors import InvalidArgumentError

MAX_LEVEL = 2
_LABEL_PATTERN = re.compile(r"^\|?([0-2])([0-2])([0-2])>?$")


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Bare product state |n_m n_q n_b>."""
    n_m: int  # memory photons
    n_q: int  # qubit level
    n_b: int  # bus photons

    @property
    def n_exc(self) -> int:
        return self.n_m + self.n_q + self.n_b

    @classmethod
    def parse(cls, text: str) -> "BasisLabel":
        """Parse '101' or '|101>'."""
        match = _LABEL_PATTERN.match(text.strip())
        if match is None:
            raise InvalidArgumentError(f"not a basis label: {text!r}")
        return cls(*(int(group) for group in match.groups()))

    def __str__(self) -> str:
        return f"|{self.n_m}{self.n_q}{self.n_b}>"


def _ordering_key(label: BasisLabel):
    return (label.n_exc, label.n_m, label.n_q, label.n_b)


def enumerate_basis(max_excitation: int = 2) -> List[BasisLabel]:
    """Bare basis ordered by excitation number, then lexicographically."""
    if isinstance(max_excitation, bool) or max_excitation not in (1, 2):
        raise InvalidArgumentError(f"max_excitation must be 1 or 2, got {max_excitation!r}")
    labels = [
        BasisLabel(*levels)
        for levels in itertools.product(range(MAX_LEVEL + 1), repeat=3)
        if sum(levels) <= max_excitation
    ]
    return sorted(labels, key=_ordering_key)


def block_labels(n_exc: int) -> List[BasisLabel]:
    """Labels of one excitation-number block in basis order."""
    if isinstance(n_exc, bool) or n_exc not in (0, 1, 2):
        raise InvalidArgumentError(f"n_exc must be 0, 1 or 2, got {n_exc!r}")
    return [label for label in enumerate_basis(2) if label.n_exc == n_exc]


# Named states used throughout
GROUND = BasisLabel(0, 0, 0)
MEMORY = BasisLabel(1, 0, 0)
QUBIT = BasisLabel(0, 1, 0)
BUS = BasisLabel(0, 0, 1)
MEMORY_BUS = BasisLabel(1, 0, 1)
QUBIT_BUS = BasisLabel(0, 1, 1)
QUBIT_DOUBLE = BasisLabel(0, 2, 0)
