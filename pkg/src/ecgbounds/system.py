"""Clamped-nuclei molecular system description."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class SystemDefinition:
    charges: np.ndarray      # (N,)
    positions: np.ndarray    # (N, 3) in bohr
    n_electrons: int

    def __post_init__(self):
        charges = np.atleast_1d(np.asarray(self.charges, dtype=float))
        positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        if charges.shape[0] != positions.shape[0]:
            raise DimensionMismatch("one position is needed per nuclear charge")
        if self.n_electrons < 1:
            raise ValueError("need at least one electron")
        for i, j in combinations(range(len(charges)), 2):
            if np.allclose(positions[i], positions[j], atol=1e-12):
                raise ValueError(f"nuclei {i} and {j} coincide")
        object.__setattr__(self, "charges", charges)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "n_electrons", int(self.n_electrons))

    @classmethod
    def atom(cls, charge: float, n_electrons: int) -> "SystemDefinition":
        return cls(np.array([charge]), np.zeros((1, 3)), n_electrons)

    @property
    def nuclei(self):
        return list(zip(self.charges, self.positions))

    @property
    def nuclear_repulsion(self) -> float:
        total = 0.0
        for i, j in combinations(range(len(self.charges)), 2):
            total += self.charges[i] * self.charges[j] / np.linalg.norm(self.positions[i] - self.positions[j])
        return float(total)


HELIUM = SystemDefinition.atom(2.0, 2)
HYDROGEN = SystemDefinition.atom(1.0, 1)
