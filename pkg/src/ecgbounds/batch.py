"""Vectorised overlap and Hamiltonian rows.

Same formulas as :mod:`ecgbounds.coulomb`, evaluated for one ket against a
stack of bras at once. The stochastic optimiser lives on this path; the
per-pair kernels remain the reference it is tested against.
"""
from __future__ import annotations

import math
from itertools import combinations
from typing import Sequence

import numpy as np

from .coulomb import erf_ratio
from .ecg import EcgBasisFunction, permute_electrons
from .system import SystemDefinition


def stack_basis(basis: Sequence[EcgBasisFunction]) -> tuple[np.ndarray, np.ndarray]:
    return np.stack([f.A for f in basis]), np.stack([f.s for f in basis])


def symmetry_images(ket: EcgBasisFunction, parity: int | None) -> list[tuple[EcgBasisFunction, int]]:
    """Permuted copies of ``ket`` with their signs (identity first)."""
    if parity is None or ket.n == 1:
        return [(ket, 1)]
    if ket.n != 2:
        raise ValueError("symmetrisation is implemented for two electrons")
    return [(ket, 1), (permute_electrons(ket, (1, 0)), parity)]


def hs_column(system: SystemDefinition, A_bras: np.ndarray, s_bras: np.ndarray,
              ket: EcgBasisFunction) -> tuple[np.ndarray, np.ndarray]:
    """<bra_k|H|ket> and <bra_k|ket> for every bra in the stack."""
    n = ket.n
    A = A_bras + ket.A
    inv = np.linalg.inv(A)
    inv = 0.5 * (inv + np.swapaxes(inv, -1, -2))
    det = np.linalg.det(A)
    e = A_bras @ s_bras + ket.A @ ket.s
    eta = np.einsum("kia,kia->k", s_bras, A_bras @ s_bras) + float(np.sum(ket.s * (ket.A @ ket.s)))
    m = inv @ e
    gamma = np.einsum("kia,kia->k", e, m) - eta
    S = np.exp(gamma) * math.pi ** (1.5 * n) * det ** -1.5

    U = 4.0 * ket.A @ ket.A
    d = m - ket.s
    quad = 1.5 * np.einsum("ij,kji->k", U, inv) + np.einsum("ij,kia,kja->k", U, d, d)
    kin = -0.5 * (quad - 6.0 * np.trace(ket.A)) * S

    pot = np.full_like(S, system.nuclear_repulsion)
    for i, j in combinations(range(n), 2):
        a = inv[:, i, i] + inv[:, j, j] - 2.0 * inv[:, i, j]
        x = m[:, i] - m[:, j]
        pot += erf_ratio(np.einsum("ka,ka->k", x, x), a)
    for Z, R in system.nuclei:
        for i in range(n):
            x = m[:, i] - R
            pot -= Z * erf_ratio(np.einsum("ka,ka->k", x, x), inv[:, i, i])
    return kin + pot * S, S


def symmetric_column(system: SystemDefinition, A_bras, s_bras, ket: EcgBasisFunction,
                     parity: int | None) -> tuple[np.ndarray, np.ndarray]:
    H = np.zeros(A_bras.shape[0])
    S = np.zeros(A_bras.shape[0])
    for image, sign in symmetry_images(ket, parity):
        h, s = hs_column(system, A_bras, s_bras, image)
        H += sign * h
        S += sign * s
    return H, S


def hs_matrices(system: SystemDefinition, basis: Sequence[EcgBasisFunction],
                parity: int | None = 1) -> tuple[np.ndarray, np.ndarray]:
    """Full Hamiltonian and overlap matrices, symmetrised over electron swaps."""
    A_b, s_b = stack_basis(basis)
    N = len(basis)
    H = np.zeros((N, N))
    S = np.zeros((N, N))
    for l, ket in enumerate(basis):
        h, s = symmetric_column(system, A_b[: l + 1], s_b[: l + 1], ket, parity)
        H[: l + 1, l] = h
        S[: l + 1, l] = s
    iu = np.triu_indices(N, 1)
    H[(iu[1], iu[0])] = H[iu]
    S[(iu[1], iu[0])] = S[iu]
    return H, S
