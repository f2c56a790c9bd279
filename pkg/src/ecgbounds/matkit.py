"""Small dense linear algebra used by the Gaussian integrals.

Everything here works on the n x n correlation matrices (n = number of
electrons). The Kronecker factor with the 3x3 identity is never formed;
callers keep particle positions as ``(n, 3)`` arrays instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve

from .errors import DimensionMismatch, IndexOutOfRange, NotPositiveDefinite

# relative pivot floor for accepting a matrix as SPD
PIVOT_FLOOR = 1e-13


def _square(m, name="matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def cholesky(m) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Pivots (squared diagonal of L) must exceed ``PIVOT_FLOOR`` times the
    largest diagonal entry, otherwise :class:`NotPositiveDefinite` is raised
    with the index of the first bad pivot.
    """
    m = _square(m)
    n = m.shape[0]
    scale = np.max(np.abs(np.diag(m))) if n else 0.0
    if not np.allclose(m, m.T, rtol=1e-12, atol=1e-14 * max(scale, 1.0)):
        raise NotPositiveDefinite("matrix is not symmetric")
    floor = PIVOT_FLOOR * scale
    L = np.zeros_like(m)
    for j in range(n):
        pivot = m[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > floor:
            raise NotPositiveDefinite(f"Cholesky pivot {j} is {pivot:.3e}", pivot=j)
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (m[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def is_spd(m) -> bool:
    try:
        cholesky(m)
    except NotPositiveDefinite:
        return False
    return True


def det_spd(m) -> float:
    L = cholesky(m)
    return float(np.prod(np.diag(L)) ** 2)


def logdet_spd(m) -> float:
    L = cholesky(m)
    return float(2.0 * np.sum(np.log(np.diag(L))))


def inv_spd(m) -> np.ndarray:
    L = cholesky(m)
    inv = cho_solve((L, True), np.eye(L.shape[0]))
    return 0.5 * (inv + inv.T)


@dataclass(frozen=True)
class PairCoupling:
    """Rank-one coupling matrix J = k k^T picking out one distance.

    ``kind == "pair"`` with indices (i, j) selects r_i - r_j;
    ``kind == "single"`` with indices (p,) selects r_p. Indices are 0-based.
    """

    kind: str
    indices: tuple[int, ...]
    n: int

    @property
    def vector(self) -> np.ndarray:
        k = np.zeros(self.n)
        if self.kind == "pair":
            i, j = self.indices
            k[i], k[j] = 1.0, -1.0
        else:
            k[self.indices[0]] = 1.0
        return k

    def dense(self) -> np.ndarray:
        k = self.vector
        return np.outer(k, k)

    @property
    def trace(self) -> float:
        return 2.0 if self.kind == "pair" else 1.0


def build_pair_coupling(kind: str, indices: Sequence[int], n: int) -> PairCoupling:
    if kind in ("inter", "pair"):
        kind = "pair"
        if len(indices) != 2:
            raise ValueError("pair coupling needs two indices")
        if indices[0] == indices[1]:
            raise ValueError("pair coupling needs two distinct particles")
    elif kind in ("intra", "single"):
        kind = "single"
        if len(indices) != 1:
            raise ValueError("single-particle coupling needs one index")
    else:
        raise ValueError(f"unknown coupling kind {kind!r}")
    for idx in indices:
        if not 0 <= idx < n:
            raise IndexOutOfRange(f"particle index {idx} outside 0..{n - 1}")
    return PairCoupling(kind, tuple(int(i) for i in indices), int(n))


def _dense(b) -> np.ndarray:
    return b.dense() if isinstance(b, PairCoupling) else np.asarray(b, dtype=float)


def _check_rank_one(b: np.ndarray) -> None:
    sv = np.linalg.svd(b, compute_uv=False)
    if sv.size > 1 and sv[1] > 1e-10 * max(sv[0], 1e-300):
        raise ValueError("update matrix is not rank one")


def det_rank1_update(g, a: float, b) -> float:
    """det(G + a B) for rank-one B, as det(G) (1 + a Tr(B G^-1))."""
    g = _square(g, "G")
    b = _dense(b)
    if b.shape != g.shape:
        raise DimensionMismatch("G and B differ in shape")
    _check_rank_one(b)
    ginv_b = np.linalg.solve(g, b)
    return float(np.linalg.det(g) * (1.0 + a * np.trace(ginv_b)))


def inv_rank1_update(a, b) -> np.ndarray:
    """(A + B)^-1 by Sherman-Morrison, B rank one."""
    a = _square(a, "A")
    b = _dense(b)
    if b.shape != a.shape:
        raise DimensionMismatch("A and B differ in shape")
    _check_rank_one(b)
    ainv = np.linalg.inv(a)
    denom = 1.0 + np.trace(b @ ainv)
    return ainv - ainv @ b @ ainv / denom


def det_two_rank1(g, h1, h2) -> float:
    """det(G + H1 + H2) for two rank-one updates H1, H2."""
    g = _square(g, "G")
    h1, h2 = _dense(h1), _dense(h2)
    if h1.shape != g.shape or h2.shape != g.shape:
        raise DimensionMismatch("G, H1, H2 differ in shape")
    _check_rank_one(h1)
    _check_rank_one(h2)
    ginv = np.linalg.inv(g)
    t1 = np.trace(h1 @ ginv)
    t2 = np.trace(h2 @ ginv)
    t12 = np.trace(h1 @ ginv @ h2 @ ginv)
    return float(np.linalg.det(g) * (1.0 + t1 + t2 + t1 * t2 - t12))


def trace_product(ms: Sequence) -> float:
    if not ms:
        raise ValueError("empty product")
    dense = [_dense(m) for m in ms]
    for left, right in zip(dense, dense[1:]):
        if left.shape[1] != right.shape[0]:
            raise DimensionMismatch(f"cannot multiply {left.shape} by {right.shape}")
    prod = reduce(np.matmul, dense)
    if prod.shape[0] != prod.shape[1]:
        raise DimensionMismatch("product is not square")
    return float(np.trace(prod))


def kron_quadratic(m, x, y=None) -> float:
    """x^T (M (x) I_3) y with x, y stored as (n, 3) arrays."""
    y = x if y is None else y
    return float(np.einsum("ij,ia,ja->", m, x, y))
