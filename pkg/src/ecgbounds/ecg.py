"""Floating explicitly correlated Gaussians and their pair products.

A basis function is

    phi(r) = exp(-(r - s)^T (A (x) I_3) (r - s))

with ``A`` an n x n symmetric positive definite matrix and ``s`` the shift.
Positions and shifts are held as ``(n, 3)`` arrays, so the Kronecker
product with I_3 reduces to ``A @ r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_solve

from . import matkit
from .errors import DimensionMismatch, IndexOutOfRange, InvalidPermutation, UnsupportedElectronCount

ALL = "all"


def _as_shift(s, n: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape == (3 * n,):
        s = s.reshape(n, 3)
    if s.shape != (n, 3):
        raise DimensionMismatch(f"shift must have shape ({n}, 3) or ({3 * n},), got {s.shape}")
    return s


@dataclass(frozen=True, eq=False)
class EcgBasisFunction:
    A: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        A = 0.5 * (A + A.T)
        matkit.cholesky(A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "s", _as_shift(self.s, A.shape[0]))
        self.A.setflags(write=False)
        self.s.setflags(write=False)

    @classmethod
    def centered(cls, A) -> "EcgBasisFunction":
        A = np.asarray(A, dtype=float)
        return cls(A, np.zeros((A.shape[0], 3)))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def floating(self) -> bool:
        return bool(np.any(self.s != 0.0))

    def __call__(self, r) -> np.ndarray:
        """Evaluate at positions of shape (..., n, 3)."""
        d = np.asarray(r, dtype=float) - self.s
        return np.exp(-np.einsum("ij,...ia,...ja->...", self.A, d, d))

    def __repr__(self):
        return f"EcgBasisFunction(A={self.A.tolist()}, s={self.s.tolist()})"


@dataclass(frozen=True, eq=False)
class PairProduct:
    """Gaussian obtained from multiplying a bra and a ket basis function.

    ``A`` is the summed matrix, ``e`` the combined linear term and
    ``overlap`` the integral of the product over all space.
    """

    A: np.ndarray
    e: np.ndarray
    eta: float
    gamma: float
    overlap: float
    chol: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def solve(self, v) -> np.ndarray:
        return cho_solve((self.chol, True), v)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = self.solve(np.eye(self.n))
        return 0.5 * (inv + inv.T)

    @cached_property
    def mean(self) -> np.ndarray:
        return self.solve(self.e)

    @property
    def covariance(self) -> np.ndarray:
        """n x n factor C of the normalised product density N(mean, C (x) I_3)."""
        return 0.5 * self.inverse

    @cached_property
    def det(self) -> float:
        return float(np.prod(np.diag(self.chol)) ** 2)


def pair_product(bra: EcgBasisFunction, ket: EcgBasisFunction) -> PairProduct:
    if bra.n != ket.n:
        raise DimensionMismatch(f"bra has n={bra.n}, ket has n={ket.n}")
    A = bra.A + ket.A
    L = matkit.cholesky(A)
    e = bra.A @ bra.s + ket.A @ ket.s
    eta = float(np.sum(bra.s * (bra.A @ bra.s)) + np.sum(ket.s * (ket.A @ ket.s)))
    mean = cho_solve((L, True), e)
    gamma = float(np.sum(e * mean)) - eta
    n = A.shape[0]
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    overlap = math.exp(gamma + 1.5 * n * math.log(math.pi) - 1.5 * logdet)
    pp = PairProduct(A, e, eta, gamma, overlap, L)
    pp.__dict__["mean"] = mean
    return pp


def overlap(pp: PairProduct) -> float:
    return pp.overlap


@dataclass(frozen=True)
class GaussianMoments:
    mean: np.ndarray          # (n, 3)
    cov_factor: np.ndarray    # n x n, full covariance is cov_factor (x) I_3


def moments(pp: PairProduct) -> GaussianMoments:
    return GaussianMoments(pp.mean.copy(), pp.covariance.copy())


def _check_poly(pp: PairProduct, U, p) -> tuple[np.ndarray, np.ndarray]:
    U = np.asarray(U, dtype=float)
    if U.shape != (pp.n, pp.n):
        raise DimensionMismatch(f"polynomial matrix must be {pp.n}x{pp.n}, got {U.shape}")
    return U, _as_shift(p, pp.n)


def quadratic_moment(pp: PairProduct, U, p) -> float:
    """Integral of (r-p)^T (U (x) I_3) (r-p) times the pair product."""
    U, p = _check_poly(pp, U, p)
    d = pp.mean - p
    C = pp.covariance
    return pp.overlap * (3.0 * float(np.sum(U * C.T)) + matkit.kron_quadratic(U, d))


def quartic_moment(pp: PairProduct, U, p, W, q) -> float:
    """Integral of the product of two quadratics times the pair product.

    Isserlis' theorem for a Gaussian with covariance C (x) I_3.
    """
    U, p = _check_poly(pp, U, p)
    W, q = _check_poly(pp, W, q)
    C = pp.covariance
    a = pp.mean - p
    b = pp.mean - q
    tr_uc = float(np.trace(U @ C))
    tr_wc = float(np.trace(W @ C))
    aua = matkit.kron_quadratic(U, a)
    bwb = matkit.kron_quadratic(W, b)
    value = (9.0 * tr_uc * tr_wc
             + 6.0 * float(np.trace(U @ C @ W @ C))
             + 4.0 * matkit.kron_quadratic(U @ C @ W, a, b)
             + 3.0 * tr_uc * bwb
             + 3.0 * tr_wc * aua
             + aua * bwb)
    return pp.overlap * value


@dataclass(frozen=True)
class LaplacianPoly:
    """Laplacian of a Gaussian as a polynomial prefactor.

    For the selected particle(s), laplacian(phi) = [(r-p)^T (U (x) I_3) (r-p) + c0] phi.
    """

    U: np.ndarray
    p: np.ndarray
    c0: float

    def __call__(self, r) -> np.ndarray:
        d = np.asarray(r, dtype=float) - self.p
        return np.einsum("ij,...ia,...ja->...", self.U, d, d) + self.c0


def laplacian_polynomial(f: EcgBasisFunction, i=ALL) -> LaplacianPoly:
    if isinstance(i, str):
        if i != ALL:
            raise ValueError(f"particle selector must be an index or {ALL!r}")
        U = 4.0 * f.A @ f.A
        c0 = -6.0 * float(np.trace(f.A))
    else:
        if not 0 <= i < f.n:
            raise IndexOutOfRange(f"particle {i} outside 0..{f.n - 1}")
        col = f.A[:, i]
        U = 4.0 * np.outer(col, col)
        c0 = -6.0 * float(f.A[i, i])
    return LaplacianPoly(U, f.s.copy(), c0)


def _check_permutation(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise InvalidPermutation(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def permute_electrons(f: EcgBasisFunction, perm: Sequence[int]) -> EcgBasisFunction:
    """Relabel electrons: slot i of the result takes old electron perm[i]."""
    perm = _check_permutation(perm, f.n)
    idx = np.array(perm)
    return EcgBasisFunction(f.A[np.ix_(idx, idx)], f.s[idx])


def permutation_parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def symmetrized_element(kernel: Callable[[EcgBasisFunction, EcgBasisFunction], float],
                        bra: EcgBasisFunction, ket: EcgBasisFunction, parity: int) -> float:
    """kernel(bra, ket) + parity * kernel(bra, swapped ket), two electrons only."""
    if bra.n != 2 or ket.n != 2:
        raise UnsupportedElectronCount("symmetrisation is implemented for two electrons")
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    return kernel(bra, ket) + parity * kernel(bra, permute_electrons(ket, (1, 0)))
