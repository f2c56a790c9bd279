"""Generalised eigenproblem, energy variance and lower bounds.

Also houses the competitive-selection optimiser for the nonlinear basis
parameters.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cholesky as lapack_cholesky, eigh, solve_triangular

from . import matkit
from .batch import hs_matrices, stack_basis, symmetric_column
from .ecg import EcgBasisFunction, permute_electrons
from .errors import (BetaNotAboveE, NegativeVariance, NotPositiveDefinite, OverlapNotPositiveDefinite,
                     UnsupportedElectronCount, ZeroVector)
from .hsq import assemble_h2_element
from .quadrature import QuadratureSpec
from .system import SystemDefinition

log = logging.getLogger(__name__)

VARIANCE_SLACK = 1e-9


@dataclass
class SpectralMatrices:
    H: np.ndarray
    S: np.ndarray
    H2: np.ndarray | None = None
    ritz_values: np.ndarray = field(init=False)
    ground_vector: np.ndarray = field(init=False)

    def __post_init__(self):
        values, vectors = solve_generalized(self.H, self.S)
        self.ritz_values = values
        self.ground_vector = vectors[:, 0]


def overlap_cholesky(S) -> np.ndarray:
    try:
        return matkit.cholesky(S)
    except NotPositiveDefinite as exc:
        raise OverlapNotPositiveDefinite(
            f"overlap matrix is not positive definite at basis row {exc.pivot}", pivot=exc.pivot) from exc


def solve_generalized(H, S) -> tuple[np.ndarray, np.ndarray]:
    """Ritz values (ascending) and S-normalised vectors of H c = E S c."""
    H = np.asarray(H, dtype=float)
    S = np.asarray(S, dtype=float)
    L = overlap_cholesky(S)
    tmp = solve_triangular(L, H, lower=True)
    reduced = solve_triangular(L, tmp.T, lower=True)
    reduced = 0.5 * (reduced + reduced.T)
    values, y = np.linalg.eigh(reduced)
    vectors = solve_triangular(L.T, y, lower=False)
    # fix the sign so the largest component is positive
    idx = np.argmax(np.abs(vectors), axis=0)
    vectors *= np.sign(vectors[idx, np.arange(vectors.shape[1])])
    return values, vectors


def rayleigh_and_variance(m: SpectralMatrices, c) -> tuple[float, float]:
    if m.H2 is None:
        raise ValueError("squared-Hamiltonian matrix is required for the variance")
    c = np.asarray(c, dtype=float)
    if not np.any(c):
        raise ZeroVector("coefficient vector is zero")
    norm = float(c @ m.S @ c)
    E = float(c @ m.H @ c) / norm
    var = float(c @ m.H2 @ c) / norm - E * E
    return E, var


def _checked_variance(sigma2: float) -> float:
    if sigma2 < 0:
        if sigma2 < -VARIANCE_SLACK:
            raise NegativeVariance(f"variance {sigma2:.3e} is negative beyond tolerance")
        warnings.warn(f"variance {sigma2:.3e} clamped to zero", RuntimeWarning, stacklevel=3)
        return 0.0
    return sigma2


def weinstein(E: float, sigma2: float) -> float:
    return E - math.sqrt(_checked_variance(sigma2))


def temple(E: float, sigma2: float, beta: float) -> float:
    sigma2 = _checked_variance(sigma2)
    if not beta > E:
        raise BetaNotAboveE(f"beta = {beta} is not above E = {E}")
    return E - sigma2 / (beta - E)


def stevenson(E: float, sigma2: float, alpha: float) -> float:
    sigma2 = _checked_variance(sigma2)
    return alpha - math.sqrt((alpha - E) ** 2 + sigma2)


@dataclass
class BoundsReport:
    energy_upper: float
    variance: float
    beta: float | None
    beta_source: str
    weinstein_lb: float
    temple_lb: float | None
    temple_valid: bool
    weinstein_caveat: bool = True
    stevenson_lb: float | None = None
    stevenson_alpha: float | None = None

    @property
    def interval(self) -> tuple[float | None, float]:
        return (self.temple_lb if self.temple_valid else None, self.energy_upper)


def compute_bounds(m: SpectralMatrices, beta: float | None = None,
                   alpha: float | None = None) -> BoundsReport:
    """Bounds for the Ritz ground state.

    Without an explicit ``beta`` the second Ritz value is used, which is a
    heuristic: it bounds the exact second level from above, not below.
    """
    E, sigma2 = rayleigh_and_variance(m, m.ground_vector)
    sigma2 = _checked_variance(sigma2)
    if beta is None:
        if len(m.ritz_values) > 1:
            beta, source = float(m.ritz_values[1]), "ritz2"
        else:
            beta, source = None, "unavailable"
    else:
        beta, source = float(beta), "explicit"
    t_lb, t_ok = None, False
    if beta is not None and beta > E:
        t_lb, t_ok = temple(E, sigma2, beta), True
    s_lb = stevenson(E, sigma2, alpha) if alpha is not None else None
    return BoundsReport(E, sigma2, beta, source, weinstein(E, sigma2), t_lb, t_ok,
                        True, s_lb, alpha)


def h2_matrix(system: SystemDefinition, basis: Sequence[EcgBasisFunction], parity: int | None = 1,
              spec: QuadratureSpec | None = None, threads: int = 1) -> np.ndarray:
    """Squared-Hamiltonian matrix over the (symmetrised) basis."""
    if system.n_electrons != 2:
        raise UnsupportedElectronCount("squared-Hamiltonian matrix needs two electrons")
    N = len(basis)
    swapped = [permute_electrons(f, (1, 0)) for f in basis]

    def element(kl):
        k, l = kl
        value = assemble_h2_element(system, basis[k], basis[l], spec)
        if parity is not None:
            value += parity * assemble_h2_element(system, basis[k], swapped[l], spec)
        return value

    pairs = [(k, l) for l in range(N) for k in range(l + 1)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(element, pairs))
    else:
        values = [element(kl) for kl in pairs]
    H2 = np.zeros((N, N))
    for (k, l), v in zip(pairs, values):
        H2[k, l] = H2[l, k] = v
    return H2


def build_spectral_matrices(system: SystemDefinition, basis: Sequence[EcgBasisFunction],
                            parity: int | None = 1, with_h2: bool = True,
                            spec: QuadratureSpec | None = None, threads: int = 1) -> SpectralMatrices:
    if parity is not None and system.n_electrons != 2:
        parity = None
    H, S = hs_matrices(system, basis, parity)
    H2 = h2_matrix(system, basis, parity, spec, threads) if with_h2 else None
    return SpectralMatrices(H, S, H2)


# stochastic optimisation ----------------------------------------------------

@dataclass(frozen=True)
class BasisSampler:
    """Random correlated Gaussians.

    Diagonal exponents multiply r_i^2 and pair exponents multiply r_ij^2;
    both are drawn log-uniformly. Shifts are uniform in a cube when
    ``floating`` is set.
    """

    n: int
    exponent_range: tuple[float, float] = (0.05, 60.0)
    correlation_range: tuple[float, float] = (0.01, 3.0)
    shift_range: float = 0.0
    floating: bool = False

    def __post_init__(self):
        for lo, hi in (self.exponent_range, self.correlation_range):
            if not 0 < lo <= hi:
                raise ValueError("exponent ranges must be positive and ordered")

    def draw(self, rng: np.random.Generator) -> EcgBasisFunction:
        n = self.n
        diag = np.exp(rng.uniform(*np.log(self.exponent_range), size=n))
        A = np.diag(diag)
        if n > 1:
            pair = np.exp(rng.uniform(*np.log(self.correlation_range), size=n * (n - 1) // 2))
            for w, (i, j) in zip(pair, ((i, j) for i in range(n) for j in range(i + 1, n))):
                A[i, i] += w
                A[j, j] += w
                A[i, j] -= w
                A[j, i] -= w
        s = np.zeros((n, 3))
        if self.floating and self.shift_range > 0:
            s = rng.uniform(-self.shift_range, self.shift_range, size=(n, 3))
        return EcgBasisFunction(A, s)


@dataclass(frozen=True)
class OptimizationBudget:
    sweeps: int
    trials: int

    def __post_init__(self):
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")
        if self.trials < 1:
            raise ValueError("need at least one trial per slot")


@dataclass
class OptimizationResult:
    basis: list[EcgBasisFunction]
    energy: float
    trace: list[float]            # ground value after each sweep, trace[0] is the start
    rejected: int = 0


# normalised-overlap pivot below which a candidate counts as linearly dependent
DEPENDENCE_TOL = 1e-10


class _Workspace:
    """Normalised H and S of the current basis with cheap slot replacement."""

    def __init__(self, system, basis, parity):
        self.system = system
        self.parity = parity
        self.basis = list(basis)
        if self.basis:
            H, S = hs_matrices(system, self.basis, parity)
            self.norms = np.diag(S).copy()
            d = 1.0 / np.sqrt(self.norms)
            self.H = H * np.outer(d, d)
            self.S = S * np.outer(d, d)
        else:
            self.norms = np.zeros(0)
            self.H = np.zeros((0, 0))
            self.S = np.zeros((0, 0))

    def trial_matrices(self, candidate, slot):
        """Normalised (H, S, norms) with ``candidate`` at ``slot`` (slot == N appends)."""
        N = len(self.basis)
        others = self.basis[:slot] + [candidate] + self.basis[slot + 1:]
        A_b, s_b = stack_basis(others)
        h, s = symmetric_column(self.system, A_b, s_b, candidate, self.parity)
        own = s[slot]
        if not (own > 0 and np.all(np.isfinite(h))):
            return None
        norms = self.norms.copy() if slot < N else np.append(self.norms, 0.0)
        norms[slot] = own
        scale = 1.0 / np.sqrt(norms * own)
        h = h * scale
        s = s * scale
        if slot < N:
            H = self.H.copy()
            S = self.S.copy()
        else:
            H = np.zeros((N + 1, N + 1))
            S = np.zeros((N + 1, N + 1))
            H[:N, :N] = self.H
            S[:N, :N] = self.S
        H[slot, :] = h
        H[:, slot] = h
        S[slot, :] = s
        S[:, slot] = s
        return H, S, norms

    def accept(self, candidate, slot, mats):
        if slot < len(self.basis):
            self.basis[slot] = candidate
        else:
            self.basis.append(candidate)
        self.H, self.S, self.norms = mats


def ground_value(H, S) -> float | None:
    """Lowest Ritz value, or None when S is numerically singular."""
    try:
        L = lapack_cholesky(S, lower=True, check_finite=False)
    except (LinAlgError, ValueError):
        return None
    if np.min(np.diag(L)) ** 2 < DEPENDENCE_TOL:
        return None
    tmp = solve_triangular(L, H, lower=True, check_finite=False)
    red = solve_triangular(L, tmp.T, lower=True, check_finite=False)
    red = 0.5 * (red + red.T)
    try:
        return float(eigh(red, eigvals_only=True, subset_by_index=[0, 0], check_finite=False)[0])
    except (LinAlgError, ValueError):
        return None


def _best_candidate(ws: _Workspace, candidates, slot, threads: int):
    def evaluate(cand):
        mats = ws.trial_matrices(cand, slot)
        if mats is None:
            return None, None
        E = ground_value(mats[0], mats[1])
        return E, mats

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(evaluate, candidates))
    else:
        results = [evaluate(c) for c in candidates]
    best = None
    rejected = 0
    for idx, (E, mats) in enumerate(results):
        if E is None or not math.isfinite(E):
            rejected += 1
            continue
        if best is None or E < best[0]:
            best = (E, idx, mats)
    return best, rejected


def _draw_candidates(sampler: BasisSampler, rng, trials):
    out = []
    while len(out) < trials:
        try:
            out.append(sampler.draw(rng))
        except NotPositiveDefinite:
            continue
    return out


def stochastic_optimize(system: SystemDefinition, basis: Sequence[EcgBasisFunction],
                        budget: OptimizationBudget, seed: int, sampler: BasisSampler | None = None,
                        parity: int | None = 1, threads: int = 1,
                        callback: Callable[[int, float], None] | None = None) -> OptimizationResult:
    """Competitive selection: each slot is replaced by the best of ``trials`` random draws.

    A replacement is kept only if it lowers the Ritz ground value, so the
    sweep trace never increases.
    """
    if system.n_electrons != 2:
        parity = None
    sampler = sampler or BasisSampler(system.n_electrons)
    rng = np.random.default_rng(seed)
    ws = _Workspace(system, basis, parity)
    E = ground_value(ws.H, ws.S) if ws.basis else math.inf
    if E is None:
        raise OverlapNotPositiveDefinite("starting basis is linearly dependent")
    trace = [E]
    rejected = 0
    for sweep in range(budget.sweeps):
        for slot in range(len(ws.basis)):
            candidates = _draw_candidates(sampler, rng, budget.trials)
            best, rej = _best_candidate(ws, candidates, slot, threads)
            rejected += rej
            if best is not None and best[0] < E:
                E = best[0]
                ws.accept(candidates[best[1]], slot, best[2])
        assert E <= trace[-1], "ground value increased during a sweep"
        trace.append(E)
        if callback:
            callback(sweep + 1, E)
    return OptimizationResult(ws.basis, E, trace, rejected)


def grow_basis(system: SystemDefinition, size: int, trials: int, seed: int,
               sampler: BasisSampler | None = None, parity: int | None = 1,
               start: Sequence[EcgBasisFunction] = (), threads: int = 1) -> OptimizationResult:
    """Add functions one at a time, each the best of ``trials`` random draws."""
    if system.n_electrons != 2:
        parity = None
    sampler = sampler or BasisSampler(system.n_electrons)
    rng = np.random.default_rng(seed)
    ws = _Workspace(system, start, parity)
    E = ground_value(ws.H, ws.S) if ws.basis else math.inf
    trace = [E] if ws.basis else []
    rejected = 0
    attempts = 0
    while len(ws.basis) < size:
        candidates = _draw_candidates(sampler, rng, trials)
        best, rej = _best_candidate(ws, candidates, len(ws.basis), threads)
        rejected += rej
        attempts += 1
        if best is None:
            if attempts > 100 * size:
                raise OverlapNotPositiveDefinite("could not find independent candidates")
            continue
        E = best[0]
        ws.accept(candidates[best[1]], len(ws.basis), best[2])
        trace.append(E)
    return OptimizationResult(ws.basis, E, trace, rejected)
