"""Independent reference values for the analytic kernels.

A pair product is, up to its overlap S, the Gaussian density
N(mean, C (x) I_3). Integrals of S * f therefore equal S * E[f(r)], which
Monte Carlo estimates directly. Single-channel integrals reduce to a
one-dimensional radial integral against the non-central Maxwell density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coulomb import CoulombChannel, channel_geometry
from .ecg import PairProduct
from .errors import DegenerateMarginal, DimensionMismatch, NonFiniteSample
from .quadrature import QuadratureSpec, integrate

METHODS = ("mc", "radial", "marginal-pair")
BLOCK = 500_000


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    std_error: float
    samples: int
    method: str


def sample_positions(pp: PairProduct, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` configurations of shape (count, n, 3) from the pair density."""
    L = np.linalg.cholesky(pp.covariance)
    z = rng.standard_normal((count, pp.n, 3))
    return pp.mean + np.einsum("ij,sja->sia", L, z)


def mc_expectation(pp: PairProduct, f: Callable[[np.ndarray], np.ndarray], samples: int,
                   seed: int, block: int = BLOCK) -> OracleEstimate:
    """Monte Carlo estimate of the integral of f times the pair product.

    ``f`` maps positions (m, n, 3) to m values. Blocks use spawned seed
    sequences so the result does not depend on ``block`` scheduling order.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    nblocks = -(-samples // block)
    streams = np.random.SeedSequence(seed).spawn(nblocks)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    # shift by a pilot mean to keep the variance sum well conditioned
    pilot = None
    for stream in streams:
        m = min(block, remaining)
        remaining -= m
        vals = np.asarray(f(sample_positions(pp, m, np.random.default_rng(stream))), dtype=float)
        if vals.shape != (m,):
            raise DimensionMismatch(f"integrand returned shape {vals.shape}, expected ({m},)")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("integrand produced a non-finite value")
        if pilot is None:
            pilot = float(np.mean(vals))
        dv = vals - pilot
        total += float(np.sum(dv))
        total_sq += float(np.sum(dv * dv))
    mean_shift = total / samples
    var = max(total_sq / samples - mean_shift ** 2, 0.0) * samples / (samples - 1)
    S = pp.overlap
    return OracleEstimate(S * (pilot + mean_shift), S * math.sqrt(var / samples), samples, "mc")


@dataclass(frozen=True)
class MarginalPair:
    covariance: np.ndarray   # 2 x 2, full covariance is covariance (x) I_3
    means: np.ndarray        # (2, 3)


def marginal_pair_density(pp: PairProduct, ch1: CoulombChannel, ch2: CoulombChannel) -> MarginalPair:
    """Joint Gaussian law of the two channel vectors under the pair density."""
    k = np.stack([ch1.vector, ch2.vector])
    cov = k @ pp.covariance @ k.T
    det = float(np.linalg.det(cov))
    if not det > 1e-14 * float(cov[0, 0] * cov[1, 1]):
        raise DegenerateMarginal("channel vectors are linearly dependent")
    means = k @ pp.mean - np.stack([ch1.center, ch2.center])
    return MarginalPair(cov, means)


def mc_pair_expectation(pp: PairProduct, ch1: CoulombChannel, ch2: CoulombChannel,
                        g: Callable[[np.ndarray, np.ndarray], np.ndarray], samples: int,
                        seed: int, block: int = BLOCK) -> OracleEstimate:
    """Monte Carlo over the 6-dimensional marginal of two channels."""
    marg = marginal_pair_density(pp, ch1, ch2)
    L = np.linalg.cholesky(marg.covariance)
    nblocks = -(-samples // block)
    streams = np.random.SeedSequence(seed).spawn(nblocks)
    vals_all = []
    remaining = samples
    for stream in streams:
        m = min(block, remaining)
        remaining -= m
        z = np.random.default_rng(stream).standard_normal((m, 2, 3))
        uv = marg.means + np.einsum("ij,sja->sia", L, z)
        vals = np.asarray(g(uv[:, 0], uv[:, 1]), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("integrand produced a non-finite value")
        vals_all.append((float(np.sum(vals)), float(np.sum(vals * vals))))
    s1 = math.fsum(v[0] for v in vals_all)
    s2 = math.fsum(v[1] for v in vals_all)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    S = pp.overlap
    return OracleEstimate(S * mean, S * math.sqrt(var / samples), samples, "marginal-pair")


def radial_expectation(pp: PairProduct, ch: CoulombChannel, g: Callable[[np.ndarray], np.ndarray],
                       spec: QuadratureSpec | None = None) -> OracleEstimate:
    """Integral of g(|u|) times the pair product through the radial density of |u|.

    u is isotropic Gaussian with mean offset mu and per-axis variance a/2, so
    |u| follows the non-central Maxwell law.
    """
    a, x = channel_geometry(pp, ch)
    var = 0.5 * a
    sigma = math.sqrt(var)
    mu = float(np.linalg.norm(x))
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def density(rho):
        rho = np.asarray(rho, dtype=float)
        if mu == 0.0:
            shape = 2.0 * rho / var * np.exp(-rho * rho / (2.0 * var))
        else:
            shape = np.exp(-(rho - mu) ** 2 / (2.0 * var)) * (-np.expm1(-2.0 * rho * mu / var)) / mu
        return norm * rho * shape

    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=0.0, max_subdivisions=400)
    upper = mu + 40.0 * sigma
    parts = [(0.0, mu), (mu, upper)] if mu > 0 else [(0.0, upper)]
    total = 0.0
    err = 0.0
    for lo, hi in parts:
        res = integrate(lambda r: density(r) * g(r), (lo, hi), spec)
        total += res.value
        err += res.error_estimate
    S = pp.overlap
    return OracleEstimate(S * total, S * err, 0, "radial")
