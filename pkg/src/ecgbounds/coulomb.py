"""One-body Coulomb kernels and Hamiltonian matrix elements.

A Coulomb channel is a 3-vector u = k^T r - d built from a coupling
vector k (r_i - r_j for electron pairs, r_p for an electron) and a centre d
(a nuclear position, or zero). Every kernel here uses the Gaussian
representation 1/|u| = 2/sqrt(pi) int_0^inf exp(-t^2 |u|^2) dt and the
substitution g = t^2 / (1 + t^2 a), which maps the t axis onto [0, 1/a].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import matkit
from .ecg import ALL, EcgBasisFunction, PairProduct, laplacian_polynomial, pair_product, quadratic_moment
from .errors import DegenerateChannel, DimensionMismatch, IndexOutOfRange
from .matkit import PairCoupling, build_pair_coupling
from .quadrature import QuadratureSpec, erf, integrate
from .system import SystemDefinition

_SQRT_PI = math.sqrt(math.pi)
_SERIES_CUTOFF = 1e-5


@dataclass(frozen=True, eq=False)
class CoulombChannel:
    coupling: PairCoupling
    center: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.coupling.vector

    @property
    def is_nuclear(self) -> bool:
        return self.coupling.kind == "single"


def pair_channel(i: int, j: int, n: int) -> CoulombChannel:
    return CoulombChannel(build_pair_coupling("pair", (i, j), n), np.zeros(3))


def nuclear_channel(p: int, position, n: int) -> CoulombChannel:
    return CoulombChannel(build_pair_coupling("single", (p,), n), np.asarray(position, dtype=float).reshape(3))


def channel_geometry(pp: PairProduct, ch: CoulombChannel) -> tuple[float, np.ndarray]:
    """Width a = k^T A^-1 k and mean offset x = k^T mean - d of a channel."""
    if ch.coupling.n != pp.n:
        raise DimensionMismatch(f"channel built for n={ch.coupling.n}, pair has n={pp.n}")
    k = ch.vector
    a = float(k @ pp.solve(k))
    if not (a > 0.0 and math.isfinite(a)):
        raise DegenerateChannel(f"channel width {a} is not positive")
    return a, k @ pp.mean - ch.center


def shifted_linear_term(pp: PairProduct, center) -> np.ndarray:
    """Linear term e after moving the origin to ``center`` (uniform translation)."""
    return pp.e - pp.A @ np.tile(np.asarray(center, dtype=float), (pp.n, 1))


def erf_ratio(delta, b):
    """erf(sqrt(delta / b)) / sqrt(delta), finite as delta -> 0 or b -> 0."""
    delta = np.maximum(np.asarray(delta, dtype=float), 0.0)
    b = np.maximum(np.asarray(b, dtype=float), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        z2 = np.where(b > 0, delta / np.where(b > 0, b, 1.0), np.inf)
        series = 2.0 / (_SQRT_PI * np.sqrt(b)) * (1.0 - z2 / 3.0 + z2 * z2 / 10.0)
        direct = np.where(np.isinf(z2), 1.0, erf(np.sqrt(z2))) / np.sqrt(delta)
    out = np.where(z2 < _SERIES_CUTOFF ** 2, series, direct)
    return out if out.ndim else float(out)


def inv_r(pp: PairProduct, ch: CoulombChannel) -> float:
    """Integral of 1/|u| times the pair product."""
    a, x = channel_geometry(pp, ch)
    return pp.overlap * erf_ratio(float(x @ x), a)


def kinetic(pp: PairProduct, ket: EcgBasisFunction) -> float:
    """Kinetic energy element <bra| -1/2 laplacian |ket> (unit masses)."""
    lap = laplacian_polynomial(ket, ALL)
    return -0.5 * (quadratic_moment(pp, lap.U, lap.p) + lap.c0 * pp.overlap)


def coulomb_quadratic(pp: PairProduct, ch: CoulombChannel, U, p, c0: float,
                      spec: QuadratureSpec | None = None) -> float:
    """Integral of [(r-p)^T (U (x) I_3) (r-p) + c0] / |u| times the pair product."""
    U = np.asarray(U, dtype=float)
    if U.shape != (pp.n, pp.n):
        raise DimensionMismatch(f"polynomial matrix must be {pp.n}x{pp.n}")
    p = np.asarray(p, dtype=float).reshape(pp.n, 3)
    a, x = channel_geometry(pp, ch)
    beta = float(x @ x)
    w = pp.solve(ch.vector)
    d0 = pp.mean - p
    Uw = U @ w
    wUw = float(w @ Uw)
    # the moment under the g-dependent Gaussian is quadratic in g
    q0 = 1.5 * float(np.sum(U * pp.inverse)) + matkit.kron_quadratic(U, d0) + c0
    q1 = -1.5 * wUw - 2.0 * float(x @ (d0.T @ Uw))
    q2 = wUw * beta

    def integrand(z):
        g = z / a
        return np.exp(-g * beta) * (q0 + g * (q1 + g * q2)) / (2.0 * np.sqrt(a * z))

    spec = _sqrt_spec(spec)
    res = integrate(integrand, (0.0, 1.0), spec)
    return pp.overlap * 2.0 / _SQRT_PI * res.value


def _sqrt_spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    spec = spec or QuadratureSpec()
    if spec.transform != "sqrt-endpoint":
        spec = QuadratureSpec(spec.rel_tol, spec.abs_tol, spec.max_subdivisions, "sqrt-endpoint")
    return spec


def electron_channels(system: SystemDefinition):
    """(charge, channel) pairs for every electron-nucleus attraction."""
    n = system.n_electrons
    return [(Z, nuclear_channel(i, R, n)) for Z, R in system.nuclei for i in range(n)]


def h_components(system: SystemDefinition, bra: EcgBasisFunction, ket: EcgBasisFunction) -> dict[str, float]:
    n = system.n_electrons
    if bra.n != n or ket.n != n:
        raise DimensionMismatch(f"system has {n} electrons, basis functions have {bra.n}/{ket.n}")
    pp = pair_product(bra, ket)
    vee = sum(inv_r(pp, pair_channel(i, j, n)) for i, j in combinations(range(n), 2))
    vne = -sum(Z * inv_r(pp, ch) for Z, ch in electron_channels(system))
    return {
        "overlap": pp.overlap,
        "kinetic": kinetic(pp, ket),
        "electron_repulsion": float(vee),
        "nuclear_attraction": float(vne),
        "nuclear_repulsion": system.nuclear_repulsion * pp.overlap,
    }


def assemble_h_element(system: SystemDefinition, bra: EcgBasisFunction, ket: EcgBasisFunction) -> float:
    c = h_components(system, bra, ket)
    return c["kinetic"] + c["electron_repulsion"] + c["nuclear_attraction"] + c["nuclear_repulsion"]


def check_index(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexOutOfRange(f"particle {i} outside 0..{n - 1}")
