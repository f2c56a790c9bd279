"""Kernels for matrix elements of the squared Hamiltonian (two electrons).

Two Coulomb factors are handled by representing both inverse distances as
Gaussian integrals. After the first one is done analytically the second
becomes an error function of a g-dependent Gaussian, leaving a single
integral over g in [0, 1/a] that the quad engine evaluates. When both
channel offsets vanish the integral collapses to an arcsine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .coulomb import (CoulombChannel, channel_geometry, check_index, coulomb_quadratic, electron_channels,
                      erf_ratio, inv_r, kinetic, nuclear_channel, pair_channel)
from .ecg import (ALL, EcgBasisFunction, PairProduct, laplacian_polynomial, pair_product, quadratic_moment,
                  quartic_moment)
from .errors import DegeneratePair, DimensionMismatch, DomainError, UnsupportedElectronCount
from .matkit import build_pair_coupling, cholesky, inv_spd
from .quadrature import QuadratureSpec, dawson, integrate
from .system import SystemDefinition

_SQRT_PI = math.sqrt(math.pi)
_PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class InvRsqCoefficients:
    width: float      # k^T A^-1 k of the channel
    offset_sq: float  # squared distance between channel mean and centre


def inv_r_squared_coeffs(pp: PairProduct, i: int, j: int) -> InvRsqCoefficients:
    if i == j:
        raise DegeneratePair(f"electron pair ({i}, {j}) has no separation")
    check_index(i, pp.n)
    check_index(j, pp.n)
    a, x = channel_geometry(pp, pair_channel(i, j, pp.n))
    return InvRsqCoefficients(a, float(x @ x))


def dawson_ratio(x: float) -> float:
    """D(x)/x with the removable point at zero handled by its series."""
    if x < 1e-5:
        x2 = x * x
        return 1.0 - 2.0 * x2 / 3.0 + 4.0 * x2 * x2 / 15.0
    return dawson(x) / x


def inv_r_squared_channel(pp: PairProduct, ch: CoulombChannel) -> float:
    """Integral of 1/|u|^2 times the pair product."""
    a, x = channel_geometry(pp, ch)
    beta = float(x @ x)
    return 2.0 * pp.overlap / a * dawson_ratio(math.sqrt(beta / a))


def inv_r_squared(pp: PairProduct, i: int, j: int) -> float:
    inv_r_squared_coeffs(pp, i, j)
    return inv_r_squared_channel(pp, pair_channel(i, j, pp.n))


def _arcsin_ratio(a: float, b: float, c: float) -> float:
    """arcsin(sqrt(c / (a b))) / sqrt(c), including the c -> 0 limit."""
    ab = a * b
    if c < 0 or ab <= 0:
        raise DomainError(f"need a b > 0 and c >= 0, got a b = {ab}, c = {c}")
    if c > ab:
        if c - ab > 1e-12 * ab:
            raise DomainError(f"a b = {ab:.17g} is smaller than c = {c:.17g}")
        c = ab
    z2 = c / ab
    if z2 < 1e-8:
        return (1.0 + z2 / 6.0 + 3.0 * z2 * z2 / 40.0) / math.sqrt(ab)
    return math.asin(math.sqrt(z2)) / math.sqrt(c)


def inv_rij_rpa_zero_shift(A_kl, i: int, j: int, p: int) -> float:
    """Integral of 1/(r_ij r_p) for an unshifted pair product with matrix A_kl."""
    L = cholesky(A_kl)
    n = L.shape[0]
    k_ij = build_pair_coupling("pair", (i, j), n).vector
    k_p = build_pair_coupling("single", (p,), n).vector
    inv = inv_spd(A_kl)
    a = float(k_ij @ inv @ k_ij)
    b = float(k_p @ inv @ k_p)
    c = float(k_ij @ inv @ k_p) ** 2
    det = float(np.prod(np.diag(L)) ** 2)
    return 4.0 / math.pi * math.pi ** (1.5 * n) * det ** -1.5 * _arcsin_ratio(a, b, c)


@dataclass(frozen=True)
class RijRpaCoefficients:
    """Scalars entering the mixed electron-electron / electron-nucleus kernel.

    ``a_ij`` and ``a_pp`` are channel widths, ``c`` the squared cross width,
    ``gamma_a`` the pair exponent after moving the origin to the nucleus.
    ``mu_a`` and ``beta_a`` are squared offsets of the nuclear and pair
    channels, ``epsilon_a`` and ``omega_a`` the linear and quadratic
    coefficients of the g-dependent pair offset.
    """

    a_ij: float
    a_pp: float
    c: float
    gamma_a: float
    beta_a: float
    mu_a: float
    epsilon_a: float
    omega_a: float


def _two_channel_geometry(pp: PairProduct, outer: CoulombChannel, inner: CoulombChannel):
    a1, x1 = channel_geometry(pp, outer)
    a2, x2 = channel_geometry(pp, inner)
    c12 = float(inner.vector @ pp.solve(outer.vector))
    return a1, x1, a2, x2, c12


def rijrpa_coeffs(pp: PairProduct, i: int, j: int, p: int, a_pos) -> RijRpaCoefficients:
    check_index(p, pp.n)
    outer = nuclear_channel(p, a_pos, pp.n)
    inner = pair_channel(i, j, pp.n)
    a1, x1, a2, x2, c12 = _two_channel_geometry(pp, outer, inner)
    # gamma is unchanged by a uniform translation of all coordinates
    return RijRpaCoefficients(
        a_ij=a2, a_pp=a1, c=c12 * c12, gamma_a=pp.gamma,
        beta_a=float(x2 @ x2), mu_a=float(x1 @ x1),
        epsilon_a=2.0 * c12 * float(x1 @ x2), omega_a=c12 * c12 * float(x1 @ x1))


def coulomb_pair(pp: PairProduct, outer: CoulombChannel, inner: CoulombChannel,
                 spec: QuadratureSpec | None = None) -> float:
    """Integral of 1/(|u_outer| |u_inner|) times the pair product."""
    a1, x1, a2, x2, c12 = _two_channel_geometry(pp, outer, inner)
    gap = a1 * a2 - c12 * c12
    if gap < -_PARALLEL_TOL * a1 * a2:
        raise DomainError(f"channel widths violate a b >= c (a b - c = {gap:.3e})")
    ratio = c12 / a1
    if gap <= _PARALLEL_TOL * a1 * a2:
        # u_inner = ratio * u_outer + const; a vanishing const means 1/|u|^2
        const = ratio * outer.center - inner.center
        if float(const @ const) <= 1e-24 * a1:
            return inv_r_squared_channel(pp, outer) / abs(ratio)
    mu = float(x1 @ x1)
    beta = float(x2 @ x2)
    if mu <= 1e-20 * a1 and beta <= 1e-20 * a2:
        return 4.0 / math.pi * pp.overlap * _arcsin_ratio(a1, a2, max(c12 * c12, 0.0))
    lin = c12 * float(x1 @ x2)
    quad = c12 * c12 * mu

    def integrand(z):
        g = z / a1
        width = np.maximum(a2 - g * c12 * c12, 0.0)
        delta = np.maximum(beta - 2.0 * g * lin + g * g * quad, 0.0)
        return np.exp(-mu * g) / np.sqrt(z) * erf_ratio(delta, width)

    spec = spec or QuadratureSpec()
    if spec.transform != "sqrt-endpoint":
        spec = QuadratureSpec(spec.rel_tol, spec.abs_tol, spec.max_subdivisions, "sqrt-endpoint")
    res = integrate(integrand, (0.0, 1.0), spec)
    return pp.overlap / (_SQRT_PI * math.sqrt(a1)) * res.value


def inv_rij_rpa_general(pp: PairProduct, i: int, j: int, p: int, a_pos,
                        spec: QuadratureSpec | None = None) -> float:
    """Integral of 1/(r_ij |r_p - a|) times a general (shifted) pair product."""
    if i == j:
        raise DegeneratePair(f"electron pair ({i}, {j}) has no separation")
    check_index(p, pp.n)
    return coulomb_pair(pp, nuclear_channel(p, a_pos, pp.n), pair_channel(i, j, pp.n), spec)


def inv_ria_rjb_general(pp: PairProduct, i: int, a_pos, j: int, b_pos,
                        spec: QuadratureSpec | None = None) -> float:
    """Integral of 1/(|r_i - a| |r_j - b|) times the pair product."""
    check_index(i, pp.n)
    check_index(j, pp.n)
    return coulomb_pair(pp, nuclear_channel(i, a_pos, pp.n), nuclear_channel(j, b_pos, pp.n), spec)


def del4_cross(pp: PairProduct, bra: EcgBasisFunction, ket: EcgBasisFunction, i=ALL, j=ALL) -> float:
    """Integral of (laplacian_i bra) (laplacian_j ket)."""
    lk = laplacian_polynomial(bra, i)
    ll = laplacian_polynomial(ket, j)
    return (quartic_moment(pp, lk.U, lk.p, ll.U, ll.p)
            + lk.c0 * quadratic_moment(pp, ll.U, ll.p)
            + ll.c0 * quadratic_moment(pp, lk.U, lk.p)
            + lk.c0 * ll.c0 * pp.overlap)


H2_TERMS = (
    "T_T", "T_Vee", "T_Vne", "T_Vnn",
    "Vee_T", "Vee_Vee", "Vee_Vne", "Vee_Vnn",
    "Vne_T", "Vne_Vee", "Vne_Vne", "Vne_Vnn",
    "Vnn_T", "Vnn_Vee", "Vnn_Vne", "Vnn_Vnn",
)


def h2_terms(system: SystemDefinition, bra: EcgBasisFunction, ket: EcgBasisFunction,
             spec: QuadratureSpec | None = None) -> dict[str, float]:
    """The sixteen operator products making up <bra|H H|ket>.

    Key ``X_Y`` is <bra| X Y |ket>, with X acting to the left.
    """
    n = system.n_electrons
    if n != 2:
        raise UnsupportedElectronCount(f"squared-Hamiltonian kernels need 2 electrons, got {n}")
    if bra.n != n or ket.n != n:
        raise DimensionMismatch(f"system has {n} electrons, basis functions have {bra.n}/{ket.n}")
    pp = pair_product(bra, ket)
    S = pp.overlap
    vnn = system.nuclear_repulsion
    lap_bra = laplacian_polynomial(bra, ALL)
    lap_ket = laplacian_polynomial(ket, ALL)
    ee = pair_channel(0, 1, n)
    ne = electron_channels(system)

    def cq(ch, lap):
        return coulomb_quadratic(pp, ch, lap.U, lap.p, lap.c0, spec)

    t = kinetic(pp, ket)
    vee = inv_r(pp, ee)
    vne = -sum(Z * inv_r(pp, ch) for Z, ch in ne)
    vee_vne = -sum(Z * coulomb_pair(pp, ch, ee, spec) for Z, ch in ne)
    vne_vne = 0.0
    for (Za, ch_a), (Zb, ch_b) in ((x, y) for x in ne for y in ne):
        vne_vne += Za * Zb * coulomb_pair(pp, ch_a, ch_b, spec)

    terms = {
        "T_T": 0.25 * sum(del4_cross(pp, bra, ket, i, j) for i in range(n) for j in range(n)),
        "T_Vee": -0.5 * cq(ee, lap_bra),
        "Vee_T": -0.5 * cq(ee, lap_ket),
        "T_Vne": 0.5 * sum(Z * cq(ch, lap_bra) for Z, ch in ne),
        "Vne_T": 0.5 * sum(Z * cq(ch, lap_ket) for Z, ch in ne),
        "T_Vnn": vnn * t,
        "Vnn_T": vnn * t,
        "Vee_Vee": inv_r_squared(pp, 0, 1),
        "Vee_Vnn": vnn * vee,
        "Vnn_Vee": vnn * vee,
        "Vee_Vne": vee_vne,
        "Vne_Vee": vee_vne,
        "Vnn_Vnn": vnn * vnn * S,
        "Vnn_Vne": vnn * vne,
        "Vne_Vnn": vnn * vne,
        "Vne_Vne": vne_vne,
    }
    return {k: float(terms[k]) for k in H2_TERMS}


def assemble_h2_element(system: SystemDefinition, bra: EcgBasisFunction, ket: EcgBasisFunction,
                        spec: QuadratureSpec | None = None) -> float:
    return math.fsum(h2_terms(system, bra, ket, spec).values())
