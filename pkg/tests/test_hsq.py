import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecgbounds.coulomb import assemble_h_element, inv_r, kinetic, nuclear_channel, pair_channel
from ecgbounds.ecg import ALL, EcgBasisFunction, laplacian_polynomial, pair_product
from ecgbounds.errors import DegeneratePair, DomainError, UnsupportedElectronCount
from ecgbounds.hsq import (H2_TERMS, _arcsin_ratio, assemble_h2_element, coulomb_pair, del4_cross, h2_terms,
                           inv_r_squared, inv_r_squared_channel, inv_r_squared_coeffs, inv_ria_rjb_general,
                           inv_rij_rpa_general, inv_rij_rpa_zero_shift, rijrpa_coeffs)
from ecgbounds.oracle import mc_expectation, radial_expectation
from ecgbounds.system import HELIUM, SystemDefinition
from helpers import random_ecg, random_spd, rel

ORIGIN = np.zeros(3)
H2_LIKE = SystemDefinition(np.array([1.0, 1.0]), np.array([[0, 0, -0.7], [0, 0, 0.7]]), 2)


def _unit_pair():
    f = EcgBasisFunction.centered(np.eye(2))
    return pair_product(f, f)


def _dist(r, i, centre=None):
    return np.linalg.norm(r[:, i] - (0 if centre is None else centre), axis=1)


def _r12(r):
    return np.linalg.norm(r[:, 0] - r[:, 1], axis=1)


def test_inv_r_squared_spot():
    assert inv_r_squared(_unit_pair(), 0, 1) == pytest.approx(math.pi ** 3 / 4, rel=1e-14)


def test_inv_r_squared_zero_offset_branch(rng):
    f = random_ecg(rng, 2, shift=0)
    pp = pair_product(f, f)
    c = inv_r_squared_coeffs(pp, 0, 1)
    assert c.offset_sq == 0.0
    assert inv_r_squared(pp, 0, 1) == 2 * pp.overlap / c.width


def test_inv_r_squared_errors():
    with pytest.raises(DegeneratePair):
        inv_r_squared(_unit_pair(), 1, 1)


def test_inv_r_squared_radial(rng):
    for _ in range(10):
        pp = pair_product(random_ecg(rng, 2), random_ecg(rng, 2))
        est = radial_expectation(pp, pair_channel(0, 1, 2), lambda x: x ** -2.0)
        assert rel(inv_r_squared(pp, 0, 1), est.value) <= 1e-8


def test_inv_r_squared_series_boundary(rng):
    # offsets straddling the series switch give a continuous result
    f = EcgBasisFunction(np.eye(2), np.zeros((2, 3)))
    vals = []
    for eps in (5e-6, 1.0001e-5, 2e-5):
        g = EcgBasisFunction(np.eye(2), np.array([[eps, 0, 0], [0, 0, 0]]))
        pp = pair_product(f, g)
        vals.append(inv_r_squared(pp, 0, 1) / pp.overlap)
    assert max(vals) - min(vals) <= 1e-9


def test_zero_shift_spot():
    A = 2 * np.eye(2)
    assert inv_rij_rpa_zero_shift(A, 0, 1, 0) == pytest.approx(math.pi ** 3 / 4, rel=1e-14)
    c = rijrpa_coeffs(_unit_pair(), 0, 1, 0, ORIGIN)
    assert (c.a_ij, c.a_pp, c.c) == pytest.approx((1.0, 0.5, 0.25))
    assert c.a_ij * c.a_pp - c.c == pytest.approx(1 / np.linalg.det(A), rel=1e-14)
    assert (c.beta_a, c.mu_a, c.epsilon_a, c.omega_a, c.gamma_a) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_arcsin_small_c_branch():
    a, b = 0.9, 1.3
    c = 1e-12
    direct = math.asin(math.sqrt(c / (a * b))) / math.sqrt(c)
    assert _arcsin_ratio(a, b, c) == pytest.approx(direct, rel=1e-10)
    assert _arcsin_ratio(a, b, 0.0) == pytest.approx(1 / math.sqrt(a * b), rel=1e-15)
    with pytest.raises(DomainError):
        _arcsin_ratio(1.0, 1.0, 1.5)


def test_gap_equals_inverse_determinant(rng):
    for _ in range(200):
        A = random_spd(rng, 2)
        f = EcgBasisFunction.centered(A / 2)
        c = rijrpa_coeffs(pair_product(f, f), 0, 1, int(rng.integers(2)), ORIGIN)
        assert c.a_ij * c.a_pp - c.c == pytest.approx(1 / np.linalg.det(A), rel=1e-12)


def test_zero_shift_monte_carlo(rng):
    A = random_spd(rng, 2)
    f = EcgBasisFunction.centered(A / 2)
    pp = pair_product(f, f)
    v = inv_rij_rpa_zero_shift(A, 0, 1, 1)
    est = mc_expectation(pp, lambda r: 1 / (_r12(r) * _dist(r, 1)), 2_000_000, 7)
    assert abs(v - est.value) <= 3 * est.std_error


def test_general_reduces_to_closed_form():
    pp = _unit_pair()
    assert rel(inv_rij_rpa_general(pp, 0, 1, 0, ORIGIN), math.pi ** 3 / 4) <= 1e-7


def test_general_small_shift_limit(rng):
    # a tiny shift forces the quadrature path, which must approach the closed form
    A = random_spd(rng, 2)
    f = EcgBasisFunction.centered(A / 2)
    g = EcgBasisFunction(A / 2, np.full((2, 3), 1e-6))
    v = inv_rij_rpa_general(pair_product(f, g), 0, 1, 1, ORIGIN)
    assert rel(v, inv_rij_rpa_zero_shift(A, 0, 1, 1)) <= 1e-7


def test_general_monte_carlo(rng):
    f, g = random_ecg(rng, 2, 0.5), random_ecg(rng, 2, 0.5)
    pp = pair_product(f, g)
    a = np.array([0.2, -0.1, 0.3])
    v = inv_rij_rpa_general(pp, 0, 1, 1, a)
    est = mc_expectation(pp, lambda r: 1 / (_r12(r) * _dist(r, 1, a)), 2_000_000, 8)
    assert abs(v - est.value) <= 3 * est.std_error


def test_general_translation_invariant(rng):
    f, g = random_ecg(rng, 2), random_ecg(rng, 2)
    a = rng.normal(size=3)
    base = inv_rij_rpa_general(pair_product(f, g), 0, 1, 0, a)
    for _ in range(5):
        t = rng.normal(size=3)
        f2 = EcgBasisFunction(f.A, f.s + t)
        g2 = EcgBasisFunction(g.A, g.s + t)
        assert rel(inv_rij_rpa_general(pair_product(f2, g2), 0, 1, 0, a + t), base) <= 1e-9


def test_offset_quadratic_nonnegative(rng):
    for _ in range(20):
        pp = pair_product(random_ecg(rng, 2), random_ecg(rng, 2))
        c = rijrpa_coeffs(pp, 0, 1, 0, rng.normal(size=3))
        g = np.linspace(0, 1 / c.a_pp, 100)
        delta = c.beta_a - g * c.epsilon_a + g * g * c.omega_a
        assert np.all(delta >= -1e-12 * max(c.beta_a, 1.0))


def test_gamma_shift_invariance(rng):
    f, g = random_ecg(rng, 2), random_ecg(rng, 2)
    a = rng.normal(size=3)
    moved = pair_product(EcgBasisFunction(f.A, f.s - a), EcgBasisFunction(g.A, g.s - a))
    c = rijrpa_coeffs(pair_product(f, g), 0, 1, 0, a)
    assert c.gamma_a == pytest.approx(moved.gamma, rel=1e-10, abs=1e-12)


def test_coincident_factors_route_to_inverse_square(rng):
    f = random_ecg(rng, 2, shift=0)
    pp = pair_product(f, f)
    v = inv_ria_rjb_general(pp, 0, ORIGIN, 0, ORIGIN)
    assert v == pytest.approx(inv_r_squared_channel(pp, nuclear_channel(0, ORIGIN, 2)), rel=1e-14)
    # same electron, shifted pair: still 1/r^2 and checked against the radial oracle
    pp = pair_product(random_ecg(rng, 2), random_ecg(rng, 2))
    a = rng.normal(size=3)
    est = radial_expectation(pp, nuclear_channel(1, a, 2), lambda x: x ** -2.0)
    assert rel(inv_ria_rjb_general(pp, 1, a, 1, a), est.value) <= 1e-8


def test_same_nucleus_two_electrons_uncorrelated():
    pp = _unit_pair()
    assert inv_ria_rjb_general(pp, 0, ORIGIN, 1, ORIGIN) == pytest.approx(math.pi ** 2, rel=1e-13)


def test_distinct_nuclei_monte_carlo(rng):
    a, b = np.array([0, 0, -0.7]), np.array([0, 0, 0.7])
    pp = pair_product(random_ecg(rng, 2, 0.6), random_ecg(rng, 2, 0.6))
    for i, j in ((0, 1), (0, 0)):
        v = inv_ria_rjb_general(pp, i, a, j, b)
        est = mc_expectation(pp, lambda r: 1 / (_dist(r, i, a) * _dist(r, j, b)), 2_000_000, 9 + i + j)
        assert abs(v - est.value) <= 3 * est.std_error


def test_del4_single_gaussian():
    f = EcgBasisFunction.centered([[1.0]])
    pp = pair_product(f, f)
    # (4 r^2 - 6)^2 with <r^2> = 3/4 and <r^4> = 15/16 under exp(-2 r^2)
    assert del4_cross(pp, f, f, 0, 0) == pytest.approx(15 * pp.overlap, rel=1e-14)


def test_del4_symmetry_and_mc(rng):
    f = random_ecg(rng, 2)
    pp = pair_product(f, f)
    assert del4_cross(pp, f, f, 0, 1) == pytest.approx(del4_cross(pp, f, f, 1, 0), rel=1e-13)
    g = random_ecg(rng, 2)
    pp = pair_product(f, g)
    lf, lg = laplacian_polynomial(f, 0), laplacian_polynomial(g, 1)
    est = mc_expectation(pp, lambda r: lf(r) * lg(r), 1_000_000, 12)
    assert abs(del4_cross(pp, f, g, 0, 1) - est.value) <= 3 * est.std_error


def test_h2_terms_names_and_electron_count(rng):
    f = random_ecg(rng, 2, shift=0)
    terms = h2_terms(HELIUM, f, f)
    assert tuple(terms) == H2_TERMS and len(terms) == 16
    for key in ("T_Vnn", "Vnn_T", "Vee_Vnn", "Vnn_Vee", "Vnn_Vnn", "Vnn_Vne", "Vne_Vnn"):
        assert terms[key] == 0.0
    three = SystemDefinition.atom(3.0, 3)
    with pytest.raises(UnsupportedElectronCount):
        h2_terms(three, random_ecg(rng, 3), random_ecg(rng, 3))


def _term_oracles(system, f, g, samples, seed):
    """Independent estimates of each H^2 term (radial for 1/r^2 pieces, MC otherwise)."""
    pp = pair_product(f, g)
    lf, lg = laplacian_polynomial(f, ALL), laplacian_polynomial(g, ALL)
    nuclei = list(zip(system.charges, system.positions))
    vnn = system.nuclear_repulsion

    def vne(r):
        return -sum(Z * _dist(r, i, R) for Z, R in nuclei for i in range(2) for _ in [0]) * 0 - sum(
            Z / _dist(r, i, R) for Z, R in nuclei for i in range(2))

    def vne_sq_offdiag(r):
        total = 0.0
        chans = [(Z, i, R) for Z, R in nuclei for i in range(2)]
        for x, (Za, i, Ra) in enumerate(chans):
            for y, (Zb, j, Rb) in enumerate(chans):
                if x != y:
                    total = total + Za * Zb / (_dist(r, i, Ra) * _dist(r, j, Rb))
        return total

    seeds = iter(range(seed, seed + 100))

    def mc(fn):
        return mc_expectation(pp, fn, samples, next(seeds))

    S = pp.overlap
    t = kinetic(pp, g)
    oracles = {
        "T_T": mc(lambda r: 0.25 * lf(r) * lg(r)),
        "T_Vee": mc(lambda r: -0.5 * lf(r) / _r12(r)),
        "Vee_T": mc(lambda r: -0.5 * lg(r) / _r12(r)),
        "T_Vne": mc(lambda r: -0.5 * lf(r) * vne(r)),
        "Vne_T": mc(lambda r: -0.5 * lg(r) * vne(r)),
        "Vee_Vne": mc(lambda r: vne(r) / _r12(r)),
        "Vne_Vee": mc(lambda r: vne(r) / _r12(r)),
    }
    vee_vee = radial_expectation(pp, pair_channel(0, 1, 2), lambda x: x ** -2.0)
    diag = sum(Z * Z * radial_expectation(pp, nuclear_channel(i, R, 2), lambda x: x ** -2.0).value
               for Z, R in nuclei for i in range(2))
    off = mc(vne_sq_offdiag)
    exact = {
        "T_Vnn": vnn * t, "Vnn_T": vnn * t, "Vee_Vee": vee_vee.value,
        "Vee_Vnn": vnn * inv_r(pp, pair_channel(0, 1, 2)), "Vnn_Vee": vnn * inv_r(pp, pair_channel(0, 1, 2)),
        "Vnn_Vnn": vnn * vnn * S,
    }
    vne_exact = -sum(Z * inv_r(pp, nuclear_channel(i, R, 2)) for Z, R in nuclei for i in range(2))
    exact["Vnn_Vne"] = exact["Vne_Vnn"] = vnn * vne_exact
    return oracles, exact, (diag, off)


@pytest.mark.parametrize("system", [HELIUM, H2_LIKE], ids=["helium", "h2_like"])
def test_h2_terms_against_oracles(rng, system):
    f, g = random_ecg(rng, 2, 0.4), random_ecg(rng, 2, 0.4)
    terms = h2_terms(system, f, g)
    oracles, exact, (diag, off) = _term_oracles(system, f, g, 1_000_000, 100)
    for name, est in oracles.items():
        assert abs(terms[name] - est.value) <= 3 * est.std_error, name
    for name, value in exact.items():
        assert terms[name] == pytest.approx(value, rel=1e-8, abs=1e-12), name
    assert abs(terms["Vne_Vne"] - (diag + off.value)) <= 3 * off.std_error + 1e-8 * abs(diag)
    assert assemble_h2_element(system, f, g) == pytest.approx(math.fsum(terms.values()), rel=1e-14)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_h2_element_symmetric(seed):
    rng = np.random.default_rng(seed)
    f, g = random_ecg(rng, 2, 0.5), random_ecg(rng, 2, 0.5)
    a = assemble_h2_element(H2_LIKE, f, g)
    b = assemble_h2_element(H2_LIKE, g, f)
    assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


def test_h2_diagonal_dominates_square(rng):
    # <Hf|Hf> <f|f> >= <f|H|f>^2
    for _ in range(5):
        f = random_ecg(rng, 2, 0.5)
        S = pair_product(f, f).overlap
        h = assemble_h_element(H2_LIKE, f, f)
        assert assemble_h2_element(H2_LIKE, f, f) * S >= h * h


def test_h2_gram_property(rng):
    from ecgbounds.batch import hs_matrices
    from ecgbounds.spectral import h2_matrix
    basis = [random_ecg(rng, 2, 0.5) for _ in range(5)]
    H, S = hs_matrices(H2_LIKE, basis, parity=None)
    H2 = h2_matrix(H2_LIKE, basis, parity=None)
    gap = H2 - H @ np.linalg.solve(S, H)
    assert np.min(np.linalg.eigvalsh(0.5 * (gap + gap.T))) >= -1e-8 * np.max(np.abs(H2))
