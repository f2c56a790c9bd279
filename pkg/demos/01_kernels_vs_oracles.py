"""Analytic matrix elements next to their independent estimates.

A shifted two-electron Gaussian pair is built at random. Each kernel is
printed beside a reference value: a one-dimensional radial integral for the
single-distance operators, and plain Monte Carlo for the rest.
"""
import numpy as np

from ecgbounds.coulomb import coulomb_quadratic, inv_r, kinetic, nuclear_channel, pair_channel
from ecgbounds.ecg import ALL, EcgBasisFunction, laplacian_polynomial, pair_product
from ecgbounds.hsq import coulomb_pair, del4_cross, inv_r_squared_channel
from ecgbounds.oracle import mc_expectation, radial_expectation

rng = np.random.default_rng(7)


def random_function():
    M = rng.normal(size=(2, 2))
    return EcgBasisFunction(M @ M.T + 0.5 * np.eye(2), rng.uniform(-0.6, 0.6, size=(2, 3)))


bra, ket = random_function(), random_function()
pp = pair_product(bra, ket)
print(f"overlap S = {pp.overlap:.10f}\n")

ee = pair_channel(0, 1, 2)
ne = nuclear_channel(0, np.array([0.0, 0.0, 0.3]), 2)

print("single-distance operators, radial quadrature oracle")
for label, ch in (("|r1 - r2|", ee), ("|r1 - R|", ne)):
    for power, kernel in ((1, inv_r), (2, inv_r_squared_channel)):
        exact = kernel(pp, ch)
        ref = radial_expectation(pp, ch, lambda x, p=power: x ** -float(p)).value
        print(f"  1/{label}^{power}: analytic {exact:+.12f}  radial {ref:+.12f}  rel {abs(exact - ref) / abs(ref):.1e}")


def dist(r, ch):
    return np.linalg.norm(np.einsum("i,sia->sa", ch.vector, r) - ch.center, axis=1)


lap_bra = laplacian_polynomial(bra, ALL)
lap_ket = laplacian_polynomial(ket, ALL)
checks = [
    ("kinetic", kinetic(pp, ket), lambda r: -0.5 * lap_ket(r)),
    ("laplacian x laplacian", del4_cross(pp, bra, ket), lambda r: lap_bra(r) * lap_ket(r)),
    ("laplacian / r12", coulomb_quadratic(pp, ee, lap_bra.U, lap_bra.p, lap_bra.c0), lambda r: lap_bra(r) / dist(r, ee)),
    ("1 / (r1R r12)", coulomb_pair(pp, ne, ee), lambda r: 1 / (dist(r, ne) * dist(r, ee))),
]
print("\nmulti-centre operators, Monte Carlo oracle (2e6 samples)")
for seed, (label, exact, integrand) in enumerate(checks):
    est = mc_expectation(pp, integrand, 2_000_000, seed)
    z = (exact - est.value) / est.std_error
    print(f"  {label:<22} analytic {exact:+.8f}  mc {est.value:+.8f} +- {est.std_error:.1e}  z {z:+.2f}")
