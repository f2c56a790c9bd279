"""Differential checks of analytic kernels against the oracles."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .coulomb import coulomb_quadratic, electron_channels, inv_r, kinetic, pair_channel
from .ecg import ALL, EcgBasisFunction, laplacian_polynomial, pair_product
from .errors import UnsupportedElectronCount
from .hsq import coulomb_pair, del4_cross, inv_r_squared_channel
from .oracle import mc_expectation, radial_expectation
from .quadrature import QuadratureSpec
from .system import SystemDefinition


@dataclass
class CheckRow:
    kernel: str
    pair: tuple[int, int]
    analytic: float
    oracle: float
    std_error: float
    method: str
    deviation: float      # relative error for radial checks, z-score for Monte Carlo
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = list(self.pair)
        return d


def _dist(r, ch):
    return np.linalg.norm(np.einsum("i,sia->sa", ch.vector, r) - ch.center, axis=1)


def kernel_checks(system: SystemDefinition, basis: Sequence[EcgBasisFunction], pairs: Sequence[tuple[int, int]],
                  samples: int, seed: int, sigma_limit: float = 4.0, radial_rel_tol: float = 1e-8,
                  include_h2: bool = True, spec: QuadratureSpec | None = None) -> list[CheckRow]:
    n = system.n_electrons
    if include_h2 and n != 2:
        raise UnsupportedElectronCount(f"squared-Hamiltonian kernels need 2 electrons, got {n}")
    rows: list[CheckRow] = []
    ee = [pair_channel(i, j, n) for i, j in combinations(range(n), 2)]
    ne = [ch for _, ch in electron_channels(system)]
    stream = iter(range(seed, seed + 10_000))

    def radial(name, kl, value, est):
        rel = abs(value - est.value) / abs(est.value)
        rows.append(CheckRow(name, kl, value, est.value, est.std_error, est.method, rel, rel <= radial_rel_tol))

    def mc(name, kl, value, pp, f):
        est = mc_expectation(pp, f, samples, next(stream))
        z = (value - est.value) / est.std_error if est.std_error > 0 else 0.0
        rows.append(CheckRow(name, kl, value, est.value, est.std_error, est.method, z, abs(z) <= sigma_limit))

    for k, l in pairs:
        bra, ket = basis[k], basis[l]
        pp = pair_product(bra, ket)
        kl = (k, l)
        lap_ket = laplacian_polynomial(ket, ALL)
        mc("kinetic", kl, kinetic(pp, ket), pp, lambda r: -0.5 * lap_ket(r))
        for ch in ee + ne:
            tag = "ee" if not ch.is_nuclear else "ne"
            radial(f"inv_r[{tag}{ch.coupling.indices}]", kl, inv_r(pp, ch), radial_expectation(pp, ch, lambda x: 1 / x, spec))
            if include_h2:
                radial(f"inv_r_squared[{tag}{ch.coupling.indices}]", kl, inv_r_squared_channel(pp, ch),
                       radial_expectation(pp, ch, lambda x: 1 / x ** 2, spec))
        if not include_h2:
            continue
        lap_bra = laplacian_polynomial(bra, ALL)
        mc("del4_cross", kl, del4_cross(pp, bra, ket), pp, lambda r: lap_bra(r) * lap_ket(r))
        for ch in ee + ne[:1]:
            mc(f"coulomb_quadratic[{ch.coupling.indices}]", kl,
               coulomb_quadratic(pp, ch, lap_bra.U, lap_bra.p, lap_bra.c0, spec), pp,
               lambda r, ch=ch: lap_bra(r) / _dist(r, ch))
        for c1, c2 in [(a, b) for a in ne for b in ee] + list(combinations(ne, 2)):
            mc(f"coulomb_pair[{c1.coupling.indices}x{c2.coupling.indices}]", kl, coulomb_pair(pp, c1, c2, spec), pp,
               lambda r, c1=c1, c2=c2: 1.0 / (_dist(r, c1) * _dist(r, c2)))
    return rows
