"""Fast internal consistency checks run by ``ecgbounds verify``."""
from __future__ import annotations

import math

import numpy as np

from . import matkit
from .coulomb import assemble_h_element
from .ecg import EcgBasisFunction, pair_product
from .hsq import inv_r_squared, inv_rij_rpa_zero_shift
from .quadrature import dawson, erfi, integrate
from .system import HYDROGEN


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def run_selfchecks(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    out = []

    x = np.linspace(0.0, 6.0, 601)
    err = float(np.max(np.abs(dawson(x) - math.sqrt(math.pi) / 2 * np.exp(-x * x) * erfi(x))))
    out.append(("dawson_vs_erfi", err <= 1e-12, f"max abs diff {err:.2e}"))

    res = integrate(lambda t: 1 / np.sqrt(t), (0.0, 1.0))
    out.append(("quadrature_inverse_sqrt", abs(res.value - 2) <= max(res.error_estimate, 1e-12),
                f"{res.value!r} +- {res.error_estimate:.1e}"))
    res = integrate(lambda t: np.exp(-t * t), (0.0, math.inf))
    out.append(("quadrature_half_gaussian", abs(res.value - math.sqrt(math.pi) / 2) <= max(res.error_estimate, 1e-12),
                f"{res.value!r} +- {res.error_estimate:.1e}"))

    worst = 0.0
    for _ in range(50):
        M = rng.normal(size=(3, 3))
        G = M @ M.T + np.eye(3)
        k = rng.normal(size=3)
        B = np.outer(k, k)
        worst = max(worst, _rel(matkit.det_rank1_update(G, 0.7, B), np.linalg.det(G + 0.7 * B)))
    out.append(("rank_one_determinant", worst <= 1e-10, f"worst rel {worst:.1e}"))

    f = EcgBasisFunction.centered(np.eye(2))
    v = inv_r_squared(pair_product(f, f), 0, 1)
    out.append(("inv_r_squared_spot", _rel(v, math.pi ** 3 / 4) <= 1e-10, f"{v!r}"))
    v = inv_rij_rpa_zero_shift(2 * np.eye(2), 0, 1, 0)
    out.append(("inv_rij_rpa_spot", _rel(v, math.pi ** 3 / 4) <= 1e-10, f"{v!r}"))

    a = 8 / (9 * math.pi)
    g = EcgBasisFunction.centered([[a]])
    e = assemble_h_element(HYDROGEN, g, g) / pair_product(g, g).overlap
    out.append(("hydrogen_single_gaussian", _rel(e, -4 / (3 * math.pi)) <= 1e-12, f"{e!r}"))
    return out
