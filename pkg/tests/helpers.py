import numpy as np

from ecgbounds.ecg import EcgBasisFunction


def random_spd(rng, n, floor=0.3, scale=1.0):
    M = rng.normal(size=(n, n))
    return scale * (M @ M.T / n + floor * np.eye(n))


def random_ecg(rng, n, shift=1.0, floor=0.3, scale=1.0):
    s = rng.uniform(-shift, shift, size=(n, 3)) if shift else np.zeros((n, 3))
    return EcgBasisFunction(random_spd(rng, n, floor, scale), s)


def rel(a, b):
    return abs(a - b) / abs(b)
