"""Lower bounds on matrices whose spectrum is known exactly.

H = X^T diag(eps) X and S = X^T X share the eigenvalues eps, and
X^T diag(eps^2) X plays the role of the squared Hamiltonian. Perturbing the
ground vector gives a trial state with nonzero variance. Weinstein and
Temple (with the exact second level as beta) then bracket eps[0] from below.
"""
import math

import numpy as np

from ecgbounds.spectral import SpectralMatrices, rayleigh_and_variance, stevenson, temple, weinstein

rng = np.random.default_rng(3)
eps = np.array([-2.0, -0.5, 0.3, 1.1, 2.4])
X = rng.normal(size=(5, 5)) + 2 * np.eye(5)
m = SpectralMatrices(X.T @ np.diag(eps) @ X, X.T @ X, X.T @ np.diag(eps ** 2) @ X)
print("Ritz values:", np.round(m.ritz_values, 12))

noise = rng.normal(size=5)
print(f"\n{'noise':>6} {'E':>9} {'sigma':>7} {'weinstein':>10} {'temple':>9} {'stevenson':>10}")
for scale in (0.005, 0.01, 0.02, 0.04):
    E, var = rayleigh_and_variance(m, m.ground_vector + scale * noise)
    alpha = 0.5 * (eps[0] + eps[1])
    print(f"{scale:6.3f} {E:9.5f} {math.sqrt(var):7.4f} {weinstein(E, var):10.5f} "
          f"{temple(E, var, eps[1]):9.5f} {stevenson(E, var, alpha):10.5f}")
print(f"\nexact ground value {eps[0]}; every bound above sits at or below it")
