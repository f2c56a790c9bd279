"""Integrals with closed-form values for exercising the quad engine."""
import math

import numpy as np
from scipy.special import fresnel

_C = fresnel(math.sqrt(2 / math.pi))[1]

# (label, integrand, interval, transform, exact)
CASES = [
    ("rational_decay", lambda t: (1 + t * t) ** -1.5, (0, math.inf), "rational-infinite", 1.0),
    ("gamma_half_at_one", lambda x: np.exp(-x) / np.sqrt(x), (0, 1), "sqrt-endpoint", math.sqrt(math.pi) * math.erf(1)),
    ("quarter_turn", lambda x: np.ones_like(x), (0, math.pi / 2), "none", math.pi / 2),
    ("square", lambda x: x * x, (0, 1), "none", 1 / 3),
    ("sine_hump", np.sin, (0, math.pi), "none", 2.0),
    ("half_gaussian", lambda x: np.exp(-x * x), (0, math.inf), "rational-infinite", math.sqrt(math.pi) / 2),
    ("full_gaussian", lambda x: np.exp(-x * x), (-math.inf, math.inf), "rational-infinite", math.sqrt(math.pi)),
    ("inverse_sqrt", lambda x: 1 / np.sqrt(x), (0, 1), "sqrt-endpoint", 2.0),
    ("log_singularity", np.log, (0, 1), "none", -1.0),
    ("exponential_tail", lambda x: np.exp(-x), (0, math.inf), "rational-infinite", 1.0),
    ("arctan_unit", lambda x: 1 / (1 + x * x), (0, 1), "none", math.pi / 4),
    ("cauchy_tail", lambda x: 1 / (1 + x * x), (0, math.inf), "rational-infinite", math.pi / 2),
    ("cos_squared", lambda x: np.cos(x) ** 2, (0, 2 * math.pi), "none", math.pi),
    ("sqrt", np.sqrt, (0, 1), "none", 2 / 3),
    ("gaussian_first_moment", lambda x: x * np.exp(-x * x), (0, math.inf), "rational-infinite", 0.5),
    ("fresnel_type", lambda x: np.cos(x) / np.sqrt(x), (0, 1), "sqrt-endpoint", 2 * math.sqrt(math.pi / 2) * _C),
    ("exp_unit", np.exp, (0, 1), "none", math.e - 1),
    ("semicircle", lambda x: np.sqrt(np.maximum(1 - x * x, 0)), (-1, 1), "none", math.pi / 2),
    ("gamma_three", lambda x: x * x * np.exp(-x), (0, math.inf), "rational-infinite", 2.0),
    ("sqrt_over_linear", lambda x: 1 / (np.sqrt(x) * (1 + x)), (0, 1), "sqrt-endpoint", math.pi / 2),
    ("damped_sine", lambda x: np.sin(x) * np.exp(-x), (0, math.inf), "rational-infinite", 0.5),
]
