"""Explicitly correlated Gaussian integrals and spectral lower bounds."""
from .ecg import ALL, EcgBasisFunction, PairProduct, pair_product
from .system import SystemDefinition

__all__ = ["ALL", "EcgBasisFunction", "PairProduct", "SystemDefinition", "pair_product"]
__version__ = "0.1.0"
