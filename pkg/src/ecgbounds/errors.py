"""Exception types raised across the package."""


class EcgError(Exception):
    """Base class for every error raised by ecgbounds."""


class NotPositiveDefinite(EcgError, ValueError):
    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class OverlapNotPositiveDefinite(NotPositiveDefinite):
    """Overlap matrix failed Cholesky; ``pivot`` is the offending basis row."""


class DimensionMismatch(EcgError, ValueError):
    pass


class IndexOutOfRange(EcgError, IndexError):
    pass


class DegeneratePair(EcgError, ValueError):
    pass


class DegenerateChannel(EcgError, ValueError):
    pass


class DegenerateMarginal(EcgError, ValueError):
    pass


class DomainError(EcgError, ValueError):
    pass


class InvalidPermutation(EcgError, ValueError):
    pass


class UnsupportedElectronCount(EcgError, ValueError):
    pass


class NonFiniteSample(EcgError, FloatingPointError):
    pass


class ZeroVector(EcgError, ValueError):
    pass


class NegativeVariance(EcgError, ValueError):
    pass


class BetaNotAboveE(EcgError, ValueError):
    pass


class ConfigError(EcgError, ValueError):
    pass


class QuadratureFailure(EcgError, ArithmeticError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate is kept on ``result`` so callers can still inspect it.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
