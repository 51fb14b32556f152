"""Exception hierarchy shared by all modules."""


class HardyZError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HardyZError, ValueError):
    """An argument lies outside the supported range of an operation."""


class PrecisionUnreachableError(HardyZError):
    """The oracle cannot deliver the requested number of digits at this t."""


class NoConvergenceError(HardyZError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, bracket=None, nu=None):
        super().__init__(message)
        self.bracket = bracket
        self.nu = nu


class SuspiciousZeroError(HardyZError):
    """A sampled sign change of Z could not be refined to a clean zero."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class MaxSubdivisionError(HardyZError):
    """Adaptive quadrature hit its panel budget before meeting tolerance."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class CoverageError(HardyZError):
    """A pulled-back point or set falls outside the ladder grid."""
