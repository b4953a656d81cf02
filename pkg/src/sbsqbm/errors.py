"""Exception hierarchy shared across the package."""


class SBSError(Exception):
    """Base class for every error raised by :mod:`sbsqbm`."""


class ParameterError(SBSError, ValueError):
    """An input lies outside the domain of the operation."""


class ConfigurationError(SBSError, ValueError):
    """An environment, grid or run configuration is inconsistent."""


class ValidityError(SBSError, ValueError):
    """An asymptotic expansion was requested outside its validity guard."""


class UnsupportedPatternError(SBSError, ValueError):
    """No expansion is tabulated for the requested sign pattern."""


class RegimeMismatchError(SBSError, ValueError):
    """The requested mean kind does not apply at this temperature."""


class QuadratureError(SBSError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TruncationError(SBSError, ArithmeticError):
    """A Fock-space truncation exceeds its trace-deficit budget."""

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class NumericalInstabilityError(SBSError, ArithmeticError):
    """An intermediate matrix lost positivity beyond roundoff."""
