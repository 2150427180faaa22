"""Exception hierarchy shared by every module of the package."""


class RadonError(Exception):
    """Base class for all errors raised by radon_radial."""


class ArgumentError(RadonError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(RadonError, ValueError):
    """A profile interval falls outside the domain of a measure."""


class IntegrabilityError(RadonError, ArithmeticError):
    """A density or integrand is not integrable on the requested range."""


class AccuracyError(RadonError, ArithmeticError):
    """Quadrature did not reach the requested tolerance within its budget.

    The best available estimate is kept on the exception so callers can
    record it instead of losing it.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(RadonError, ValueError):
    """An invalid scenario configuration was supplied to the harness."""
