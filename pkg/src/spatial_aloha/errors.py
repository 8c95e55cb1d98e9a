"""Exception hierarchy shared by all modules."""


class AlohaError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(AlohaError, ValueError):
    """A parameter is outside the domain where the model is defined."""


class DomainError(InvalidParameterError):
    """A function was evaluated outside its mathematical domain (pole, divergence)."""


class UsageError(AlohaError, ValueError):
    """An operation was called with an incompatible model variant or empty input."""


class NumericFailure(AlohaError, ArithmeticError):
    """Quadrature or transform inversion did not reach its tolerance.

    ``value`` is the best estimate obtained and ``error`` the achieved error
    estimate, so callers can decide whether the result is still usable.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error
