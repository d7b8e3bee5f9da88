"""Exception types raised by the library."""


class ZenoError(Exception):
    """Base class for all errors raised by zenodecay."""


class DomainError(ZenoError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidityError(ZenoError, ValueError):
    """Arguments are well-defined but outside the regime where the model holds."""


class StepTooCoarseError(ZenoError, ValueError):
    """The time step of the memory-kernel solver cannot resolve the dynamics.

    Attributes
    ----------
    suggested_step : float
        Largest step (s) that satisfies the resolution criterion.
    """

    def __init__(self, message, suggested_step):
        super().__init__(message)
        self.suggested_step = suggested_step


class ConvergenceError(ZenoError, ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy.

    Attributes
    ----------
    value : float
        Best estimate obtained.
    error : float
        Absolute error estimate for ``value``.
    """

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value:.6e}, error estimate={error:.3e})")
        self.value = value
        self.error = error


class ValidityWarning(UserWarning):
    """A result was computed outside the regime where the model is trusted."""
