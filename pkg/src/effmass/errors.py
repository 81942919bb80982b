"""Exception types shared across the package."""


class EffMassError(Exception):
    """Base class for all package errors."""


class DomainError(EffMassError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class CapabilityError(EffMassError, ValueError):
    """A request exceeds a hard-coded guard (polynomial order, level count...)."""


class StateError(EffMassError, ValueError):
    """A wavefunction does not satisfy an operation's precondition."""


class NumericalError(EffMassError, ArithmeticError):
    """An iterative numerical procedure failed to converge.

    ``estimate`` and ``error`` carry the best result obtained before giving up,
    when one is available.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DiagnosticError(NumericalError):
    """A numerical cross-check disagrees with the analytic result it validates."""
