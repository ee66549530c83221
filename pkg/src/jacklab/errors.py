"""Exception types shared across the package."""


class JacklabError(Exception):
    """Base class."""


class DomainError(JacklabError, ValueError):
    """Input outside the mathematical domain of an operation."""


class AccuracyError(JacklabError, ArithmeticError):
    """Numerical result could not be certified to the requested accuracy."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class CapacityError(JacklabError, RuntimeError):
    """Request exceeds the desk-scale limits of an engine."""
