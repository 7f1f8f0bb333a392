"""Exception types shared across the package."""


class QfimaxError(Exception):
    """Base class for all package errors."""


class ValidationError(QfimaxError, ValueError):
    """Input object or configuration violates a structural invariant."""


class DimensionMismatch(ValidationError):
    """Operands have incompatible dimensions."""


class NumericError(QfimaxError, RuntimeError):
    """Numerical fault: non-convergence, consistency-check mismatch, etc."""
