"""Exception hierarchy for the qres package."""


class QresError(Exception):
    """Base class for all qres-specific errors."""


class ShapeError(QresError, ValueError):
    """Tensor shapes or index ranges are inconsistent."""


class InvalidInputError(QresError, ValueError):
    """Input violates a documented precondition (e.g. zero norm, bad pivot)."""


class ResourceLimitError(QresError):
    """Requested computation exceeds a configured size cap."""


class ConvergenceError(QresError):
    """Iterative solver failed to converge within its iteration budget.

    Carries the best residual reached so callers can decide whether the
    partial result is still usable.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class PivotError(QresError):
    """Cross-interpolation pivot selection failed (zero or ill-conditioned pivot)."""
