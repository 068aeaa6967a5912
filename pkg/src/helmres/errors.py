"""Exception hierarchy shared across the package."""


class HelmresError(Exception):
    """Base class for all errors raised by helmres."""


class DimensionMismatch(HelmresError):
    """Operands have incompatible shapes."""


class SingularMatrixError(HelmresError):
    """A factorization hit an exactly singular matrix."""


class ZeroPivotError(HelmresError):
    """Incomplete factorization found a zero diagonal pivot.

    Carries the offending row so the caller can decide whether to request
    an explicit pivot shift.
    """

    def __init__(self, row: int, msg: str | None = None):
        self.row = row
        super().__init__(msg or f"zero diagonal pivot in row {row}")


class CapExceededError(HelmresError):
    """A dense-path operation was requested above its configured size cap."""


class ConvergenceError(HelmresError):
    """An iterative eigensolver did not converge.

    ``values`` and ``vectors`` hold the converged subset, if any.
    """

    def __init__(self, msg, values=None, vectors=None):
        self.values = values
        self.vectors = vectors
        super().__init__(msg)


class DeflationConditionError(HelmresError):
    """The deflation space violates the rank or kernel-intersection condition."""


class ContourError(HelmresError):
    """A bound contour is invalid: wrong enclosure or passing through the spectrum."""


class OracleDomainError(HelmresError):
    """A desk-scale oracle was called outside its trustworthy domain."""
