"""Exception hierarchy.

Every error carries a short machine-readable ``category`` so the command line
runner can report failures uniformly.
"""


class ZetaLabError(Exception):
    category = "error"


class DomainError(ZetaLabError, ValueError):
    category = "domain"


class EmptyTableError(DomainError):
    category = "empty-table"


class TableTooSmallError(DomainError):
    category = "table-too-small"


class DivergenceError(DomainError):
    category = "divergence"


class PoleError(DomainError):
    category = "pole"


class PrecisionError(ZetaLabError, ArithmeticError):
    category = "precision"

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class TailBoundError(PrecisionError):
    category = "tail-bound"


class RadiusError(DomainError):
    category = "outside-radius"

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class ResourceError(ZetaLabError):
    category = "resources"

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class BoundaryError(ZetaLabError):
    """An a-value (or the pole) sits too close to a contour."""

    category = "boundary"

    def __init__(self, message, edge=None, clearance=None):
        super().__init__(message)
        self.edge = edge
        self.clearance = clearance


class RefinementError(ZetaLabError):
    category = "refinement-exhausted"


class PartialResultError(ZetaLabError):
    category = "partial-result"

    def __init__(self, message, covered=None, value=None):
        super().__init__(message)
        self.covered = covered
        self.value = value


class CoverageError(ZetaLabError):
    category = "coverage"
