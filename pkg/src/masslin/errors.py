"""Exception types shared across the package."""


class MasslinError(Exception):
    """Base class for domain errors raised by this package."""


class PolytopeError(MasslinError):
    """Invalid polytope data: unbounded, empty, redundant facet, and so on."""


class NotSimpleError(PolytopeError):
    """A vertex has more supporting facets than the dimension."""

    def __init__(self, message, point=None, active=None):
        super().__init__(message)
        self.point = point
        self.active = active


class StructuralInconsistency(MasslinError):
    """An internal cross-check failed; indicates a bug or bad input data."""
