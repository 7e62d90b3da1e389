"""Exception types raised by the boxspline package."""


class BoxSplineError(ValueError):
    """Base class for every error raised by this package."""


class InvalidEdge(BoxSplineError):
    pass


class EdgeNotInDomain(BoxSplineError):
    pass


class NotTouching(BoxSplineError):
    pass


class NotBoundaryVertex(BoxSplineError):
    pass


class DimensionMismatch(BoxSplineError):
    pass


class DegreeTooLow(BoxSplineError):
    pass


class NotAdjacent(BoxSplineError):
    pass


class BadOrder(BoxSplineError):
    pass


class NotVertexContact(BoxSplineError):
    pass


class EdgeNotOfTriangle(BoxSplineError):
    pass


class InvalidTriple(BoxSplineError):
    pass


class NotInSpace(BoxSplineError):
    pass


class DegreeMismatch(BoxSplineError):
    pass


class NotEdgeContact(BoxSplineError):
    pass


class NotNested(BoxSplineError):
    pass


class RepresentationFailure(BoxSplineError):
    """A level solve in the hierarchical decomposition was inconsistent."""

    def __init__(self, level, residual):
        self.level = level
        self.residual = residual
        super().__init__(f"representation failed at level {level}: {residual}")


class AmbiguousSmoothnessType(BoxSplineError):
    """Two shortest edge chains produced different type sets."""
