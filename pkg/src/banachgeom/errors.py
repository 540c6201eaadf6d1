"""Exception types shared across the package."""


class BanachGeomError(Exception):
    """Base class for all package errors."""


class DegeneratePresentation(BanachGeomError):
    """Facet functionals / vertex generators do not span the space."""


class BadExponent(BanachGeomError):
    """An lp exponent outside [1, inf]."""


class DimensionMismatch(BanachGeomError):
    """Vector or functional length does not match the space dimension."""


class NotPolytopal(BanachGeomError):
    """Exact polytope machinery requested on a smooth ball."""


class VertexEnumerationTooLarge(BanachGeomError):
    """Vertex enumeration would exceed the desk-scale combinatorial cap."""


class Infeasible(BanachGeomError):
    """LP feasible region is empty."""


class EmptySlice(BanachGeomError):
    """Slice does not meet the unit ball."""


class EmptyRegion(BanachGeomError):
    """Weakly open region does not meet the unit ball."""


class RegionTooThin(BanachGeomError):
    """Rejection sampling never hit the region within the trial budget."""


class NotInDualBall(BanachGeomError):
    """Functional handed to the dual map exceeds the dual unit ball."""


class BadIndex(BanachGeomError):
    """Index outside the allowed range."""


class SpecFileError(BanachGeomError):
    """Malformed space/code spec file."""


class UnsupportedFormula(BanachGeomError):
    """Formula id requires data that was not supplied."""
