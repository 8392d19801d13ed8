"""Exception hierarchy shared by the geometry and checker modules."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class CurvatureMismatchError(GeometryError):
    """Two model points live in spaces of different curvature."""


class PointInvariantError(GeometryError):
    """Coordinates do not lie on the model surface."""


class InconsistentSidesError(GeometryError):
    """Side lengths cannot be realized by a model-space triangle."""


class NoUniqueGeodesicError(GeometryError):
    """The endpoints are antipodal, so the shortest is not unique."""


class ReflectionUndefinedError(GeometryError):
    """The doubled geodesic would leave the open hemisphere."""


class UndefinedCosqError(GeometryError):
    """A denominator of the quadrilateral cosine vanishes."""


class MalformedSpaceError(ValueError):
    """A distance matrix is not a semimetric (asymmetric, bad diagonal, ...)."""
