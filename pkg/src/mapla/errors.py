"""Exception types shared across the package."""


class MaplaError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(MaplaError):
    """Operands have incompatible dimensions."""


class NotPositiveDefinite(MaplaError):
    """Cholesky factorization failed; the matrix is not (numerically) SPD.

    In the sampler loop this usually signals that a point left the
    interior of the body, or that a metric evaluator is broken.
    """


class NotInterior(MaplaError):
    """A point lies outside the interior of the convex body."""


class InitNotInterior(MaplaError):
    """An initial distribution produced a point outside the interior."""


class EmptyBatch(MaplaError):
    """A diagnostic was handed an empty sample batch."""
