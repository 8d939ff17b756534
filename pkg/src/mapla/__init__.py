"""Samplers for distributions supported on convex bodies.

The package provides the Metropolis-adjusted preconditioned Langevin
algorithm (MAPLA) and the Dikin walk over convex bodies equipped with
self-concordant barrier metrics, together with a catalog of such metrics,
target potentials, sample-quality diagnostics and an experiment CLI.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DimensionMismatch,
    EmptyBatch,
    InitNotInterior,
    NotInterior,
    NotPositiveDefinite,
)
