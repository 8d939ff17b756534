"""Barrier metrics over convex bodies and their property checkers."""

from .bodies import (  # noqa: F401
    Box,
    ConvexBody,
    Ellipsoid,
    EntropicBallExtended,
    EpigraphQuadratic,
    LiftedQuadratic,
    LpBallExtended,
    Polytope,
    ProductBody,
    Simplex,
    exit_radius,
    load_polytope,
)
from .catalog import (  # noqa: F401
    DikinEllipsoid,
    Metric,
    box_logbarrier,
    direct_sum,
    ellipsoid_barrier,
    entropic_ball_extended,
    epigraph_quadratic_barrier,
    lift_quadratic,
    lp_ball_extended,
    polytope_logbarrier,
    simplex_logbarrier,
    vaidya,
)
from .checks import (  # noqa: F401
    CheckReport,
    SymmetryReport,
    check_average_self_concordance,
    check_curvature_bounds,
    check_gradient_bound,
    check_lower_trace,
    check_self_concordance,
    check_strong_self_concordance,
    corrupt_metric,
    dikin_contains,
    probe_points,
    symmetry_probe,
)
