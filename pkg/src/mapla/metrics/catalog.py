"""Catalog of barrier metrics G : int(K) -> SPD matrices.

Each constructor returns a :class:`Metric` bundling the body, the matrix
evaluator and, when the metric is the Hessian of a closed-form scalar
barrier, that barrier itself (used by finite-difference validation).
Evaluators raise :class:`~mapla.errors.NotInterior` outside the interior
of the body.

Two further reweighted polytope metrics are deliberately not implemented
because their weights are defined through an inner optimization problem
rather than a closed form (both use the slack-normalized rows A_x of the
polytope):

* John metric: w = argmin_{w >= 0} log det(A_x^T W A_x) s.t. 1^T w = m;
* p-Lewis-weights metric:
  w = argmax_{w >= 0} -log det(A_x^T W^{1-2/p} A_x) + (1 - 2/p) 1^T w,

with W = diag(w).  The Vaidya metric below covers the reweighted family
with an explicit leverage-score formula.
"""

from dataclasses import dataclass

import numpy as np

from .. import linalg
from ..errors import DimensionMismatch, NotInterior
from . import bodies as _bodies


class Metric:
    """An evaluatable map x -> G(x) over the interior of a convex body.

    Parameters
    ----------
    body : ConvexBody
        The domain; ``eval`` is defined on its interior.
    eval_fn : callable
        Maps a point to a dense symmetric positive definite matrix.
    kind : str
        Tag documenting which barrier family the metric comes from.
    barrier : callable, optional
        Scalar barrier whose Hessian ``eval_fn`` computes, when available.
    """

    def __init__(self, body, eval_fn, kind, barrier=None):
        self.body = body
        self._eval_fn = eval_fn
        self.kind = kind
        self.barrier = barrier

    @property
    def dim(self):
        return self.body.dim

    def eval(self, x):
        return self._eval_fn(np.asarray(x, dtype=float))

    def __repr__(self):
        return f"Metric(kind={self.kind!r}, dim={self.dim})"


@dataclass(frozen=True)
class DikinEllipsoid:
    """E_x(r) = {y : ||y - x||_{G(x)} < r}, realized through the factor of G(x)."""

    center: np.ndarray
    radius: float
    factor: linalg.CholFactor

    def contains(self, y):
        return metric_norm(self.factor, y - self.center) < self.radius


def metric_norm(factor, v):
    """||v||_G = ||L.T v|| for the Cholesky factor L of G."""
    return float(np.linalg.norm(linalg.trans_matvec(factor, v)))


def polytope_logbarrier(A, b, w=None):
    """Weighted log-barrier metric of the polytope {Ax <= b}.

    G(x) = sum_i w_i a_i a_i^T / (b_i - a_i^T x)^2, with unit weights by
    default, in which case it is the Hessian of -sum_i log(b_i - a_i^T x).
    """
    body = _bodies.Polytope(A, b)
    A = body.A
    b = body.b
    if w is not None:
        w = np.asarray(w, dtype=float)
        if w.shape != (A.shape[0],):
            raise DimensionMismatch("weights must have one entry per constraint")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")

    def eval_fn(x):
        slack = b - A @ x
        if np.any(slack <= 0.0):
            raise NotInterior("point violates a polytope constraint")
        Ax = A / slack[:, None]
        if w is None:
            return Ax.T @ Ax
        return (Ax.T * w) @ Ax

    def barrier(x):
        slack = b - A @ x
        if np.any(slack <= 0.0):
            raise NotInterior("point violates a polytope constraint")
        logs = np.log(slack)
        return -float(logs.sum() if w is None else w @ logs)

    return Metric(body, eval_fn, "polytope-logbarrier", barrier)


def box_logbarrier(lo, hi):
    """Log-barrier metric of an axis-aligned box; diagonal evaluation."""
    body = _bodies.Box(lo, hi)
    lo = body.lo
    hi = body.hi

    def eval_fn(x):
        up = hi - x
        dn = x - lo
        if np.any(up <= 0.0) or np.any(dn <= 0.0):
            raise NotInterior("point outside the box")
        return np.diag(1.0 / (up * up) + 1.0 / (dn * dn))

    def barrier(x):
        up = hi - x
        dn = x - lo
        if np.any(up <= 0.0) or np.any(dn <= 0.0):
            raise NotInterior("point outside the box")
        return -float(np.log(up).sum() + np.log(dn).sum())

    return Metric(body, eval_fn, "box-logbarrier", barrier)


def simplex_logbarrier(dim):
    """Log-barrier metric of the simplex {x >= 0, sum(x) <= 1}.

    G(x) = diag(1/x_i^2) + 11^T / (1 - sum x)^2, assembled directly.
    """
    body = _bodies.Simplex(dim)
    idx = np.arange(dim)

    def eval_fn(x):
        s = 1.0 - x.sum()
        if s <= 0.0 or np.any(x <= 0.0):
            raise NotInterior("point outside the simplex")
        G = np.full((dim, dim), 1.0 / (s * s))
        G[idx, idx] += 1.0 / (x * x)
        return G

    def barrier(x):
        s = 1.0 - x.sum()
        if s <= 0.0 or np.any(x <= 0.0):
            raise NotInterior("point outside the simplex")
        return -float(np.log(x).sum() + np.log(s))

    return Metric(body, eval_fn, "simplex-logbarrier", barrier)


def vaidya(A, b):
    """Vaidya metric of a polytope: leverage-score-reweighted log-barrier.

    G(x) = A_x^T W A_x with w_i = d/m + sigma_i(x), where sigma_i is the
    leverage score of the i-th slack-normalized row of A.  Leverage scores
    are computed through the Cholesky factor of A_x^T A_x.
    """
    body = _bodies.Polytope(A, b)
    A = body.A
    b = body.b
    m, d = A.shape

    def eval_fn(x):
        slack = b - A @ x
        if np.any(slack <= 0.0):
            raise NotInterior("point violates a polytope constraint")
        Ax = A / slack[:, None]
        H = Ax.T @ Ax
        Y = linalg.tri_solve(linalg.cholesky(H), Ax.T)
        sigma = np.einsum("ij,ij->j", Y, Y)
        w = d / m + sigma
        return (Ax.T * w) @ Ax

    return Metric(body, eval_fn, "vaidya")


def leverage_scores(A, b, x):
    """Leverage scores sigma_i(x) of the slack-normalized polytope rows."""
    slack = b - A @ x
    if np.any(slack <= 0.0):
        raise NotInterior("point violates a polytope constraint")
    Ax = A / slack[:, None]
    Y = linalg.tri_solve(linalg.cholesky(Ax.T @ Ax), Ax.T)
    return np.einsum("ij,ij->j", Y, Y)


def ellipsoid_barrier(c, D):
    """Hessian of -log(1 - ||x - c||_D^2) over the ellipsoid body.

    With slack s: G(x) = 2 D / s + 4 D (x-c)(x-c)^T D / s^2.
    """
    body = _bodies.Ellipsoid(c, D)
    c = body.c
    D = body.D

    def eval_fn(x):
        r = x - c
        g = D @ r
        s = 1.0 - float(r @ g)
        if s <= 0.0:
            raise NotInterior("point outside the ellipsoid")
        return (2.0 / s) * D + (4.0 / (s * s)) * np.outer(g, g)

    def barrier(x):
        r = x - c
        s = 1.0 - float(r @ (D @ r))
        if s <= 0.0:
            raise NotInterior("point outside the ellipsoid")
        return -float(np.log(s))

    return Metric(body, eval_fn, "ellipsoid-logbarrier", barrier)


def epigraph_quadratic_barrier(c, D):
    """Hessian of -log(t - ||x - c||_D^2) over the quadratic epigraph.

    The (d+1)-dimensional bordered matrix is assembled from the slack
    gradient [-2 D (x-c); 1]:
    G = outer(grad s, grad s) / s^2 + (2 D / s) padded with a zero row/col.
    """
    body = _bodies.EpigraphQuadratic(c, D)
    c = body.c
    D = body.D
    d = body.base_dim

    def eval_fn(y):
        x = y[:d]
        r = x - c
        g = D @ r
        s = y[d] - float(r @ g)
        if s <= 0.0:
            raise NotInterior("point below the quadratic epigraph")
        gs = np.concatenate([-2.0 * g, [1.0]])
        G = np.outer(gs, gs) / (s * s)
        G[:d, :d] += (2.0 / s) * D
        return G

    def barrier(y):
        r = y[:d] - c
        s = y[d] - float(r @ (D @ r))
        if s <= 0.0:
            raise NotInterior("point below the quadratic epigraph")
        return -float(np.log(s))

    return Metric(body, eval_fn, "epigraph-quadratic", barrier)


def _two_dim_lp_block(y, t, q):
    """Hessian of -log t - log(t^q - y^2) at a 2-D point, q = 2/p."""
    s = t ** q - y * y
    if t <= 0.0 or s <= 0.0:
        raise NotInterior("2-D lp-cone constraint violated")
    tq1 = q * t ** (q - 1.0)
    a = 2.0 / s + 4.0 * y * y / (s * s)
    b = -2.0 * y * tq1 / (s * s)
    cc = 1.0 / (t * t) - q * (q - 1.0) * t ** (q - 2.0) / s + tq1 * tq1 / (s * s)
    return a, b, cc


def lp_ball_extended(p, base_dim):
    """Metric for the extended-domain lp ball in R^{2d}.

    Sum of d two-dimensional cone barriers -log v_i - log(v_i^{2/p} - x_i^2)
    (interleaved by the grouping permutation) and the halfspace barrier of
    {sum v <= 1} acting on the v block.
    """
    body = _bodies.LpBallExtended(p, base_dim)
    d = body.base_dim
    q = 2.0 / body.p

    def eval_fn(yv):
        x = yv[:d]
        v = yv[d:]
        sv = 1.0 - v.sum()
        if sv <= 0.0:
            raise NotInterior("halfspace constraint sum(v) < 1 violated")
        G = np.zeros((2 * d, 2 * d))
        for i in range(d):
            a, b, cc = _two_dim_lp_block(x[i], v[i], q)
            G[i, i] = a
            G[i, d + i] = b
            G[d + i, i] = b
            G[d + i, d + i] = cc
        G[d:, d:] += 1.0 / (sv * sv)
        return G

    def barrier(yv):
        x = yv[:d]
        v = yv[d:]
        sv = 1.0 - v.sum()
        s = v ** q - x * x
        if sv <= 0.0 or np.any(v <= 0.0) or np.any(s <= 0.0):
            raise NotInterior("extended lp-ball constraint violated")
        return -float(np.log(v).sum() + np.log(s).sum() + np.log(sv))

    return Metric(body, eval_fn, f"lp-ball-extended(p={body.p})", barrier)


def entropic_ball_extended(base_dim):
    """Metric for the extended entropic ball in R^{2d}.

    Sum of d barriers -log x_i - log(v_i - x_i log x_i) and the halfspace
    barrier of {sum v <= 1}.
    """
    body = _bodies.EntropicBallExtended(base_dim)
    d = body.base_dim

    def eval_fn(yv):
        x = yv[:d]
        v = yv[d:]
        sv = 1.0 - v.sum()
        if sv <= 0.0 or np.any(x <= 0.0):
            raise NotInterior("extended entropic-ball constraint violated")
        lx = np.log(x)
        s = v - x * lx
        if np.any(s <= 0.0):
            raise NotInterior("extended entropic-ball constraint violated")
        G = np.zeros((2 * d, 2 * d))
        one_lx = 1.0 + lx
        a = 1.0 / (x * x) + 1.0 / (x * s) + (one_lx / s) ** 2
        b = -one_lx / (s * s)
        cc = 1.0 / (s * s)
        idx = np.arange(d)
        G[idx, idx] = a
        G[idx, d + idx] = b
        G[d + idx, idx] = b
        G[d + idx, d + idx] = cc
        G[d:, d:] += 1.0 / (sv * sv)
        return G

    def barrier(yv):
        x = yv[:d]
        v = yv[d:]
        sv = 1.0 - v.sum()
        if sv <= 0.0 or np.any(x <= 0.0):
            raise NotInterior("extended entropic-ball constraint violated")
        s = v - x * np.log(x)
        if np.any(s <= 0.0):
            raise NotInterior("extended entropic-ball constraint violated")
        return -float(np.log(x).sum() + np.log(s).sum() + np.log(sv))

    return Metric(body, eval_fn, "entropic-ball-extended", barrier)


def direct_sum(metrics):
    """Block-diagonal combination of metrics over the product body."""
    metrics = list(metrics)
    body = _bodies.ProductBody([m.body for m in metrics])
    offsets = body._offsets

    def eval_fn(x):
        G = np.zeros((body.dim, body.dim))
        for m, lo, hi in zip(metrics, offsets[:-1], offsets[1:]):
            G[lo:hi, lo:hi] = m.eval(x[lo:hi])
        return G

    barrier = None
    if all(m.barrier is not None for m in metrics):
        def barrier(x):
            return sum(m.barrier(x[lo:hi])
                       for m, lo, hi in zip(metrics, offsets[:-1], offsets[1:]))

    return Metric(body, eval_fn, "direct-sum", barrier)


def lift_quadratic(c, D, base):
    """Metric for the lifted domain of one quadratic potential term.

    The lifted body is {(x, t) : x in base body, ||x - c||_D^2 <= t}; the
    metric is the base metric on the x block plus the quadratic-epigraph
    barrier Hessian on (x, t).
    """
    body = _bodies.LiftedQuadratic(base.body, c, D)
    epi = epigraph_quadratic_barrier(c, D)
    d = base.body.dim

    def eval_fn(y):
        G = epi.eval(y)
        G[:d, :d] += base.eval(y[:d])
        return G

    barrier = None
    if base.barrier is not None:
        def barrier(y):
            return base.barrier(y[:d]) + epi.barrier(y)

    return Metric(body, eval_fn, "lifted-quadratic", barrier)


def constant_metric(body, S):
    """Position-independent metric returning a fixed SPD matrix.

    Handy for reductions: the identity matrix over a huge box turns the
    preconditioned samplers into their classical Euclidean counterparts.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (body.dim, body.dim):
        raise DimensionMismatch("matrix does not match body dimension")

    def eval_fn(x):
        if not body.contains_interior(x):
            raise NotInterior("point outside the body")
        return S.copy()

    return Metric(body, eval_fn, "constant")
