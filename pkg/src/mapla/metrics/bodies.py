"""Convex bodies with closed and strict-interior membership oracles.

Membership tests use exact arithmetic comparisons with zero slack
tolerance: ``contains`` uses closed inequalities, ``contains_interior``
strict ones.  Samplers reject boundary points conservatively, which is
harmless since the boundary has measure zero.
"""

import json

import numpy as np

from ..errors import DimensionMismatch


class ConvexBody:
    """Base class: a convex subset of R^d with membership oracles."""

    dim = None

    def contains(self, x):
        raise NotImplementedError

    def contains_interior(self, x):
        raise NotImplementedError

    def interior_point(self):
        """A canonical strictly interior point, when one is known."""
        raise NotImplementedError(f"{type(self).__name__} has no canonical interior point")

    def _check_dim(self, x):
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point of shape {x.shape} in body of dim {self.dim}")


class Polytope(ConvexBody):
    """{x : A x <= b} for an (m, d) matrix A with m >= d.

    ``center`` is an optional user-supplied interior point (no LP is run
    to find one).
    """

    def __init__(self, A, b, center=None):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.A.ndim != 2 or self.b.shape != (self.A.shape[0],):
            raise DimensionMismatch("A must be (m, d) and b of length m")
        self.dim = self.A.shape[1]
        self.center = None if center is None else np.asarray(center, dtype=float)

    def contains(self, x):
        return bool(np.all(self.A @ x <= self.b))

    def contains_interior(self, x):
        return bool(np.all(self.A @ x < self.b))

    def slack(self, x):
        return self.b - self.A @ x

    def interior_point(self):
        if self.center is None:
            raise NotImplementedError("polytope has no user-supplied interior point")
        return self.center


class Box(ConvexBody):
    """Axis-aligned box {x : lo <= x <= hi}."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise DimensionMismatch("lo and hi must be vectors of equal length")
        if np.any(self.lo >= self.hi):
            raise ValueError("box must have nonempty interior")
        self.dim = self.lo.shape[0]

    def contains(self, x):
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def contains_interior(self, x):
        return bool(np.all(x > self.lo) and np.all(x < self.hi))

    def interior_point(self):
        return 0.5 * (self.lo + self.hi)

    def as_polytope(self):
        d = self.dim
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([self.hi, -self.lo])
        return Polytope(A, b, center=self.interior_point())


class Simplex(ConvexBody):
    """{x in R_+^d : sum(x) <= 1}, the simplex as a full-dimensional subset of R^d."""

    def __init__(self, dim):
        self.dim = int(dim)

    def contains(self, x):
        return bool(np.all(x >= 0.0) and x.sum() <= 1.0)

    def contains_interior(self, x):
        return bool(np.all(x > 0.0) and x.sum() < 1.0)

    def interior_point(self):
        return np.full(self.dim, 1.0 / (self.dim + 1))

    def as_polytope(self):
        d = self.dim
        A = np.vstack([-np.eye(d), np.ones((1, d))])
        b = np.concatenate([np.zeros(d), [1.0]])
        return Polytope(A, b, center=self.interior_point())


class Ellipsoid(ConvexBody):
    """{x : ||x - c||_D^2 <= 1} with D symmetric positive definite."""

    def __init__(self, c, D):
        self.c = np.asarray(c, dtype=float)
        self.D = np.asarray(D, dtype=float)
        self.dim = self.c.shape[0]
        if self.D.shape != (self.dim, self.dim):
            raise DimensionMismatch("D must be (d, d)")

    def _quad(self, x):
        r = x - self.c
        return float(r @ (self.D @ r))

    def contains(self, x):
        return self._quad(x) <= 1.0

    def contains_interior(self, x):
        return self._quad(x) < 1.0

    def interior_point(self):
        return self.c.copy()


class EpigraphQuadratic(ConvexBody):
    """{(x, t) : ||x - c||_D^2 <= t}, the epigraph of a quadratic on R^{d+1}.

    This is the domain produced by lifting one quadratic potential term.
    """

    def __init__(self, c, D):
        self.c = np.asarray(c, dtype=float)
        self.D = np.asarray(D, dtype=float)
        self.base_dim = self.c.shape[0]
        self.dim = self.base_dim + 1

    def _slack(self, y):
        r = y[:-1] - self.c
        return y[-1] - float(r @ (self.D @ r))

    def contains(self, y):
        return self._slack(y) >= 0.0

    def contains_interior(self, y):
        return self._slack(y) > 0.0

    def interior_point(self):
        return np.concatenate([self.c, [1.0]])


class LpBallExtended(ConvexBody):
    """Extended-domain representation of the unit lp ball.

    Points are (x, v) in R^{2d} with |x_i|^p <= v_i for each i and
    sum(v) <= 1; the x-marginal of the body is the lp ball.
    """

    def __init__(self, p, base_dim):
        if p < 1:
            raise ValueError("p must be >= 1")
        self.p = float(p)
        self.base_dim = int(base_dim)
        self.dim = 2 * self.base_dim

    def _split(self, y):
        return y[: self.base_dim], y[self.base_dim:]

    def contains(self, y):
        x, v = self._split(y)
        return bool(np.all(np.abs(x) ** self.p <= v) and v.sum() <= 1.0)

    def contains_interior(self, y):
        x, v = self._split(y)
        return bool(np.all(v > 0.0)
                    and np.all(np.abs(x) ** self.p < v)
                    and v.sum() < 1.0)

    def interior_point(self):
        d = self.base_dim
        return np.concatenate([np.zeros(d), np.full(d, 0.5 / d)])


class EntropicBallExtended(ConvexBody):
    """Extended domain for the entropic ball {x in R_+^d : sum x_i log x_i <= 1}.

    Points are (x, v) with x_i > 0, x_i log x_i <= v_i and sum(v) <= 1.
    """

    def __init__(self, base_dim):
        self.base_dim = int(base_dim)
        self.dim = 2 * self.base_dim

    def _split(self, y):
        return y[: self.base_dim], y[self.base_dim:]

    def contains(self, y):
        x, v = self._split(y)
        if not np.all(x > 0.0):
            return False
        return bool(np.all(x * np.log(x) <= v) and v.sum() <= 1.0)

    def contains_interior(self, y):
        x, v = self._split(y)
        if not np.all(x > 0.0):
            return False
        return bool(np.all(x * np.log(x) < v) and v.sum() < 1.0)

    def interior_point(self):
        d = self.base_dim
        # x = 1 gives x log x = 0 < v_i for any positive v.
        return np.concatenate([np.ones(d), np.full(d, 0.5 / d)])


class ProductBody(ConvexBody):
    """Cartesian product of bodies; coordinates are concatenated."""

    def __init__(self, bodies):
        self.bodies = list(bodies)
        if not self.bodies:
            raise ValueError("product of zero bodies")
        self.dim = sum(b.dim for b in self.bodies)
        self._offsets = np.cumsum([0] + [b.dim for b in self.bodies])

    def _parts(self, x):
        return [x[self._offsets[i]: self._offsets[i + 1]]
                for i in range(len(self.bodies))]

    def contains(self, x):
        return all(b.contains(p) for b, p in zip(self.bodies, self._parts(x)))

    def contains_interior(self, x):
        return all(b.contains_interior(p) for b, p in zip(self.bodies, self._parts(x)))

    def interior_point(self):
        return np.concatenate([b.interior_point() for b in self.bodies])


class LiftedQuadratic(ConvexBody):
    """Lifted domain {(x, t) : x in base, ||x - c||_D^2 <= t}."""

    def __init__(self, base, c, D):
        self.base = base
        self.epigraph = EpigraphQuadratic(c, D)
        if self.epigraph.base_dim != base.dim:
            raise DimensionMismatch("quadratic term dimension does not match base body")
        self.dim = base.dim + 1

    def contains(self, y):
        return self.base.contains(y[:-1]) and self.epigraph.contains(y)

    def contains_interior(self, y):
        return self.base.contains_interior(y[:-1]) and self.epigraph.contains_interior(y)

    def interior_point(self):
        x = self.base.interior_point()
        r = x - self.epigraph.c
        return np.concatenate([x, [float(r @ (self.epigraph.D @ r)) + 1.0]])


def exit_radius(body, x, direction, cap=1e8, tol=1e-12, max_doublings=200):
    """Largest rho with x + rho * direction strictly inside the body.

    Found by doubling until exit then bisection; returns ``cap`` if the ray
    never leaves the body within the cap.
    """
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    lo = 0.0
    hi = 1.0
    n = 0
    while body.contains_interior(x + hi * direction):
        lo = hi
        hi *= 2.0
        n += 1
        if hi >= cap or n >= max_doublings:
            return cap
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if body.contains_interior(x + mid * direction):
            lo = mid
        else:
            hi = mid
    return lo


def load_polytope(path):
    """Read a polytope from a JSON file {"A": [[...]], "b": [...]}.

    An optional "center" entry supplies an interior point.
    """
    with open(path) as fh:
        data = json.load(fh)
    return Polytope(np.asarray(data["A"], dtype=float),
                    np.asarray(data["b"], dtype=float),
                    center=data.get("center"))
