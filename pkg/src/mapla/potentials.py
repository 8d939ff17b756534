"""Target potentials f with gradients and curvature metadata.

A potential is the negative log-density of the target up to an additive
constant.  Evaluation outside the interior of the support raises
:class:`~mapla.errors.NotInterior` rather than returning infinity: the
samplers test membership before ever evaluating f at a proposal.

Curvature metadata (mu, lambda, beta) is advisory and relative to a named
metric; the step-size recommender consumes it, the samplers never require
it.
"""

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch, NotInterior


@dataclass(frozen=True)
class CurvatureInfo:
    """Claimed (mu, lambda, beta) bounds relative to the named metric kind."""

    mu: float
    lam: float
    beta: float
    metric_kind: str


@dataclass(frozen=True)
class Potential:
    dim: int
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    metadata: Optional[CurvatureInfo] = None
    kind: str = "custom"


@dataclass(frozen=True)
class DirichletParams:
    """Concentration parameters a in R^{d+1} with a_i > -1."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        object.__setattr__(self, "a", a)
        if a.ndim != 1 or a.shape[0] < 2:
            raise DimensionMismatch("a must be a vector of length d + 1 >= 2")
        if np.any(a <= -1.0):
            raise ValueError("Dirichlet parameters must satisfy a_i > -1")

    @property
    def log_concave(self):
        return bool(np.all(self.a >= 0.0))


def dirichlet_potential(a):
    """Dirichlet potential on the simplex {x >= 0, sum(x) <= 1}.

    f(x) = -sum_i a_i log x_i - a_{d+1} log(1 - sum x), for a in R^{d+1}.
    Relative to the simplex log-barrier it carries an (a_min, a_max, ||a||)
    curvature/gradient profile.
    """
    params = a if isinstance(a, DirichletParams) else DirichletParams(np.asarray(a, dtype=float))
    a = params.a
    d = a.shape[0] - 1
    a_head = a[:d]
    a_tail = a[d]

    def _slack(x):
        s = 1.0 - x.sum()
        if s <= 0.0 or np.any(x <= 0.0):
            raise NotInterior("point outside the simplex")
        return s

    def value(x):
        s = _slack(x)
        return -float(a_head @ np.log(x)) - a_tail * float(np.log(s))

    def grad(x):
        s = _slack(x)
        return -a_head / x + a_tail / s

    def hess(x):
        s = _slack(x)
        H = np.full((d, d), a_tail / (s * s))
        idx = np.arange(d)
        H[idx, idx] += a_head / (x * x)
        return H

    meta = CurvatureInfo(mu=float(a.min()), lam=float(a.max()),
                         beta=float(np.linalg.norm(a)),
                         metric_kind="simplex-logbarrier")
    return Potential(dim=d, value=value, grad=grad, hess=hess,
                     metadata=meta, kind="dirichlet")


def linear_potential(sigma):
    """f(x) = sigma^T x; the exponential-density potential."""
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    zero = np.zeros((d, d))

    def value(x):
        return float(sigma @ x)

    def grad(x):
        return sigma.copy()

    meta = CurvatureInfo(mu=0.0, lam=0.0, beta=float("nan"), metric_kind="any")
    return Potential(dim=d, value=value, grad=grad, hess=lambda x: zero.copy(),
                     metadata=meta, kind="linear")


def uniform_potential(dim):
    """f identically zero: the uniform distribution over the body."""
    pot = linear_potential(np.zeros(dim))
    return Potential(dim=dim, value=pot.value, grad=pot.grad, hess=pot.hess,
                     metadata=pot.metadata, kind="uniform")


@dataclass(frozen=True)
class BlrData:
    """Logistic-regression data: covariates X (n, d) and binary labels y (n,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DimensionMismatch("X must be a nonempty (n, d) matrix")
        if y.shape != (X.shape[0],):
            raise DimensionMismatch("y must have one label per row of X")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("labels must be binary")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]


def blr_potential(data):
    """Bayesian logistic regression negative log-likelihood.

    f(theta) = -sum_i (y_i <theta, X_i> - log(1 + exp<theta, X_i>)),
    evaluated with log1p-style stable softplus so margins of +-50 do not
    overflow.  Restriction to the parameter polytope is handled by the
    sampler's membership test, not here.
    """
    X = data.X
    y = data.y

    def value(theta):
        m = X @ theta
        return float(np.logaddexp(0.0, m).sum() - y @ m)

    def grad(theta):
        m = X @ theta
        return X.T @ (expit(m) - y)

    def hess(theta):
        m = X @ theta
        p = expit(m)
        return (X.T * (p * (1.0 - p))) @ X

    return Potential(dim=data.dim, value=value, grad=grad, hess=hess, kind="blr")


def quadratic_potential(c, D, scale):
    """f(x) = scale * ||x - c||_D^2; a (possibly truncated) Gaussian potential."""
    c = np.asarray(c, dtype=float)
    D = np.asarray(D, dtype=float)
    d = c.shape[0]
    if D.shape != (d, d):
        raise DimensionMismatch("D must be (d, d)")
    scale = float(scale)

    def value(x):
        r = x - c
        return scale * float(r @ (D @ r))

    def grad(x):
        return 2.0 * scale * (D @ (x - c))

    def hess(x):
        return 2.0 * scale * D.copy()

    return Potential(dim=d, value=value, grad=grad, hess=hess, kind="quadratic")


def lifted_linear_potential(dim):
    """Potential of a lifted target: zero on x, unit weight on the last
    (epigraph) coordinate."""
    sigma = np.zeros(dim + 1)
    sigma[-1] = 1.0
    pot = linear_potential(sigma)
    return Potential(dim=dim + 1, value=pot.value, grad=pot.grad, hess=pot.hess,
                     metadata=pot.metadata, kind="lifted-linear")


def load_blr_csv(path):
    """Read a BLR dataset from CSV: d feature columns then a label column."""
    rows = []
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            if row:
                rows.append([float(v) for v in row])
    if not rows:
        raise ValueError(f"no data rows in {path}")
    arr = np.asarray(rows, dtype=float)
    del header
    return BlrData(X=arr[:, :-1], y=arr[:, -1])
