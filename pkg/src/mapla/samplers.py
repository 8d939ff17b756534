"""MAPLA and DikinWalk samplers over barrier metrics.

One step of the Metropolis-adjusted preconditioned Langevin algorithm from
a point x with metric G and potential f:

1. draw xi ~ N(0, I) and set xi_t = L_x^{-T} xi, where L_x L_x^T = G(x);
2. propose z = (x - h * v_x) + sqrt(2h) * xi_t with the natural gradient
   v_x = G(x)^{-1} grad f(x) (DikinWalk uses v == 0: a geometric random
   walk with the same covariance);
3. reject immediately if z is not strictly inside the body, without
   evaluating f or G at z;
4. otherwise accept with probability exp(min(0, log_ratio)), where the
   log Metropolis ratio is evaluated in the fixed operation order

   (f(x) - f(z)) + 0.5*(logdet G(z) - logdet G(x))
                 + (1/(4h)) * (2h*||xi||^2 - ||L_z^T w||^2),
   w = h*(v_z + v_x) - sqrt(2h)*xi_t.

The operation order is part of the contract: trajectory comparisons
against reference implementations are exact, not tolerance-based.

Every chain owns a counter-based RNG stream keyed by (master_seed, chain
index), so runs are reproducible regardless of how chains are scheduled.
Per step the stream is consumed in a fixed order: the standard normal
vector, then one uniform if (and only if) the Metropolis branch is
reached.  With the optional laziness flag a fair coin precedes both.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InitNotInterior, NotInterior, NotPositiveDefinite

MAPLA = "mapla"
DIKIN_WALK = "dikin"


class Outcome(Enum):
    ACCEPTED = "accepted"
    REJECTED_MH = "rejected_mh"
    REJECTED_OUTSIDE = "rejected_outside"
    REJECTED_NUMERICAL = "rejected_numerical"
    LAZY_STAY = "lazy_stay"


@dataclass(frozen=True)
class Tallies:
    accepted: int = 0
    rejected_mh: int = 0
    rejected_outside: int = 0
    rejected_numerical: int = 0
    lazy_stays: int = 0

    @property
    def proposals(self):
        return (self.accepted + self.rejected_mh
                + self.rejected_outside + self.rejected_numerical)

    def add(self, other):
        return Tallies(self.accepted + other.accepted,
                       self.rejected_mh + other.rejected_mh,
                       self.rejected_outside + other.rejected_outside,
                       self.rejected_numerical + other.rejected_numerical,
                       self.lazy_stays + other.lazy_stays)


@dataclass(frozen=True)
class StepRecord:
    proposal: Optional[np.ndarray]
    outcome: Outcome
    log_ratio: Optional[float]


@dataclass(frozen=True)
class SamplerConfig:
    metric: object
    potential: object
    step_size: float
    algorithm: str = MAPLA
    master_seed: int = 0
    lazy: bool = False

    def __post_init__(self):
        if self.step_size <= 0.0:
            raise ValueError("step size must be positive")
        if self.algorithm not in (MAPLA, DIKIN_WALK):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.metric.body.dim != self.potential.dim:
            raise DimensionMismatch("metric body and potential dimensions differ")


@dataclass(frozen=True)
class ChainState:
    """Current point plus the caches the pipeline reuses between steps.

    Invariants: x is strictly interior; factor holds the Cholesky factor of
    G(x); nat_grad solves G(x) v = grad f(x) (identically zero for
    DikinWalk); logdet and fval are log det G(x) and f(x).
    """

    x: np.ndarray
    factor: linalg.CholFactor
    nat_grad: np.ndarray
    logdet: float
    fval: float
    rng: np.random.Generator
    tallies: Tallies


@dataclass(frozen=True)
class SampleBatch:
    """Points of all chains at one iteration, plus cumulative tallies."""

    iteration: int
    points: np.ndarray
    tallies: Tallies


def make_state(x, config, rng):
    """Build a chain state at x, computing all caches."""
    x = np.asarray(x, dtype=float)
    if not config.metric.body.contains_interior(x):
        raise NotInterior("chain state must start strictly inside the body")
    factor = linalg.cholesky(config.metric.eval(x))
    if config.algorithm == MAPLA:
        nat_grad = linalg.solve_spd(factor, config.potential.grad(x))
    else:
        nat_grad = np.zeros(x.shape[0])
    return ChainState(x=x, factor=factor, nat_grad=nat_grad,
                      logdet=linalg.logdet(factor),
                      fval=config.potential.value(x),
                      rng=rng, tallies=Tallies())


def propose(state, config):
    """Generate the Gaussian proposal; returns (z, xi, xi_t)."""
    h = config.step_size
    xi = state.rng.standard_normal(state.x.shape[0])
    xi_t = linalg.tri_solve(state.factor, xi, transposed=True)
    z = (state.x - h * state.nat_grad) + math.sqrt(2.0 * h) * xi_t
    return z, xi, xi_t


@dataclass(frozen=True)
class ProposalCache:
    """z-side quantities computed inside the acceptance ratio, reusable on
    acceptance."""

    factor: linalg.CholFactor
    nat_grad: np.ndarray
    logdet: float
    fval: float


def log_accept_ratio(state, z, xi, xi_t, config):
    """Log Metropolis-Hastings ratio for the proposal z, plus z-side caches.

    The caller must already have checked that z lies strictly inside the
    body.  Raises NotPositiveDefinite when G(z) fails to factor.
    """
    h = config.step_size
    factor_z = linalg.cholesky(config.metric.eval(z))
    logdet_z = linalg.logdet(factor_z)
    fval_z = config.potential.value(z)
    if config.algorithm == MAPLA:
        nat_grad_z = linalg.solve_spd(factor_z, config.potential.grad(z))
    else:
        nat_grad_z = np.zeros(z.shape[0])
    w = h * (nat_grad_z + state.nat_grad) - math.sqrt(2.0 * h) * xi_t
    rev = linalg.trans_matvec(factor_z, w)
    rev_sq = float(rev @ rev)
    xi_sq = float(xi @ xi)
    ratio = ((state.fval - fval_z)
             + 0.5 * (logdet_z - state.logdet)
             + (0.25 / h) * (2.0 * h * xi_sq - rev_sq))
    return ratio, ProposalCache(factor=factor_z, nat_grad=nat_grad_z,
                                logdet=logdet_z, fval=fval_z)


def _bump(state, **kwargs):
    return replace(state, tallies=replace(state.tallies, **kwargs))


def step(state, config):
    """One Metropolis-adjusted step; returns (new_state, StepRecord)."""
    rng = state.rng
    if config.lazy and rng.random() < 0.5:
        new = _bump(state, lazy_stays=state.tallies.lazy_stays + 1)
        return new, StepRecord(None, Outcome.LAZY_STAY, None)
    z, xi, xi_t = propose(state, config)
    if not config.metric.body.contains_interior(z):
        new = _bump(state, rejected_outside=state.tallies.rejected_outside + 1)
        return new, StepRecord(z, Outcome.REJECTED_OUTSIDE, None)
    try:
        ratio, cache = log_accept_ratio(state, z, xi, xi_t, config)
    except (NotPositiveDefinite, NotInterior):
        # Interior-classified but numerically unusable proposal; treated as
        # a rejection like the outside branch, tallied separately.
        new = _bump(state, rejected_numerical=state.tallies.rejected_numerical + 1)
        return new, StepRecord(z, Outcome.REJECTED_NUMERICAL, None)
    u = rng.random()
    if u <= math.exp(min(0.0, ratio)):
        new = ChainState(x=z, factor=cache.factor, nat_grad=cache.nat_grad,
                         logdet=cache.logdet, fval=cache.fval, rng=rng,
                         tallies=replace(state.tallies,
                                         accepted=state.tallies.accepted + 1))
        return new, StepRecord(z, Outcome.ACCEPTED, ratio)
    new = _bump(state, rejected_mh=state.tallies.rejected_mh + 1)
    return new, StepRecord(z, Outcome.REJECTED_MH, ratio)


class PointMass:
    """Initial distribution: all chains start at the given point."""

    def __init__(self, x):
        self.x = np.asarray(x, dtype=float)

    def draw(self, metric, rng):
        if not metric.body.contains_interior(self.x):
            raise InitNotInterior("initial point is not strictly interior")
        return self.x.copy()


class DikinUniform:
    """Initial distribution: uniform over the Dikin ellipsoid E_center(radius)."""

    def __init__(self, center, radius=0.5, max_tries=200):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.max_tries = int(max_tries)

    def draw(self, metric, rng):
        if not metric.body.contains_interior(self.center):
            raise InitNotInterior("ellipsoid center is not strictly interior")
        factor = linalg.cholesky(metric.eval(self.center))
        d = self.center.shape[0]
        for _ in range(self.max_tries):
            u = rng.standard_normal(d)
            u *= rng.random() ** (1.0 / d) / np.linalg.norm(u)
            y = self.center + self.radius * linalg.tri_solve(factor, u, transposed=True)
            if metric.body.contains_interior(y):
                return y
        raise InitNotInterior("could not draw an interior initial point")


def record_grid(n_iters, record_every):
    """Iterations at which run_chains emits a batch: 0, multiples of the
    stride, and the final iteration."""
    grid = {0, n_iters}
    if record_every:
        grid.update(range(record_every, n_iters + 1, record_every))
    return sorted(grid)


def run_chains(config, n_chains, n_iters, init, record_every=None):
    """Run independent chains and collect batches on the recording grid.

    Chain i consumes the stream keyed by (master_seed, i); output is a
    deterministic function of the configuration alone.
    """
    grid = record_grid(n_iters, record_every)
    grid_set = set(grid)
    d = config.metric.body.dim
    points = {k: np.empty((n_chains, d)) for k in grid}
    tallies = {k: Tallies() for k in grid}
    for i in range(n_chains):
        rng = linalg.chain_rng(config.master_seed, i)
        state = make_state(init.draw(config.metric, rng), config, rng)
        if 0 in grid_set:
            points[0][i] = state.x
        for k in range(1, n_iters + 1):
            state, _ = step(state, config)
            if k in grid_set:
                points[k][i] = state.x
                tallies[k] = tallies[k].add(state.tallies)
    if 0 in grid_set:
        tallies[0] = Tallies()
    return [SampleBatch(k, points[k], tallies[k]) for k in grid]


def recommend_step_size(regime, d, lam=0.0, beta=0.0, alpha=4.0,
                        M=None, delta=None, c1=1.0):
    """Step-size upper bound from the mixing-time theory.

    regime "sc"   : c1 * min{d^-3, (d lam)^-1, beta^-2, beta^-2/3,
                             (beta lam)^-2/3}
    regime "scpp" : c1 * min{(d beta)^-1, (d lam)^-1, (d (alpha+4))^-1,
                             beta^-2, (beta (alpha+4))^-2/3,
                             (beta lam)^-2/3}
    regime "exp"  : c1 / (d^2 log^2(M / delta))

    Terms whose parameter is zero would divide by zero and are dropped from
    the min.  The theory fixes only the shape; c1 is caller-supplied.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if lam < 0 or beta < 0 or alpha < 0:
        raise ValueError("parameters must be nonnegative")
    if regime == "sc":
        terms = [float(d) ** -3]
        if lam > 0:
            terms.append(1.0 / (d * lam))
        if beta > 0:
            terms.append(beta ** -2)
            terms.append(beta ** (-2.0 / 3.0))
        if beta > 0 and lam > 0:
            terms.append((beta * lam) ** (-2.0 / 3.0))
    elif regime == "scpp":
        terms = [1.0 / (d * (alpha + 4.0))]
        if beta > 0:
            terms.append(1.0 / (d * beta))
            terms.append(beta ** -2)
            terms.append((beta * (alpha + 4.0)) ** (-2.0 / 3.0))
        if lam > 0:
            terms.append(1.0 / (d * lam))
        if beta > 0 and lam > 0:
            terms.append((beta * lam) ** (-2.0 / 3.0))
    elif regime == "exp":
        if M is None or delta is None:
            raise ValueError("regime 'exp' requires M and delta")
        if not 0 < delta < M:
            raise ValueError("need 0 < delta < M")
        return c1 / (d * d * math.log(M / delta) ** 2)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return c1 * min(terms)
