"""Executable property checks for barrier metrics and potentials.

Each checker probes one of the regularity notions that back the samplers'
step-size theory at a single point (and direction, where applicable):

* self-concordance: |D G(x)[v,v,v]| <= 2 ||v||_G^3
* strong self-concordance: ||G^{-1/2} DG(x)[v] G^{-1/2}||_F <= 2 ||v||_G
* lower trace self-concordance: trace(G^{-1} D^2 G(x)[v,v]) >= -alpha ||v||_G^2
* average self-concordance: a Monte-Carlo tail estimate for Dikin proposals
* curvature bounds: mu G <= hess f <= lambda G via a tolerant Cholesky
* gradient bound: ||grad f||_{G^{-1}} <= beta

Directional derivatives of G are approximated by central differences along
v with a step proportional to the distance to the boundary, so these are
probes rather than certificates.
"""

import math
from typing import NamedTuple

import numpy as np

from .. import linalg
from ..errors import NotInterior, NotPositiveDefinite
from .bodies import exit_radius
from .catalog import Metric, metric_norm


class CheckReport(NamedTuple):
    name: str
    lhs: float
    rhs: float
    passed: bool


class SymmetryReport(NamedTuple):
    nu_hat: float
    min_exit_gnorm: float
    n_dirs: int


def default_fd_step(metric, x, v, scale=1e-4):
    """Central-difference step along v: ``scale`` times the distance of x to
    the boundary along +-v, capped at ``scale`` (metric curvature explodes
    near the boundary)."""
    dist = min(exit_radius(metric.body, x, v, cap=1.0),
               exit_radius(metric.body, x, -v, cap=1.0))
    return scale * min(dist, 1.0)


def _dG(metric, x, v, h):
    """Central-difference directional derivative of G at x along v."""
    return (metric.eval(x + h * v) - metric.eval(x - h * v)) / (2.0 * h)


def check_self_concordance(metric, x, v, h_fd=None, tol_rel=1e-3, tol_abs=1e-12):
    """|D G(x)[v,v,v]| <= 2 ||v||_G^3, via differences of v^T G(.) v along v."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    G = metric.eval(x)
    vGv = float(v @ (G @ v))
    if vGv == 0.0:
        return CheckReport("self-concordance", 0.0, 0.0, True)
    if h_fd is None:
        h_fd = default_fd_step(metric, x, v)
    psi_p = float(v @ (metric.eval(x + h_fd * v) @ v))
    psi_m = float(v @ (metric.eval(x - h_fd * v) @ v))
    lhs = abs(psi_p - psi_m) / (2.0 * h_fd)
    rhs = 2.0 * vGv ** 1.5
    return CheckReport("self-concordance", lhs, rhs,
                       lhs <= rhs * (1.0 + tol_rel) + tol_abs)


def check_strong_self_concordance(metric, x, v, h_fd=None, tol_rel=1e-3, tol_abs=1e-12):
    """||G^{-1/2} DG(x)[v] G^{-1/2}||_F <= 2 ||v||_G."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    factor = linalg.cholesky(metric.eval(x))
    nv = metric_norm(factor, v)
    if nv == 0.0:
        return CheckReport("strong-self-concordance", 0.0, 0.0, True)
    if h_fd is None:
        h_fd = default_fd_step(metric, x, v)
    M = _dG(metric, x, v, h_fd)
    W = linalg.tri_solve(factor, M)
    B = linalg.tri_solve(factor, W.T)
    lhs = float(np.linalg.norm(B))
    rhs = 2.0 * nv
    return CheckReport("strong-self-concordance", lhs, rhs,
                       lhs <= rhs * (1.0 + tol_rel) + tol_abs)


def check_lower_trace(metric, x, v, h_fd=None, alpha=4.0, tol_rel=1e-3, tol_abs=1e-9):
    """trace(G^{-1} D^2 G(x)[v,v]) >= -alpha ||v||_G^2, via second differences.

    The default alpha = 4 is a working value: the sources assert this
    property for the shipped metrics without per-metric constants.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    G = metric.eval(x)
    factor = linalg.cholesky(G)
    nv2 = metric_norm(factor, v) ** 2
    if nv2 == 0.0:
        return CheckReport("lower-trace", 0.0, 0.0, True)
    if h_fd is None:
        # Second differences lose more bits to cancellation than first
        # differences, so the step is two decades larger.
        h_fd = default_fd_step(metric, x, v, scale=1e-2)
    M2 = (metric.eval(x + h_fd * v) - 2.0 * G + metric.eval(x - h_fd * v)) / (h_fd * h_fd)
    W = linalg.tri_solve(factor, M2)
    B = linalg.tri_solve(factor, W.T)
    lhs = float(np.trace(B))
    rhs = -alpha * nv2
    return CheckReport("lower-trace", lhs, rhs,
                       lhs >= rhs * (1.0 + tol_rel) - tol_abs)


def _psd_min_pivot(M):
    """Tolerant Cholesky: min pivot seen and whether M is PSD up to
    -1e-10 * ||M||_F.  Near-zero pivots are treated as exact zeros when the
    remaining column is consistently small."""
    A = np.array(M, dtype=float)
    d = A.shape[0]
    nrm = float(np.linalg.norm(A))
    tol = 1e-10 * nrm
    min_pivot = math.inf
    for j in range(d):
        piv = A[j, j]
        min_pivot = min(min_pivot, piv)
        if piv <= tol:
            if piv < -tol:
                return min_pivot, tol, False
            if j + 1 < d and np.max(np.abs(A[j + 1:, j])) ** 2 > tol * max(nrm, 1.0):
                return min_pivot, tol, False
            A[j + 1:, j] = 0.0
            continue
        col = A[j + 1:, j] / math.sqrt(piv)
        A[j + 1:, j + 1:] -= np.outer(col, col)
    return min_pivot, tol, True


def _potential_hessian(potential, x, fd_step):
    if potential.hess is not None:
        return potential.hess(x)
    d = x.shape[0]
    H = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = fd_step
        H[:, j] = (potential.grad(x + e) - potential.grad(x - e)) / (2.0 * fd_step)
    return 0.5 * (H + H.T)


def check_curvature_bounds(potential, metric, x, mu, lam, fd_step=1e-6):
    """mu G(x) <= hess f(x) <= lambda G(x), each side by the tolerant Cholesky.

    Uses the potential's closed-form Hessian when it has one, otherwise
    central differences of the gradient with the given step.
    """
    x = np.asarray(x, dtype=float)
    G = metric.eval(x)
    H = _potential_hessian(potential, x, fd_step)
    lower = H - mu * G
    upper = lam * G - H
    piv_lo, tol_lo, ok_lo = _psd_min_pivot(lower)
    piv_up, tol_up, ok_up = _psd_min_pivot(upper)
    return CheckReport("curvature-bounds",
                       min(piv_lo, piv_up), -max(tol_lo, tol_up),
                       ok_lo and ok_up)


def check_gradient_bound(potential, metric, x, beta, tol_rel=1e-3, tol_abs=1e-12):
    """||grad f(x)||_{G(x)^{-1}} <= beta."""
    x = np.asarray(x, dtype=float)
    factor = linalg.cholesky(metric.eval(x))
    lhs = float(np.linalg.norm(linalg.tri_solve(factor, potential.grad(x))))
    return CheckReport("gradient-bound", lhs, float(beta),
                       lhs <= beta * (1.0 + tol_rel) + tol_abs)


def check_average_self_concordance(metric, x, h, eps, n_mc, rng,
                                   slack=0.02, confidence_z=1.96):
    """Monte-Carlo estimate of the average self-concordance tail bound.

    Estimates P(||xi - x||_{G(xi)}^2 - ||xi - x||_{G(x)}^2 <= 4 h eps) for
    xi ~ N(x, 2h G(x)^{-1}); draws landing outside the interior count as
    violations.  Passes when the Wilson lower confidence bound reaches
    1 - eps - slack.
    """
    x = np.asarray(x, dtype=float)
    factor = linalg.cholesky(metric.eval(x))
    d = x.shape[0]
    sq2h = math.sqrt(2.0 * h)
    bound = 4.0 * h * eps
    hits = 0
    n_mc = int(n_mc)
    for _ in range(n_mc):
        eta = rng.standard_normal(d)
        w = sq2h * linalg.tri_solve(factor, eta, transposed=True)
        xi = x + w
        if not metric.body.contains_interior(xi):
            continue
        try:
            Gxi = metric.eval(xi)
        except NotInterior:
            continue
        diff = float(w @ (Gxi @ w)) - 2.0 * h * float(eta @ eta)
        if diff <= bound:
            hits += 1
    p_hat = hits / n_mc
    z2n = confidence_z * confidence_z / n_mc
    centre = p_hat + 0.5 * z2n
    half = confidence_z * math.sqrt(p_hat * (1.0 - p_hat) / n_mc + 0.25 * z2n / n_mc)
    lower = (centre - half) / (1.0 + z2n)
    target = 1.0 - eps - slack
    return CheckReport("average-self-concordance", lower, target, lower >= target)


def dikin_contains(metric, x, r, y):
    """Whether y lies in the open Dikin ellipsoid E_x(r)."""
    x = np.asarray(x, dtype=float)
    factor = linalg.cholesky(metric.eval(x))
    return metric_norm(factor, np.asarray(y, dtype=float) - x) < r


def symmetry_probe(metric, x, n_dirs, rng, cap=1e8):
    """Empirical symmetry parameter over random directions.

    For each direction u, rho* is the exit radius of the symmetrized body
    K intersect (2x - K) along u; the probe reports
    nu_hat = max_u ||rho* u||_{G(x)}^2 and the smallest exit radius in
    G-norm (>= 1 certifies E_x(1) containment along the sampled
    directions).
    """
    x = np.asarray(x, dtype=float)
    factor = linalg.cholesky(metric.eval(x))
    nu_hat = 0.0
    min_exit = math.inf
    for _ in range(int(n_dirs)):
        u = rng.standard_normal(x.shape[0])
        u /= np.linalg.norm(u)
        rho = min(exit_radius(metric.body, x, u, cap=cap),
                  exit_radius(metric.body, x, -u, cap=cap))
        gnorm = metric_norm(factor, u)
        nu_hat = max(nu_hat, (rho * gnorm) ** 2)
        min_exit = min(min_exit, rho * gnorm)
    return SymmetryReport(nu_hat, min_exit, int(n_dirs))


def probe_points(metric, n, rng, x0=None, radius=0.8, walk_steps=3, max_tries=50):
    """Scattered strictly interior probe points.

    Each probe is produced by a short Dikin-ellipsoid random walk started
    afresh from x0 (the body's canonical interior point by default): long
    walks drift arbitrarily deep into corners where finite differencing
    breaks down, while a handful of steps still leaves the neighbourhood of
    the centre.
    """
    body = metric.body
    start = np.asarray(body.interior_point() if x0 is None else x0, dtype=float)
    if not body.contains_interior(start):
        raise NotInterior("probe start point is not strictly interior")
    out = []
    for _ in range(int(n)):
        x = start
        for _ in range(walk_steps):
            factor = linalg.cholesky(metric.eval(x))
            for _ in range(max_tries):
                u = rng.standard_normal(body.dim)
                u *= rng.random() ** (1.0 / body.dim) / np.linalg.norm(u)
                y = x + radius * linalg.tri_solve(factor, u, transposed=True)
                if not body.contains_interior(y):
                    continue
                # Skip draws where the metric has blown past factorable
                # conditioning (deep corners); probes must stay checkable.
                try:
                    linalg.cholesky(metric.eval(y))
                except NotPositiveDefinite:
                    continue
                x = y
                break
        out.append(x.copy())
    return out


def corrupt_metric(metric, factor=1.5, wavelength=3e-7):
    """Negative control: scale G by a discontinuous, rapidly flipping factor.

    The scale jumps between 1 and ``factor`` on bands of width ~wavelength
    along the first coordinate, far below the finite-difference resolution,
    so the self-concordance probes must fail.
    """
    def eval_fn(x):
        scale = factor if math.sin(x[0] / wavelength) > 0.0 else 1.0
        return scale * metric.eval(x)

    return Metric(metric.body, eval_fn, f"corrupted({metric.kind})")
