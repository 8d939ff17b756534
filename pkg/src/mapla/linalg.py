"""Dense SPD linear algebra used by every metric and sampler.

Everything here operates on plain ``numpy`` arrays: a symmetric positive
definite (SPD) matrix is a dense ``(d, d)`` float array, a vector is a
``(d,)`` float array.  The only wrapper type is :class:`CholFactor`, which
holds the lower-triangular Cholesky factor of an SPD matrix; samplers cache
and pass these around instead of refactorizing.

LAPACK/BLAS routines are called through ``scipy.linalg`` with argument
checking disabled, since these functions sit in the innermost sampling
loop.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import blas as _blas, lapack as _lapack, solve_triangular

from .errors import DimensionMismatch, NotPositiveDefinite

# Relative pivot tolerance for declaring a matrix not positive definite.
# Near-boundary barrier metrics blow up but stay PD; only genuine
# indefiniteness (or a collapsed metric) should fail.
PIVOT_RTOL = 1e-13

_dpotrf = _lapack.dpotrf
_dtrsv = _blas.dtrsv
_dtrmv = _blas.dtrmv


@dataclass(frozen=True)
class CholFactor:
    """Lower-triangular Cholesky factor L with L @ L.T = S for SPD S."""

    L: np.ndarray

    @property
    def dim(self):
        return self.L.shape[0]


def cholesky(S):
    """Factor an SPD matrix as L @ L.T with L lower triangular.

    Parameters
    ----------
    S : (d, d) ndarray
        Symmetric matrix; only the lower triangle is read.

    Returns
    -------
    CholFactor

    Raises
    ------
    NotPositiveDefinite
        If factorization fails or any pivot is <= PIVOT_RTOL * max(diag S).
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    L, info = _dpotrf(S, lower=1, clean=1)
    if info != 0:
        raise NotPositiveDefinite(f"dpotrf failed with info={info}")
    # dpotrf pivots are diag(L)**2; min() propagates NaN, so a single
    # comparison also rejects non-finite factors.
    dmin = float(L.diagonal().min())
    if not dmin * dmin > PIVOT_RTOL * max(float(S.diagonal().max()), 0.0):
        raise NotPositiveDefinite("pivot below relative tolerance")
    return CholFactor(L)


def tri_solve(factor, rhs, transposed=False):
    """Solve L y = rhs, or L.T y = rhs when ``transposed``.

    ``rhs`` may be a vector or a matrix of stacked right-hand sides
    (columns).
    """
    L = factor.L
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != L.shape[0]:
        raise DimensionMismatch(
            f"rhs of length {rhs.shape[0]} against factor of dim {L.shape[0]}"
        )
    if rhs.ndim == 1:
        return _dtrsv(L, rhs, lower=1, trans=1 if transposed else 0)
    return solve_triangular(L, rhs, lower=True, trans=1 if transposed else 0,
                            check_finite=False)


def solve_spd(factor, rhs):
    """Solve (L @ L.T) v = rhs through two triangular solves."""
    return tri_solve(factor, tri_solve(factor, rhs), transposed=True)


def logdet(factor):
    """log det of the SPD matrix represented by the factor: 2 * sum log L_ii."""
    return 2.0 * float(np.log(np.einsum("ii->i", factor.L)).sum())


def trans_matvec(factor, v):
    """L.T @ v for the factor's lower-triangular L."""
    return _dtrmv(factor.L, v, lower=1, trans=1)


def sample_precision_gaussian(factor, rng):
    """Draw from N(0, (L L.T)^{-1}) given the Cholesky factor of the precision.

    Returns the pair ``(xi, L^{-T} xi)`` where ``xi`` is the standard normal
    seed vector; callers that compute Metropolis ratios reuse ``xi``.
    """
    xi = rng.standard_normal(factor.dim)
    return xi, tri_solve(factor, xi, transposed=True)


def chain_rng(master_seed, stream_index):
    """Independent, reproducible RNG stream for one chain.

    Streams are counter-based Philox-4x64 generators keyed by the pair
    ``(master_seed, stream_index)``, so a run is bit-stable no matter how
    chains are scheduled across workers.
    """
    key = np.array([np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(stream_index & 0xFFFFFFFFFFFFFFFF)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
