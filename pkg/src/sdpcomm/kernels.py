"""Gaussian kernel construction, bandwidth tuning and PCA reduction.

The kernel acts on squared Euclidean distances: K_ij = exp(-eta ||Y_i-Y_j||^2).
Bandwidth tuning follows the keep-in-range heuristic: take each node's 10%
distance quantile (over the other nodes), divide its 95% quantile across
nodes by the square root of the 95% chi-square quantile at the effective
dimension, and set eta = 1 / (2 w^2).  Both percentages are configurable.

Quantiles everywhere use linear interpolation between order statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincinv

from .errors import DegenerateDataError, DimensionError, ParameterError


def squared_distances(Y: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    sq = (Y**2).sum(axis=1)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(D2, 0.0, out=D2)
    np.fill_diagonal(D2, 0.0)
    return 0.5 * (D2 + D2.T)


def gaussian_kernel(Y: np.ndarray, eta: float) -> np.ndarray:
    """Kernel matrix exp(-eta * squared distance); unit diagonal, PSD."""
    if eta < 0:
        raise ParameterError("eta must be nonnegative")
    K = np.exp(-eta * squared_distances(Y))
    np.fill_diagonal(K, 1.0)
    return K


def chi_square_quantile(p: float, d: int) -> float:
    """Quantile of the chi-square distribution with d degrees of freedom."""
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie strictly between 0 and 1")
    if d < 1:
        raise ParameterError("d must be a positive integer")
    return float(2.0 * gammaincinv(d / 2.0, p))


def tune_bandwidth(
    Y: np.ndarray,
    d_eff: int,
    keep_quantile: float = 0.10,
    range_quantile: float = 0.95,
) -> float:
    """Scale parameter eta from the keep-in-range bandwidth heuristic.

    ``d_eff`` is the effective dimension (the intrinsic dimension after any
    reduction step, else the ambient one).  Per-node quantiles exclude the
    zero self-distance.  Raises when all points coincide (zero bandwidth).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = Y.shape[0]
    if n < 2:
        raise ParameterError("at least two points are required")
    if not (0.0 < keep_quantile < 1.0 and 0.0 < range_quantile < 1.0):
        raise ParameterError("quantile parameters must lie in (0, 1)")
    D = np.sqrt(squared_distances(Y))
    off = ~np.eye(n, dtype=bool)
    q = np.quantile(D[off].reshape(n, n - 1), keep_quantile, axis=1)
    w = float(np.quantile(q, range_quantile)) / math.sqrt(
        chi_square_quantile(range_quantile, d_eff)
    )
    if w <= 0.0:
        raise DegenerateDataError("all pairwise distances vanish; bandwidth undefined")
    return 1.0 / (2.0 * w * w)


@dataclass(frozen=True)
class SplitPcaResult:
    """Split-sample PCA output.

    ``projected`` holds the projections U^T Y_i of the held-out rows (P2)
    only; ``basis`` is the d x (r-1) eigenvector matrix estimated from P1,
    usable to project further points.
    """

    projected: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    basis: np.ndarray
    n1: int


def pca_basis(Y: np.ndarray, q: int) -> np.ndarray:
    """Top-q eigenvectors of the sample covariance of the rows of Y."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n, d = Y.shape
    if not 1 <= q <= d:
        raise DimensionError(f"q must lie in [1, {d}]")
    Yc = Y - Y.mean(axis=0)
    S = (Yc.T @ Yc) / n
    _, V = np.linalg.eigh(S)
    return V[:, ::-1][:, :q]


def split_sample_pca(Y: np.ndarray, r: int, seed) -> SplitPcaResult:
    """Dimension reduction to r-1 coordinates with an independent basis.

    A random split puts floor(n / ln n) rows (clamped to [2, n-2]) in P1;
    the covariance of the centered P1 rows yields the top r-1 eigenvectors,
    and only the disjoint P2 rows are projected.  The split keeps the
    projected rows independent of the estimated basis.
    """
    from .generate import make_rng

    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n, d = Y.shape
    if n < 4:
        raise ParameterError("split-sample PCA needs at least 4 rows")
    if r < 2:
        raise ParameterError("r must be at least 2")
    if d < r - 1:
        raise DimensionError(f"cannot project {d}-dim data to {r - 1} dimensions")
    n1 = min(max(int(n / math.log(n)), 2), n - 2)
    perm = make_rng(seed).permutation(n)
    p1 = np.sort(perm[:n1])
    p2 = np.sort(perm[n1:])
    basis = pca_basis(Y[p1], r - 1)
    return SplitPcaResult(projected=Y[p2] @ basis, p1=p1, p2=p2, basis=basis, n1=n1)
