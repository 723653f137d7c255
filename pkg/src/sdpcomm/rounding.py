"""Rounding a solution matrix to labels, and clustering quality scores."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError, SizeLimitError
from .model import Labels

ACCURACY_MAX_CLUSTERS = 8


@dataclass(frozen=True)
class RoundingConfig:
    """k-means settings used by spectral rounding."""

    restarts: int = 10
    kmeans_max_iter: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ParameterError("restarts must be at least 1")


def spectral_round(X_hat: np.ndarray, r: int, config: RoundingConfig | None = None) -> Labels:
    """Labels from k-means on the rows of the top-r eigenvector matrix.

    Eigenvalues are sorted descending; rows are used un-normalized.
    Deterministic for a fixed config seed.
    """
    cfg = config or RoundingConfig()
    X_hat = np.asarray(X_hat, dtype=float)
    n = X_hat.shape[0]
    if X_hat.ndim != 2 or X_hat.shape[1] != n:
        raise ParameterError("X_hat must be a square matrix")
    if not 1 <= r <= n:
        raise ParameterError(f"r must lie in [1, {n}]")
    S = 0.5 * (X_hat + X_hat.T)
    _, V = np.linalg.eigh(S)
    U = V[:, ::-1][:, :r]
    return kmeans(U, r, cfg)


def kmeans(points: np.ndarray, k: int, config: RoundingConfig | None = None) -> Labels:
    """Best-of-restarts Lloyd k-means with ++-style seeding.

    Empty clusters are re-seeded from the point farthest from its center.
    Distance ties break toward the lowest index; restart ties toward the
    earliest restart.  Deterministic given the config seed.
    """
    cfg = config or RoundingConfig()
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = P.shape[0]
    if k > n:
        raise ParameterError(f"k={k} exceeds the number of points {n}")
    if k < 1:
        raise ParameterError("k must be positive")

    best_cost = np.inf
    best = None
    for restart in range(cfg.restarts):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((cfg.seed, restart))))
        labels, cost = _lloyd(P, k, rng, cfg.kmeans_max_iter)
        if cost < best_cost:
            best_cost = cost
            best = labels
    return Labels.from_assignments(best)


def _lloyd(P: np.ndarray, k: int, rng: np.random.Generator, max_iter: int) -> tuple[np.ndarray, float]:
    n = P.shape[0]
    centers = P[_plusplus_init(P, k, rng)].copy()
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        D = _sq_dists(P, centers)
        new_labels = D.argmin(axis=1)
        # re-seed empty clusters from the farthest point
        for c in range(k):
            if not (new_labels == c).any():
                mind = D[np.arange(n), new_labels]
                far = int(mind.argmax())
                new_labels[far] = c
                centers[c] = P[far]
                D = _sq_dists(P, centers)
                new_labels = D.argmin(axis=1)
                for cc in range(k):  # pin re-seeded singletons
                    if not (new_labels == cc).any():
                        new_labels[int(_sq_dists(P, centers[cc : cc + 1]).ravel().argmin())] = cc
        if (new_labels == labels).all():
            break
        labels = new_labels
        for c in range(k):
            centers[c] = P[labels == c].mean(axis=0)
    cost = float(_sq_dists(P, centers)[np.arange(n), labels].sum())
    return labels, cost


def _plusplus_init(P: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = P.shape[0]
    idx = np.empty(k, dtype=np.int64)
    idx[0] = rng.integers(n)
    d2 = _sq_dists(P, P[idx[0] : idx[0] + 1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centers
            remaining = np.setdiff1d(np.arange(n), idx[:j])
            idx[j] = remaining[0] if remaining.size else idx[0]
        else:
            idx[j] = rng.choice(n, p=d2 / total)
        d2 = np.minimum(d2, _sq_dists(P, P[idx[j] : idx[j] + 1]).ravel())
    return idx


def _sq_dists(P: np.ndarray, C: np.ndarray) -> np.ndarray:
    D = (P**2).sum(axis=1)[:, None] + (C**2).sum(axis=1)[None, :] - 2.0 * (P @ C.T)
    return np.maximum(D, 0.0)


def _contingency(a: Labels, b: Labels) -> np.ndarray:
    if a.n != b.n:
        raise DimensionError("label vectors differ in length")
    T = np.zeros((a.r, b.r), dtype=np.int64)
    np.add.at(T, (a.assignments, b.assignments), 1)
    return T


def nmi(a: Labels, b: Labels) -> float:
    """Mutual information over the geometric mean of the entropies.

    Natural log.  If either partition is constant (zero entropy) the value is
    0, except when both are the identical constant partition, which scores 1.
    """
    T = _contingency(a, b).astype(float)
    n = a.n

    def entropy(p: np.ndarray) -> float:
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())

    ha = entropy(T.sum(axis=1) / n)
    hb = entropy(T.sum(axis=0) / n)
    if ha == 0.0 or hb == 0.0:
        return 1.0 if (a.r == 1 and b.r == 1) else 0.0
    mi = ha + hb - entropy(T.ravel() / n)
    val = mi / math.sqrt(ha * hb)
    if val >= 1.0 - 1e-12:
        return 1.0
    return float(max(val, 0.0))


def accuracy(a: Labels, b: Labels) -> float:
    """Fraction of agreeing nodes under the best relabeling of ``a``.

    Enumerates permutations of the cluster indices, so both partitions must
    use at most 8 clusters.
    """
    return 1.0 - misclassified(a, b) / a.n


def misclassified(a: Labels, b: Labels) -> int:
    """Number of disagreeing nodes under the best relabeling of ``a``."""
    T = _contingency(a, b)
    r = max(a.r, b.r)
    if r > ACCURACY_MAX_CLUSTERS:
        raise SizeLimitError(
            f"permutation matching supports at most {ACCURACY_MAX_CLUSTERS} clusters, got {r}"
        )
    Tsq = np.zeros((r, r), dtype=np.int64)
    Tsq[: T.shape[0], : T.shape[1]] = T
    best = max(sum(Tsq[p[j], j] for j in range(r)) for p in itertools.permutations(range(r)))
    return int(a.n - best)


def relative_frobenius_error(X_hat: np.ndarray, X0: np.ndarray) -> float:
    """||X_hat - X0||_F / ||X0||_F."""
    X_hat = np.asarray(X_hat, dtype=float)
    X0 = np.asarray(X0, dtype=float)
    if X_hat.shape != X0.shape:
        raise DimensionError(f"shape mismatch: {X_hat.shape} vs {X0.shape}")
    denom = float(np.linalg.norm(X0))
    if denom == 0.0:
        raise ParameterError("X0 has zero Frobenius norm")
    return float(np.linalg.norm(X_hat - X0)) / denom


def misclassification_bound(X_hat: np.ndarray, X0: np.ndarray, m_max: int) -> float:
    """Worst-case misclassified-node count: 64 * m_max * ||X_hat - X0||_F^2."""
    X_hat = np.asarray(X_hat, dtype=float)
    X0 = np.asarray(X0, dtype=float)
    if X_hat.shape != X0.shape:
        raise DimensionError(f"shape mismatch: {X_hat.shape} vs {X0.shape}")
    return 64.0 * m_max * float(np.linalg.norm(X_hat - X0) ** 2)
