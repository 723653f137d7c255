"""Block-model domain types and population quantities.

Conventions used throughout the package: cluster indices are dense 0-based
integers, the membership of node i is ``labels.assignments[i]``, and the
normalized co-membership matrix of a partition has entries 1/m_k inside
cluster k and 0 elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidLabelsError, ParameterError

Assortativity = str  # one of "strong", "weak", "none"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Labels:
    """A partition of n nodes into r non-empty clusters.

    ``assignments`` holds one cluster index in [0, r) per node; ``m`` holds
    the cluster sizes.  Derived ratios (pi, alpha, m_min, m_max) are computed
    on demand so they can never go stale.
    """

    assignments: np.ndarray
    r: int
    m: np.ndarray

    @classmethod
    def from_assignments(cls, assignments: Sequence[int] | np.ndarray) -> "Labels":
        a = np.asarray(assignments, dtype=np.int64).ravel()
        if a.size == 0:
            raise InvalidLabelsError("empty label vector")
        if a.min() < 0:
            raise InvalidLabelsError("negative cluster index")
        r = int(a.max()) + 1
        m = np.bincount(a, minlength=r)
        if (m == 0).any():
            missing = int(np.flatnonzero(m == 0)[0])
            raise InvalidLabelsError(f"cluster {missing} is empty")
        return cls(assignments=_frozen(a), r=r, m=_frozen(m))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Labels":
        """Contiguous blocks: the first sizes[0] nodes form cluster 0, etc."""
        sizes = [int(s) for s in sizes]
        if any(s <= 0 for s in sizes):
            raise InvalidLabelsError("all cluster sizes must be positive")
        return cls.from_assignments(np.repeat(np.arange(len(sizes)), sizes))

    @classmethod
    def from_raw(cls, raw: Sequence) -> "Labels":
        """Remap arbitrary hashable labels (e.g. strings) to dense 0-based ints.

        Cluster indices are assigned by first appearance order.
        """
        seen: dict = {}
        out = np.empty(len(raw), dtype=np.int64)
        for i, v in enumerate(raw):
            if v not in seen:
                seen[v] = len(seen)
            out[i] = seen[v]
        return cls.from_assignments(out)

    @property
    def n(self) -> int:
        return int(self.assignments.size)

    @property
    def m_min(self) -> int:
        return int(self.m.min())

    @property
    def m_max(self) -> int:
        return int(self.m.max())

    @property
    def alpha(self) -> float:
        """Ratio of largest to smallest cluster size."""
        return self.m_max / self.m_min

    @property
    def pi(self) -> np.ndarray:
        """Cluster proportions m_k / n."""
        return self.m / self.n

    def indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == k)

    def membership_matrix(self) -> np.ndarray:
        """The n x r one-hot membership matrix."""
        Z = np.zeros((self.n, self.r))
        Z[np.arange(self.n), self.assignments] = 1.0
        return Z


@dataclass(frozen=True)
class SbmParams:
    """Symmetric r x r matrix of within/across-cluster edge probabilities."""

    B: np.ndarray

    def __post_init__(self) -> None:
        B = np.asarray(self.B, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ParameterError("B must be a square matrix")
        if not np.allclose(B, B.T, atol=1e-12):
            raise ParameterError("B must be symmetric")
        if B.min() < 0.0 or B.max() > 1.0:
            raise ParameterError("entries of B must lie in [0, 1]")
        object.__setattr__(self, "B", _frozen(B))

    @property
    def r(self) -> int:
        return self.B.shape[0]

    def rescaled(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-cluster rescaled rates (a_k, b_k) = (n B_kk, n max_{l!=k} B_kl)."""
        B = self.B
        a = n * np.diag(B)
        off = B.copy()
        np.fill_diagonal(off, -np.inf)
        b = n * off.max(axis=1)
        return a, b


@dataclass(frozen=True)
class MixtureParams:
    """An r-component isotropic mixture: means mu_k, scales sigma_k.

    ``psis`` are the sub-gaussian norms; they default to ``sigmas``, which is
    correct up to an absolute constant for the Gaussian sampler shipped here.
    """

    means: np.ndarray
    sigmas: np.ndarray
    psis: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        sigmas = np.asarray(self.sigmas, dtype=float).ravel()
        psis = self.psis
        psis = sigmas.copy() if psis is None else np.asarray(psis, dtype=float).ravel()
        if means.shape[0] != sigmas.size or means.shape[0] != psis.size:
            raise DimensionError("means, sigmas and psis must agree on the cluster count")
        # zero noise is legal for sampling; the bound calculators that divide
        # by psi_k enforce positivity themselves
        if (sigmas < 0).any() or (psis < 0).any():
            raise ParameterError("sigmas and psis must be nonnegative")
        object.__setattr__(self, "means", _frozen(means))
        object.__setattr__(self, "sigmas", _frozen(sigmas))
        object.__setattr__(self, "psis", _frozen(psis))

    @property
    def r(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def psi_max(self) -> float:
        return float(self.psis.max())

    def center_distances(self) -> np.ndarray:
        """Pairwise distances d_kl between cluster means."""
        diff = self.means[:, None, :] - self.means[None, :, :]
        return np.sqrt((diff**2).sum(axis=2))

    @property
    def d_min(self) -> float:
        """Smallest distance between two distinct cluster means."""
        if self.r < 2:
            return 0.0
        D = self.center_distances()
        return float(D[~np.eye(self.r, dtype=bool)].min())


def ground_truth_matrix(labels: Labels) -> np.ndarray:
    """Normalized co-membership matrix of a partition.

    Entry (i, j) is 1/m_k when i and j share cluster k and 0 otherwise.  The
    result is symmetric, idempotent, has unit row sums, trace r and squared
    Frobenius norm r.
    """
    z = labels.assignments
    same = z[:, None] == z[None, :]
    return np.where(same, 1.0 / labels.m[z][:, None], 0.0)


def expected_adjacency(params: SbmParams, labels: Labels) -> np.ndarray:
    """Conditional mean of the adjacency matrix given the partition.

    Entry (i, j) is B_{z_i z_j} off the diagonal; the diagonal is zero
    because self-edges never occur.
    """
    if params.r != labels.r:
        raise DimensionError("B and labels disagree on the cluster count")
    z = labels.assignments
    P = params.B[np.ix_(z, z)].copy()
    np.fill_diagonal(P, 0.0)
    return P


def classify_assortativity(params: SbmParams) -> Assortativity:
    """Classify B as "strong", "weak" or "none".

    Strong: every diagonal entry strictly exceeds every off-diagonal entry.
    Weak: each diagonal entry strictly exceeds the off-diagonal entries of its
    own row.  Strong implies weak; "strong" is returned only when both hold.
    """
    B = params.B
    r = params.r
    if r == 1:
        return "strong"
    off = ~np.eye(r, dtype=bool)
    weak = all(B[k, k] > B[k, off[k]].max() for k in range(r))
    if not weak:
        return "none"
    strong = np.diag(B).min() > B[off].max()
    return "strong" if strong else "weak"


def average_edge_variance(params: SbmParams, labels: Labels) -> float:
    """Average Bernoulli variance of the edge indicators, times n.

    Returns g = (2 / (n - 1)) * sum_{i<j} Var(A_ij) with
    Var(A_ij) = B_kl (1 - B_kl) for i in cluster k, j in cluster l.  Equals
    n times the mean variance over unordered pairs.
    """
    if params.r != labels.r:
        raise DimensionError("B and labels disagree on the cluster count")
    n = labels.n
    V = params.B * (1.0 - params.B)
    m = labels.m.astype(float)
    # pair counts per (k, l) block, unordered pairs
    pair_counts = np.outer(m, m)
    np.fill_diagonal(pair_counts, m * (m - 1.0))
    total = 0.5 * float((pair_counts * V).sum())
    return 2.0 * total / (n - 1.0)
