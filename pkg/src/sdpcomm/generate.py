"""Seeded generation of block-model graphs and Gaussian mixture covariates.

All samplers draw from ``numpy.random.Generator`` backed by the PCG64
bit generator, seeded through ``numpy.random.SeedSequence``.  The same seed
and parameters reproduce outputs bit for bit on any platform.  Replicate
streams are derived with :func:`replicate_seeds`, which spawns one child
sequence per replicate from the root seed.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParameterError
from .model import Labels, MixtureParams, SbmParams

SeedLike = "int | np.random.SeedSequence"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def replicate_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences for ``count`` replicates."""
    return np.random.SeedSequence(seed).spawn(count)


def sample_sbm(params: SbmParams, labels: Labels, seed) -> np.ndarray:
    """Symmetric 0/1 adjacency matrix with zero diagonal.

    Upper-triangle entries are independent Bernoulli with success probability
    B[z_i, z_j]; the lower triangle mirrors them.
    """
    if params.r != labels.r:
        raise DimensionError("B and labels disagree on the cluster count")
    rng = make_rng(seed)
    z = labels.assignments
    n = labels.n
    P = params.B[np.ix_(z, z)]
    U = rng.random((n, n))
    A = np.where(np.triu(U < P, 1), 1.0, 0.0)
    return A + A.T


def sample_mixture(params: MixtureParams, labels: Labels, seed) -> np.ndarray:
    """n x d covariate matrix: row i is mu_{z_i} + sigma_{z_i} * N(0, I_d)."""
    if params.r != labels.r:
        raise DimensionError("mixture params and labels disagree on the cluster count")
    rng = make_rng(seed)
    z = labels.assignments
    W = rng.standard_normal((labels.n, params.d))
    return params.means[z] + params.sigmas[z][:, None] * W


def simulation_one_model(n: int = 800) -> tuple[Labels, SbmParams, MixtureParams]:
    """Three-cluster benchmark with 3:4:5 sizes and 100-dim covariates.

    Cluster sizes are n * (3, 4, 5) / 12 rounded to integers summing to n;
    edge probabilities are scaled by 800/n so the expected degrees match the
    reference size n=800.
    """
    if n < 12:
        raise ParameterError("n must be at least 12")
    sizes = [round(n * w / 12) for w in (3, 4)]
    sizes.append(n - sum(sizes))
    labels = Labels.from_sizes(sizes)
    B = 0.01 * np.array(
        [[1.6, 1.2, 0.16], [1.2, 1.6, 0.02], [0.16, 0.02, 1.2]]
    ) * (800.0 / n)
    means = np.zeros((3, 100))
    means[0, :2] = (0.0, 2.0)
    means[1, :2] = (-1.0, -0.8)
    means[2, :2] = (1.0, -0.8)
    return labels, SbmParams(np.minimum(B, 1.0)), MixtureParams(means, np.ones(3))


def planted_partition_model(
    n: int,
    r: int,
    p_in: float,
    p_out: float,
    center_scale: float = 3.0,
    d: int = 100,
) -> tuple[Labels, SbmParams, MixtureParams]:
    """Equal-size planted partition with axis-aligned covariate centers.

    Means are center_scale * e_k in d dimensions, unit noise.  Cluster sizes
    differ by at most one when r does not divide n.
    """
    if d < r:
        raise DimensionError("d must be at least r for axis-aligned centers")
    base = n // r
    sizes = [base + (1 if k < n % r else 0) for k in range(r)]
    labels = Labels.from_sizes(sizes)
    B = np.full((r, r), p_out)
    np.fill_diagonal(B, p_in)
    means = np.zeros((r, d))
    means[np.arange(r), np.arange(r)] = center_scale
    return labels, SbmParams(B), MixtureParams(means, np.ones(r))
