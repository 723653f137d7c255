import numpy as np
import pytest

from sdpcomm.generate import (
    planted_partition_model,
    replicate_seeds,
    sample_mixture,
    sample_sbm,
    simulation_one_model,
)
from sdpcomm.model import Labels, MixtureParams, SbmParams


class TestSampleSbm:
    def test_zero_probability_empty_graph(self):
        lab = Labels.from_sizes([5, 5])
        A = sample_sbm(SbmParams(np.zeros((2, 2))), lab, seed=0)
        assert not A.any()

    def test_unit_probability_complete_graph(self):
        lab = Labels.from_sizes([4, 4])
        A = sample_sbm(SbmParams(np.ones((2, 2))), lab, seed=0)
        assert np.array_equal(A, np.ones((8, 8)) - np.eye(8))

    def test_structure(self):
        lab = Labels.from_sizes([10, 10])
        A = sample_sbm(SbmParams(np.full((2, 2), 0.4)), lab, seed=3)
        assert np.array_equal(A, A.T)
        assert not np.diag(A).any()
        assert set(np.unique(A)) <= {0.0, 1.0}

    def test_edge_frequency_binomial_band(self):
        n, p = 2000, 0.01
        lab = Labels.from_sizes([n])
        A = sample_sbm(SbmParams(np.array([[p]])), lab, seed=11)
        pairs = n * (n - 1) / 2
        freq = A.sum() / 2 / pairs
        band = 3 * np.sqrt(p * (1 - p) / pairs)
        assert abs(freq - p) < band

    def test_seed_reproducibility(self):
        lab = Labels.from_sizes([20, 20])
        B = SbmParams(np.array([[0.5, 0.1], [0.1, 0.5]]))
        assert np.array_equal(sample_sbm(B, lab, 7), sample_sbm(B, lab, 7))
        assert not np.array_equal(sample_sbm(B, lab, 7), sample_sbm(B, lab, 8))

    def test_within_cluster_exchangeability(self):
        # expected cross-half edge count inside one cluster matches p * m^2
        m, p, reps = 30, 0.3, 200
        lab = Labels.from_sizes([2 * m])
        B = SbmParams(np.array([[p]]))
        counts = [
            sample_sbm(B, lab, seed)[:m, m:].sum() for seed in range(reps)
        ]
        mean = np.mean(counts)
        se = np.std(counts) / np.sqrt(reps)
        assert abs(mean - p * m * m) < 5 * se + 1e-9


class TestSampleMixture:
    def test_zero_noise_returns_means(self):
        means = np.array([[1.0, 2.0], [-3.0, 0.5]])
        mix = MixtureParams(means, np.zeros(2))
        lab = Labels.from_assignments([0, 1, 1, 0])
        Y = sample_mixture(mix, lab, seed=0)
        assert np.array_equal(Y, means[[0, 1, 1, 0]])

    def test_law_of_large_numbers(self):
        n, d = 4000, 3
        mu = np.array([[2.0, -1.0, 0.5]])
        mix = MixtureParams(mu, np.array([1.5]))
        lab = Labels.from_sizes([n])
        Y = sample_mixture(mix, lab, seed=21)
        assert np.abs(Y.mean(axis=0) - mu[0]).max() < 4 * 1.5 / np.sqrt(n)

    def test_covariance_concentration(self):
        # operator-norm deviation of the sample covariance from sigma^2 I
        n, d, sigma = 3000, 5, 0.7
        mix = MixtureParams(np.zeros((1, d)), np.array([sigma]))
        lab = Labels.from_sizes([n])
        Y = sample_mixture(mix, lab, seed=4)
        Yc = Y - Y.mean(axis=0)
        S = Yc.T @ Yc / n
        dev = np.abs(np.linalg.eigvalsh(S - sigma**2 * np.eye(d))).max()
        assert dev < 5 * sigma**2 * np.sqrt(d * np.log(n) / n)

    def test_seed_reproducibility(self):
        mix = MixtureParams(np.zeros((2, 4)), np.ones(2))
        lab = Labels.from_sizes([5, 5])
        assert np.array_equal(sample_mixture(mix, lab, 9), sample_mixture(mix, lab, 9))


class TestSeedSpawning:
    def test_replicate_streams_differ(self):
        seeds = replicate_seeds(42, 3)
        lab = Labels.from_sizes([10, 10])
        B = SbmParams(np.full((2, 2), 0.5))
        samples = [sample_sbm(B, lab, s) for s in seeds]
        assert not np.array_equal(samples[0], samples[1])
        again = [sample_sbm(B, lab, s) for s in replicate_seeds(42, 3)]
        for x, y in zip(samples, again):
            assert np.array_equal(x, y)


class TestPresets:
    def test_simulation_one_desk_scaled(self):
        labels, sbm, mix = simulation_one_model(240)
        assert labels.m.tolist() == [60, 80, 100]
        assert np.allclose(sbm.B, SIM1_SCALED := 0.01 * np.array(
            [[1.6, 1.2, 0.16], [1.2, 1.6, 0.02], [0.16, 0.02, 1.2]]
        ) * (800 / 240))
        assert mix.d == 100
        assert np.allclose(mix.means[0, :2], [0.0, 2.0])

    def test_simulation_one_rounding_documented(self):
        # the 3:4:5 split of n=800 is non-integral; sizes round to 200/267/333
        labels, _, _ = simulation_one_model(800)
        assert labels.m.tolist() == [200, 267, 333]

    def test_planted_partition(self):
        labels, sbm, mix = planted_partition_model(300, 10, 0.1333, 0.0107)
        assert labels.m.tolist() == [30] * 10
        assert mix.means[3, 3] == 3.0 and mix.means[3, 4] == 0.0
