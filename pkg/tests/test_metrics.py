"""Tests for the inception score, kernel MMD, and Frechet distance."""

import math

import numpy as np
import pytest

from neuroscore import (
    DimensionError,
    FeatureSet,
    GaussianStats,
    KernelSpec,
    ProbSet,
    fid,
    gaussian_stats,
    inception_score,
    matrix_sqrt_psd,
    median_heuristic_bandwidth,
    mmd2,
)


def naive_mmd2(x, y, bandwidth, estimator):
    """Quadratic-time double loops, written independently of the library."""
    def k(a, b):
        return math.exp(-np.sum((a - b) ** 2) / (2.0 * bandwidth**2))

    m, n = len(x), len(y)
    xx = sum(k(x[i], x[j]) for i in range(m) for j in range(m))
    yy = sum(k(y[i], y[j]) for i in range(n) for j in range(n))
    xy = sum(k(x[i], y[j]) for i in range(m) for j in range(n))
    if estimator == "biased":
        return xx / m**2 - 2.0 * xy / (m * n) + yy / n**2
    xx -= m  # each k(x_i, x_i) is exactly 1
    yy -= n
    return xx / (m * (m - 1)) - 2.0 * xy / (m * n) + yy / (n * (n - 1))


class TestProbSet:
    def test_rows_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ProbSet(np.array([[0.5, 0.4]]))

    def test_zero_row_rejected(self):
        with pytest.raises(ValueError):
            ProbSet(np.array([[0.0, 0.0]]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ProbSet(np.array([[1.5, -0.5]]))


class TestInceptionScore:
    def test_uniform_rows_score_one(self):
        probs = ProbSet(np.full((6, 10), 0.1))
        assert inception_score(probs) == pytest.approx(1.0, abs=1e-12)

    def test_balanced_point_masses(self):
        probs = ProbSet(np.array([[1.0, 0.0], [1.0, 0.0],
                                  [0.0, 1.0], [0.0, 1.0]]))
        assert inception_score(probs) == pytest.approx(2.0, abs=1e-12)

    def test_matches_kl_oracle(self):
        rows = np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]])
        marginal = rows.mean(axis=0)
        kl_sum = 0.0
        for row in rows:
            for p, q in zip(row, marginal):
                if p > 0:
                    kl_sum += p * math.log(p / q)
        expected = math.exp(kl_sum / len(rows))
        assert inception_score(ProbSet(rows)) == pytest.approx(expected, abs=1e-12)

    def test_bounds_and_permutation_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            k = int(rng.integers(2, 8))
            raw = rng.random(size=(12, k)) + 1e-6
            p = raw / raw.sum(axis=1, keepdims=True)
            score = inception_score(ProbSet(p))
            assert 1.0 - 1e-9 <= score <= k + 1e-9
            shuffled = p[rng.permutation(12)]
            assert inception_score(ProbSet(shuffled)) == pytest.approx(score)


class TestMmd2:
    def test_identical_sets_biased_zero(self):
        rng = np.random.default_rng(2)
        x = FeatureSet(rng.normal(size=(8, 3)))
        assert abs(mmd2(x, x, KernelSpec(bandwidth=1.5), "biased")) < 1e-12

    def test_two_point_closed_form(self):
        x = FeatureSet(np.array([[0.0, 0.0]]))
        y = FeatureSet(np.array([[3.0, 4.0]]))
        sigma = 2.0
        expected = 2.0 - 2.0 * math.exp(-25.0 / (2.0 * sigma**2))
        got = mmd2(x, y, KernelSpec(bandwidth=sigma), "biased")
        assert got == pytest.approx(expected, abs=1e-12)

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.normal(size=(10, 3))
            y = rng.normal(size=(12, 3)) + 0.3
            for estimator in ("biased", "unbiased"):
                got = mmd2(FeatureSet(x), FeatureSet(y),
                           KernelSpec(bandwidth=1.2), estimator)
                want = naive_mmd2(x, y, 1.2, estimator)
                assert abs(got - want) < 1e-10

    def test_biased_nonnegative_and_permutation_invariant(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = rng.normal(size=(9, 4))
            y = rng.normal(size=(7, 4))
            kernel = KernelSpec(bandwidth=float(rng.uniform(0.5, 3.0)))
            value = mmd2(FeatureSet(x), FeatureSet(y), kernel, "biased")
            assert value >= -1e-15
            shuffled = mmd2(FeatureSet(x[rng.permutation(9)]),
                            FeatureSet(y[rng.permutation(7)]), kernel, "biased")
            assert shuffled == pytest.approx(value, abs=1e-12)

    def test_unbiased_centered_on_zero_for_same_distribution(self):
        """The U-statistic should average ~0 over same-distribution resamples."""
        rng = np.random.default_rng(5)
        kernel = KernelSpec(bandwidth=2.0)
        values = []
        for _ in range(50):
            x = rng.normal(size=(40, 3))
            y = rng.normal(size=(40, 3))
            values.append(mmd2(FeatureSet(x), FeatureSet(y), kernel, "unbiased"))
        values = np.asarray(values)
        sem = values.std(ddof=1) / math.sqrt(len(values))
        assert abs(values.mean()) < 3.0 * sem + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            mmd2(FeatureSet(np.zeros((3, 2))), FeatureSet(np.zeros((3, 4))),
                 KernelSpec())

    def test_unbiased_needs_two_samples(self):
        with pytest.raises(ValueError):
            mmd2(FeatureSet(np.zeros((1, 2))), FeatureSet(np.zeros((3, 2))),
                 KernelSpec(), "unbiased")

    def test_unknown_estimator(self):
        x = FeatureSet(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            mmd2(x, x, KernelSpec(), "exact")


class TestGaussianStats:
    def test_identical_rows_zero_covariance(self):
        stats = gaussian_stats(FeatureSet(np.tile([1.0, 2.0], (5, 1))))
        assert np.allclose(stats.covariance, 0.0)
        assert np.allclose(stats.mu, [1.0, 2.0])

    def test_two_point_unbiased_variance(self):
        stats = gaussian_stats(FeatureSet(np.array([[0.0], [2.0]])))
        assert stats.mu[0] == pytest.approx(1.0)
        assert stats.covariance[0, 0] == pytest.approx(2.0)

    def test_column_permutation_equivariance(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(15, 4))
        perm = [2, 0, 3, 1]
        base = gaussian_stats(FeatureSet(x))
        permuted = gaussian_stats(FeatureSet(x[:, perm]))
        assert np.allclose(permuted.mu, base.mu[perm])
        assert np.allclose(permuted.covariance,
                           base.covariance[np.ix_(perm, perm)])

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            gaussian_stats(FeatureSet(np.zeros((1, 3))))


class TestMatrixSqrt:
    def test_identity(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        assert np.allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])),
                           np.diag([2.0, 3.0]))

    def test_reconstruction(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            b = rng.normal(size=(5, 5))
            a = b @ b.T
            root = matrix_sqrt_psd(a)
            rel = np.linalg.norm(root @ root - a) / np.linalg.norm(a)
            assert rel < 1e-8
            assert np.allclose(root, root.T)
            assert np.linalg.eigvalsh(root).min() > -1e-10

    def test_asymmetry_rejected(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestFid:
    def test_identical_stats_zero(self):
        rng = np.random.default_rng(8)
        stats = gaussian_stats(FeatureSet(rng.normal(size=(30, 4))))
        assert fid(stats, stats) < 1e-8

    def test_one_dimensional_closed_form(self):
        real = GaussianStats(mu=np.array([0.0]), covariance=np.array([[1.0]]))
        gen = GaussianStats(mu=np.array([1.0]), covariance=np.array([[4.0]]))
        assert fid(real, gen) == pytest.approx(2.0, abs=1e-10)

    def test_diagonal_covariances_separable(self):
        mu_r = np.array([0.0, 1.0, -2.0])
        mu_g = np.array([0.5, 0.0, 1.0])
        var_r = np.array([1.0, 4.0, 0.25])
        var_g = np.array([9.0, 1.0, 1.0])
        expected = sum(
            (mr - mg) ** 2 + (math.sqrt(vr) - math.sqrt(vg)) ** 2
            for mr, mg, vr, vg in zip(mu_r, mu_g, var_r, var_g)
        )
        got = fid(GaussianStats(mu_r, np.diag(var_r)),
                  GaussianStats(mu_g, np.diag(var_g)))
        assert got == pytest.approx(expected, abs=1e-10)

    def test_symmetry(self):
        rng = np.random.default_rng(9)
        a = gaussian_stats(FeatureSet(rng.normal(size=(25, 5))))
        b = gaussian_stats(FeatureSet(rng.normal(size=(25, 5)) + 0.5))
        assert abs(fid(a, b) - fid(b, a)) < 1e-8

    def test_dimension_mismatch(self):
        a = GaussianStats(np.zeros(2), np.eye(2))
        b = GaussianStats(np.zeros(3), np.eye(3))
        with pytest.raises(DimensionError):
            fid(a, b)


class TestMedianHeuristic:
    def test_two_points(self):
        x = FeatureSet(np.array([[0.0, 0.0]]))
        y = FeatureSet(np.array([[0.0, 3.0]]))
        assert median_heuristic_bandwidth(x, y) == pytest.approx(3.0)

    def test_degenerate_fallback(self):
        x = FeatureSet(np.zeros((3, 2)))
        y = FeatureSet(np.zeros((2, 2)))
        assert median_heuristic_bandwidth(x, y) == 1.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(10)
        xs = rng.normal(size=(12, 3))
        ys = rng.normal(size=(8, 3))
        pooled = np.vstack([xs, ys])
        dists = [np.linalg.norm(pooled[i] - pooled[j])
                 for i in range(20) for j in range(i + 1, 20)]
        got = median_heuristic_bandwidth(FeatureSet(xs), FeatureSet(ys))
        assert got == pytest.approx(float(np.median(dists)), abs=1e-12)
