"""Reference GAN evaluation metrics: inception score, kernel MMD, FID.

All three operate on caller-supplied feature vectors or class
probabilities; no pretrained backbone is bundled. Features are plain
(M, D) matrices, probabilities are row-stochastic (M, K) matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

_ROW_SUM_TOL = 1e-9


@dataclass
class FeatureSet:
    """An (M, D) matrix of embedding vectors from one source."""

    features: np.ndarray
    source: str = "real"

    def __post_init__(self) -> None:
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        if self.features.ndim != 2:
            raise DimensionError(f"features must be 2-D, got {self.features.shape}")
        if self.features.shape[0] < 1:
            raise ValueError("feature set is empty")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass
class ProbSet:
    """An (M, K) row-stochastic matrix of predicted class probabilities."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.atleast_2d(np.asarray(self.probs, dtype=np.float64))
        if self.probs.shape[0] < 1 or self.probs.shape[1] < 1:
            raise ValueError("probability matrix is empty")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be >= 0")
        sums = self.probs.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > _ROW_SUM_TOL)
        if bad.size:
            raise ValueError(
                f"row {bad[0]} sums to {sums[bad[0]]!r}, expected 1 within {_ROW_SUM_TOL}"
            )

    @property
    def n_samples(self) -> int:
        return self.probs.shape[0]

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]


@dataclass
class GaussianStats:
    """Mean and covariance summarizing a feature distribution."""

    mu: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        self.mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        self.covariance = np.atleast_2d(np.asarray(self.covariance, dtype=np.float64))
        d = self.mu.shape[0]
        if self.covariance.shape != (d, d):
            raise DimensionError(
                f"covariance shape {self.covariance.shape} does not match mean length {d}"
            )
        asym = np.abs(self.covariance - self.covariance.T).max()
        if asym > 1e-9 * max(1.0, np.abs(self.covariance).max()):
            raise ValueError(f"covariance asymmetry {asym} beyond tolerance")


@dataclass
class KernelSpec:
    """Kernel for MMD; only the Gaussian kernel is supported."""

    kind: str = "gaussian"
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        if self.kind != "gaussian":
            raise ValueError(f"unsupported kernel {self.kind!r}")
        if self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")


def inception_score(probs: ProbSet) -> float:
    """exp of the mean KL divergence from each row to the column-mean marginal.

    Equals 1 when every row matches the marginal and K when the rows are
    balanced point masses; zero entries contribute nothing to the KL sums.
    """
    p = probs.probs
    marginal = p.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * (np.log(p) - np.log(marginal)), 0.0)
    return float(np.exp(terms.sum(axis=1).mean()))


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = np.einsum("id,id->i", a, a)
    bb = np.einsum("id,id->i", b, b)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def _gaussian_gram(a: np.ndarray, b: np.ndarray, bandwidth: float) -> np.ndarray:
    return np.exp(-_sq_dists(a, b) / (2.0 * bandwidth**2))


def mmd2(
    xr: FeatureSet,
    xg: FeatureSet,
    kernel: KernelSpec,
    estimator: str = "unbiased",
) -> float:
    """Squared kernel maximum mean discrepancy between two feature sets.

    The biased estimator keeps the within-set diagonals (and is >= 0);
    the unbiased U-statistic excludes them and may go negative.
    """
    if xr.dim != xg.dim:
        raise DimensionError(f"feature dims differ: {xr.dim} vs {xg.dim}")
    if estimator not in ("biased", "unbiased"):
        raise ValueError(f"estimator must be 'biased' or 'unbiased', got {estimator!r}")
    m, n = xr.n_samples, xg.n_samples
    k_rr = _gaussian_gram(xr.features, xr.features, kernel.bandwidth)
    k_gg = _gaussian_gram(xg.features, xg.features, kernel.bandwidth)
    k_rg = _gaussian_gram(xr.features, xg.features, kernel.bandwidth)
    cross = 2.0 * k_rg.mean()
    if estimator == "biased":
        return float(k_rr.mean() - cross + k_gg.mean())
    if m < 2 or n < 2:
        raise ValueError("unbiased estimator needs at least 2 samples per set")
    rr = (k_rr.sum() - np.trace(k_rr)) / (m * (m - 1))
    gg = (k_gg.sum() - np.trace(k_gg)) / (n * (n - 1))
    return float(rr - cross + gg)


def gaussian_stats(features: FeatureSet) -> GaussianStats:
    """Sample mean and unbiased covariance of a feature set, exactly symmetric."""
    if features.n_samples < 2:
        raise ValueError("need at least 2 samples to estimate a covariance")
    x = features.features
    mu = x.mean(axis=0)
    centered = x - mu
    cov = centered.T @ centered / (features.n_samples - 1)
    return GaussianStats(mu=mu, covariance=(cov + cov.T) / 2.0)


def matrix_sqrt_psd(a: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues are clamped at zero, so slightly indefinite inputs produce
    the nearest PSD root.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    asym = np.abs(a - a.T).max()
    if asym > tol * max(1.0, np.abs(a).max()):
        raise ValueError(f"matrix asymmetry {asym} beyond tolerance {tol}")
    vals, vecs = np.linalg.eigh((a + a.T) / 2.0)
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return (root + root.T) / 2.0


def fid(real: GaussianStats, gen: GaussianStats) -> float:
    """Frechet distance between two Gaussian feature summaries.

    ||mu_r - mu_g||^2 + Tr(S_r + S_g - 2 (S_r S_g)^(1/2)), with the cross
    term evaluated through the symmetric product S_r^(1/2) S_g S_r^(1/2)
    so the result is symmetric in its arguments. Tiny negative totals are
    clamped to zero.
    """
    if real.mu.shape != gen.mu.shape:
        raise DimensionError(
            f"dimension mismatch: {real.mu.shape[0]} vs {gen.mu.shape[0]}"
        )
    diff = real.mu - gen.mu
    root_r = matrix_sqrt_psd(real.covariance)
    cross = matrix_sqrt_psd(root_r @ gen.covariance @ root_r)
    value = float(
        diff @ diff
        + np.trace(real.covariance)
        + np.trace(gen.covariance)
        - 2.0 * np.trace(cross)
    )
    if value < 0:
        if value < -1e-6:
            warnings.warn(
                f"FID clamped from {value} to 0; inputs near-degenerate",
                RuntimeWarning,
                stacklevel=2,
            )
        value = 0.0
    return value


def median_heuristic_bandwidth(xr: FeatureSet, xg: FeatureSet) -> float:
    """Median pairwise distance over the pooled samples; 1.0 if that is zero."""
    pooled = np.vstack([xr.features, xg.features])
    if pooled.shape[0] < 2:
        raise ValueError("need at least 2 pooled samples")
    d2 = _sq_dists(pooled, pooled)
    dists = np.sqrt(d2[np.triu_indices(pooled.shape[0], k=1)])
    med = float(np.median(dists))
    return med if med > 0 else 1.0
