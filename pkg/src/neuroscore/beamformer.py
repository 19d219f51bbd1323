"""LDA beamformer fitting, source reconstruction, and Neuroscore.

The beamformer finds channel weights w minimizing the filtered variance
w' Sigma w under the unit-gain constraint w'p = 1 on a spatial pattern p
(the target-minus-standard mean difference at one time point). The fit
scans every sample in a search window, keeps the weights with the lowest
cost, reconstructs each target trial's source waveform, and scores each
trial by its peak amplitude inside a 200 ms window around the optimum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .eeg import EegEpochSet
from .errors import ConfigError, DimensionError, SingularCovarianceError

DEFAULT_SHRINKAGE = 1e-6
DEFAULT_SEARCH = (0.4, 0.6)
P300_HALF_WIDTH = 0.1
_COND_LIMIT = 1e12


@dataclass
class SpatialFilter:
    """A fitted beamformer.

    Attributes:
        w: Channel weights, length C.
        p: Spatial pattern at the optimal time point, length C.
        sigma: Pooled trial covariance (C, C) the fit was based on.
        t_optimal: Time point (s) with the lowest filter cost.
        p300_window: (lo, hi) seconds around t_optimal used for amplitude
            extraction; clamped to the epoch span when necessary.
        j_cost: Minimized cost w' Sigma_reg w at t_optimal.
        shrinkage: Ridge factor applied to sigma when solving.
    """

    w: np.ndarray
    p: np.ndarray
    sigma: np.ndarray
    t_optimal: float
    p300_window: tuple[float, float]
    j_cost: float
    shrinkage: float = DEFAULT_SHRINKAGE

    def __post_init__(self) -> None:
        self.w = np.asarray(self.w, dtype=np.float64)
        self.p = np.asarray(self.p, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        gain = float(self.w @ self.p)
        if abs(gain - 1.0) > 1e-9:
            raise ValueError(f"unit-gain constraint violated: w'p = {gain!r}")
        asym = np.abs(self.sigma - self.sigma.T).max() if self.sigma.size else 0.0
        if asym > 1e-9 * max(1.0, np.abs(self.sigma).max()):
            raise ValueError(f"sigma asymmetry {asym} beyond tolerance")

    def to_dict(self) -> dict:
        return {
            "w": self.w.tolist(),
            "p": self.p.tolist(),
            "sigma": self.sigma.tolist(),
            "t_optimal": self.t_optimal,
            "p300_window": list(self.p300_window),
            "j_cost": self.j_cost,
            "shrinkage": self.shrinkage,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> SpatialFilter:
        return cls(
            w=np.asarray(doc["w"], dtype=np.float64),
            p=np.asarray(doc["p"], dtype=np.float64),
            sigma=np.asarray(doc["sigma"], dtype=np.float64),
            t_optimal=float(doc["t_optimal"]),
            p300_window=(float(doc["p300_window"][0]), float(doc["p300_window"][1])),
            j_cost=float(doc["j_cost"]),
            shrinkage=float(doc.get("shrinkage", DEFAULT_SHRINKAGE)),
        )


@dataclass
class NeuroscoreResult:
    """Per-trial P300 amplitudes and their per-category means.

    per_category maps a category label to (mean amplitude, trial count);
    the mean is that category's Neuroscore. overall is the mean amplitude
    across every target trial.
    """

    amplitudes: np.ndarray
    per_category: dict[str, tuple[float, int]]
    filter: SpatialFilter
    overall: float
    categories: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "amplitudes": self.amplitudes.tolist(),
            "per_category": {
                cat: {"neuroscore": mean, "count": count}
                for cat, (mean, count) in self.per_category.items()
            },
            "overall": self.overall,
            "categories": list(self.categories),
            "filter": self.filter.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> NeuroscoreResult:
        per_category = {
            cat: (float(entry["neuroscore"]), int(entry["count"]))
            for cat, entry in doc["per_category"].items()
        }
        return cls(
            amplitudes=np.asarray(doc["amplitudes"], dtype=np.float64),
            per_category=per_category,
            filter=SpatialFilter.from_dict(doc["filter"]),
            overall=float(doc["overall"]),
            categories=list(doc.get("categories", [])),
        )


def estimate_covariance(target: EegEpochSet, standard: EegEpochSet) -> np.ndarray:
    """Sum of the two per-condition trial-averaged outer products.

    Returns (1/N) sum_i X_i X_i' + (1/M) sum_i K_i K_i', symmetric by
    construction. No time-mean centering is applied.
    """
    if target.n_channels != standard.n_channels:
        raise DimensionError(
            f"channel count mismatch: {target.n_channels} target vs "
            f"{standard.n_channels} standard"
        )
    if abs(target.sample_rate - standard.sample_rate) > 1e-9:
        raise DimensionError(
            f"sample rate mismatch: {target.sample_rate} vs {standard.sample_rate}"
        )
    sigma_t = np.einsum("ict,idt->cd", target.data, target.data) / target.n_trials
    sigma_s = np.einsum("ict,idt->cd", standard.data, standard.data) / standard.n_trials
    sigma = sigma_t + sigma_s
    return (sigma + sigma.T) / 2.0


def regularized(sigma: np.ndarray, shrinkage: float) -> np.ndarray:
    """sigma plus a ridge scaled by its mean eigenvalue: trace(sigma)/C."""
    if shrinkage < 0:
        raise ConfigError(f"shrinkage must be >= 0, got {shrinkage}")
    if shrinkage == 0:
        return sigma
    c = sigma.shape[0]
    return sigma + shrinkage * (np.trace(sigma) / c) * np.eye(c)


def _factor(sigma_reg: np.ndarray):
    if np.linalg.cond(sigma_reg) > _COND_LIMIT:
        raise SingularCovarianceError(
            "covariance matrix is numerically singular; pass a nonzero shrinkage"
        )
    try:
        return cho_factor(sigma_reg)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            "covariance matrix is not positive definite; pass a nonzero shrinkage"
        ) from exc


def solve_beamformer(
    sigma: np.ndarray, p: np.ndarray, shrinkage: float = DEFAULT_SHRINKAGE
) -> np.ndarray:
    """Closed-form constrained minimizer w = Sigma^-1 p (p' Sigma^-1 p)^-1.

    Minimizes w' Sigma_reg w subject to w'p = 1, where Sigma_reg applies
    the trace-scaled ridge.

    Raises:
        SingularCovarianceError: Sigma_reg cannot be reliably inverted.
    """
    p = np.asarray(p, dtype=np.float64)
    if not np.any(p):
        raise ValueError("spatial pattern p must be nonzero")
    sigma_reg = regularized(np.asarray(sigma, dtype=np.float64), shrinkage)
    factor = _factor(sigma_reg)
    x = cho_solve(factor, p)
    return x / (p @ x)


def reconstruct_source(w: np.ndarray, epochs: EegEpochSet) -> np.ndarray:
    """Project each trial through the weights: row i is w' X_i, shape (N, T)."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (epochs.n_channels,):
        raise DimensionError(
            f"weight length {w.shape} does not match {epochs.n_channels} channels"
        )
    return np.einsum("c,ict->it", w, epochs.data)


def fit_filter(
    target: EegEpochSet,
    standard: EegEpochSet,
    search: tuple[float, float] = DEFAULT_SEARCH,
    shrinkage: float = DEFAULT_SHRINKAGE,
) -> SpatialFilter:
    """Scan the search window for the minimum-cost beamformer.

    At every sample time t in [search_lo, search_hi] the pattern is the
    target-minus-standard mean difference at that column; the weights come
    from the closed form and the cost is w' Sigma_reg w. The filter at the
    cost minimum is returned (ties break toward the earliest time), with
    an amplitude window of +-100 ms around it, clamped to the epoch span.
    """
    lo, hi = search
    if lo > hi:
        raise ConfigError(f"search window ({lo}, {hi}) is reversed")
    times = target.times
    in_window = (times >= lo - 1e-9) & (times <= hi + 1e-9)
    if not in_window.any():
        raise ConfigError(
            f"search window ({lo}, {hi}) s outside epoch span "
            f"({times[0]:.3f}, {times[-1]:.3f}) s"
        )
    if target.n_timepoints != standard.n_timepoints:
        raise DimensionError(
            f"timepoint mismatch: {target.n_timepoints} target vs "
            f"{standard.n_timepoints} standard"
        )
    if abs(target.t0 - standard.t0) > 1e-9:
        raise DimensionError(
            f"epoch start mismatch: t0 {target.t0} vs {standard.t0}"
        )
    sigma = estimate_covariance(target, standard)
    sigma_reg = regularized(sigma, shrinkage)
    factor = _factor(sigma_reg)

    erp_diff = target.data.mean(axis=0) - standard.data.mean(axis=0)
    candidates = np.flatnonzero(in_window)
    best_j = np.inf
    best: tuple[int, np.ndarray, np.ndarray] | None = None
    for col in candidates:
        p = erp_diff[:, col]
        if not np.any(p):
            continue
        x = cho_solve(factor, p)
        w = x / (p @ x)
        j = float(w @ sigma_reg @ w)
        if j < best_j:
            best_j = j
            best = (col, w, p)
    if best is None:
        raise ConfigError("pattern is zero at every candidate time point")
    col, w, p = best
    t_optimal = float(times[col])

    win_lo = t_optimal - P300_HALF_WIDTH
    win_hi = t_optimal + P300_HALF_WIDTH
    span_lo, span_hi = float(times[0]), float(times[-1])
    if win_lo < span_lo - 1e-9 or win_hi > span_hi + 1e-9:
        warnings.warn(
            f"amplitude window ({win_lo:.3f}, {win_hi:.3f}) s clamped to epoch "
            f"span ({span_lo:.3f}, {span_hi:.3f}) s",
            RuntimeWarning,
            stacklevel=2,
        )
        win_lo = max(win_lo, span_lo)
        win_hi = min(win_hi, span_hi)

    return SpatialFilter(
        w=w,
        p=p,
        sigma=sigma,
        t_optimal=t_optimal,
        p300_window=(win_lo, win_hi),
        j_cost=best_j,
        shrinkage=shrinkage,
    )


def peak_amplitudes(
    source: np.ndarray, times: np.ndarray, window: tuple[float, float]
) -> np.ndarray:
    """Maximum of each source row inside the time window."""
    mask = (times >= window[0] - 1e-9) & (times <= window[1] + 1e-9)
    if not mask.any():
        raise ConfigError(f"window {window} contains no samples")
    return source[:, mask].max(axis=1)


def neuroscore(
    target: EegEpochSet,
    standard: EegEpochSet,
    shrinkage: float = DEFAULT_SHRINKAGE,
    search: tuple[float, float] = DEFAULT_SEARCH,
    expected_categories: list[str] | None = None,
) -> NeuroscoreResult:
    """Fit one filter on the pooled targets and score every trial.

    Each target trial's amplitude is the peak of its reconstructed source
    inside the filter's amplitude window; a category's Neuroscore is the
    mean amplitude over its trials. Expected categories with no surviving
    trials are omitted with a warning.
    """
    if target.category_labels is None:
        raise ConfigError("target epochs must carry category labels")
    filt = fit_filter(target, standard, search=search, shrinkage=shrinkage)
    source = reconstruct_source(filt.w, target)
    amplitudes = peak_amplitudes(source, target.times, filt.p300_window)

    labels = target.category_labels
    seen: list[str] = []
    for label in labels:
        if label not in seen:
            seen.append(label)
    if expected_categories is not None:
        for cat in expected_categories:
            if cat not in seen:
                warnings.warn(
                    f"category {cat!r} has no trials and was omitted",
                    RuntimeWarning,
                    stacklevel=2,
                )
    per_category: dict[str, tuple[float, int]] = {}
    for cat in seen:
        mask = np.fromiter((l == cat for l in labels), dtype=bool, count=len(labels))
        per_category[cat] = (float(amplitudes[mask].mean()), int(mask.sum()))

    return NeuroscoreResult(
        amplitudes=amplitudes,
        per_category=per_category,
        filter=filt,
        overall=float(amplitudes.mean()),
        categories=seen,
    )
