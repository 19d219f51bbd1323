"""Epoched EEG containers and the deterministic preprocessing chain.

Epochs are stored as a (trials, channels, timepoints) stack in microvolts.
The chain applied before beamforming is: common average reference ->
zero-phase bandpass -> decimation -> peak-to-peak trial rejection. Every
step is a pure function returning a new epoch set.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import butter, sosfiltfilt

from .errors import ConfigError, DimensionError, EmptyResultError


class Condition(enum.IntEnum):
    """Stimulus condition an epoch set is locked to."""

    STANDARD = 0
    TARGET = 1


@dataclass
class EegEpochSet:
    """A stack of single-trial EEG epochs with shared sampling metadata.

    Attributes:
        data: Array of shape (n_trials, n_channels, n_timepoints), microvolts.
        sample_rate: Sampling rate in Hz.
        t0: Time of the first sample in seconds, relative to stimulus onset.
        channel_labels: One label per channel.
        condition: Whether these are target- or standard-locked trials.
        category_labels: Optional per-trial category (e.g. which generator
            produced the stimulus); length must equal n_trials.
    """

    data: np.ndarray
    sample_rate: float
    t0: float = 0.0
    channel_labels: list[str] = field(default_factory=list)
    condition: Condition = Condition.TARGET
    category_labels: list[str] | None = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise DimensionError(
                f"data must be (trials, channels, timepoints), got shape {self.data.shape}"
            )
        if min(self.data.shape) < 1:
            raise DimensionError(f"empty epoch dimension in shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("epoch data contains non-finite values")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be > 0, got {self.sample_rate}")
        if not self.channel_labels:
            self.channel_labels = [f"ch{i}" for i in range(self.n_channels)]
        if len(self.channel_labels) != self.n_channels:
            raise DimensionError(
                f"{len(self.channel_labels)} channel labels for {self.n_channels} channels"
            )
        self.condition = Condition(self.condition)
        if self.category_labels is not None:
            self.category_labels = list(self.category_labels)
            if len(self.category_labels) != self.n_trials:
                raise DimensionError(
                    f"{len(self.category_labels)} category labels for {self.n_trials} trials"
                )

    @property
    def n_trials(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    @property
    def n_timepoints(self) -> int:
        return self.data.shape[2]

    @property
    def times(self) -> np.ndarray:
        """Sample times in seconds relative to stimulus onset."""
        return self.t0 + np.arange(self.n_timepoints) / self.sample_rate

    def with_data(self, data: np.ndarray, **changes) -> EegEpochSet:
        """New epoch set with replaced data, keeping remaining metadata."""
        return replace(self, data=data, **changes)


@dataclass
class PreprocessConfig:
    """Parameters of the preprocessing chain.

    Attributes:
        band_lo / band_hi: Bandpass edges in Hz.
        filter_order: Butterworth design order.
        decimation_factor: Keep every n-th sample after filtering.
        p2p_threshold: Peak-to-peak rejection threshold in microvolts.
        epoch_window: Intended epoch span (start, end) in seconds relative
            to stimulus onset; inputs extending beyond it are cropped.
        baseline: When True, subtract each trial's mean over pre-stimulus
            samples (requires the epoch to start before 0 s).
    """

    band_lo: float = 0.5
    band_hi: float = 20.0
    filter_order: int = 4
    decimation_factor: int = 1
    p2p_threshold: float = 100.0
    epoch_window: tuple[float, float] = (0.0, 1.0)
    baseline: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.band_lo < self.band_hi:
            raise ConfigError(
                f"need 0 < band_lo < band_hi, got ({self.band_lo}, {self.band_hi})"
            )
        if self.filter_order < 1:
            raise ConfigError(f"filter_order must be >= 1, got {self.filter_order}")
        if self.decimation_factor < 1:
            raise ConfigError(
                f"decimation_factor must be >= 1, got {self.decimation_factor}"
            )
        if self.p2p_threshold < 0:
            raise ConfigError(f"p2p_threshold must be >= 0, got {self.p2p_threshold}")
        if self.epoch_window[0] >= self.epoch_window[1]:
            raise ConfigError(f"empty epoch_window {self.epoch_window}")

    def validate_for_rate(self, sample_rate: float) -> None:
        """Check the band against the post-decimation Nyquist frequency."""
        nyquist = sample_rate / self.decimation_factor / 2.0
        if self.band_hi >= nyquist:
            raise ConfigError(
                f"band_hi={self.band_hi} Hz not below post-decimation "
                f"Nyquist {nyquist} Hz"
            )

    @classmethod
    def for_sample_rate(cls, sample_rate: float, target_rate: float = 250.0, **kwargs) -> PreprocessConfig:
        """Config whose decimation lands at (or nearest below) target_rate."""
        factor = max(1, int(round(sample_rate / target_rate)))
        return cls(decimation_factor=factor, **kwargs)


def common_average_reference(epochs: EegEpochSet) -> EegEpochSet:
    """Subtract the instantaneous channel mean from every channel.

    After referencing, the mean over channels is zero at every trial and
    timepoint. Data already referenced to numerical precision are returned
    unchanged, which makes the operation exactly idempotent.
    """
    data = epochs.data
    means = data.mean(axis=1, keepdims=True)
    if np.abs(means).max() <= 1e-12 * np.abs(data).max():
        return epochs.with_data(data.copy())
    return epochs.with_data(data - means)


def bandpass_filter(epochs: EegEpochSet, cfg: PreprocessConfig) -> EegEpochSet:
    """Zero-phase Butterworth bandpass over each trial and channel.

    The filter runs forward and backward (no phase shift, squared
    magnitude response). Epoch edges are reflect-padded by one settling
    length, capped at the epoch length, to bound the edge transient.
    """
    nyquist = epochs.sample_rate / 2.0
    if cfg.band_hi >= nyquist:
        raise ConfigError(
            f"band_hi={cfg.band_hi} Hz must be below Nyquist {nyquist} Hz"
        )
    sos = butter(
        cfg.filter_order,
        [cfg.band_lo, cfg.band_hi],
        btype="bandpass",
        output="sos",
        fs=epochs.sample_rate,
    )
    # settling time of the slow (high-pass) edge, ~3 time constants
    settle = int(math.ceil(3.0 * epochs.sample_rate / cfg.band_lo))
    padlen = min(epochs.n_timepoints - 1, settle)
    filtered = sosfiltfilt(sos, epochs.data, axis=-1, padtype="even", padlen=padlen)
    return epochs.with_data(filtered)


def decimate(epochs: EegEpochSet, factor: int) -> EegEpochSet:
    """Keep every factor-th sample, starting at the first.

    Callers are expected to have low-passed below the new Nyquist first;
    no anti-alias filter is applied here.
    """
    if factor < 1:
        raise ConfigError(f"decimation factor must be >= 1, got {factor}")
    if factor == 1:
        return epochs
    out_len = epochs.n_timepoints // factor
    if out_len < 1:
        raise ConfigError(
            f"decimation factor {factor} leaves no samples of {epochs.n_timepoints}"
        )
    data = epochs.data[:, :, : out_len * factor : factor]
    return epochs.with_data(
        np.ascontiguousarray(data), sample_rate=epochs.sample_rate / factor
    )


def peak_to_peak(epochs: EegEpochSet) -> np.ndarray:
    """Worst-channel peak-to-peak amplitude per trial."""
    span = epochs.data.max(axis=2) - epochs.data.min(axis=2)
    return span.max(axis=1)


def reject_trials(
    epochs: EegEpochSet, threshold: float
) -> tuple[EegEpochSet, list[int]]:
    """Drop trials whose worst-channel peak-to-peak amplitude exceeds threshold.

    Returns the surviving epochs (order and labels preserved, contents
    untouched) and the indices of the rejected trials.

    Raises:
        EmptyResultError: If every trial is rejected.
    """
    if threshold < 0:
        raise ConfigError(f"threshold must be >= 0, got {threshold}")
    p2p = peak_to_peak(epochs)
    keep = p2p <= threshold
    rejected = [int(i) for i in np.flatnonzero(~keep)]
    if not keep.any():
        raise EmptyResultError(
            f"all {epochs.n_trials} trials exceed the {threshold} uV "
            "peak-to-peak threshold"
        )
    labels = None
    if epochs.category_labels is not None:
        labels = [l for l, k in zip(epochs.category_labels, keep) if k]
    survivors = epochs.with_data(epochs.data[keep].copy(), category_labels=labels)
    return survivors, rejected


def crop(epochs: EegEpochSet, t_lo: float, t_hi: float) -> EegEpochSet:
    """Restrict epochs to samples with t_lo <= t <= t_hi."""
    times = epochs.times
    mask = (times >= t_lo - 1e-12) & (times <= t_hi + 1e-12)
    if not mask.any():
        raise ConfigError(
            f"window ({t_lo}, {t_hi}) s outside epoch span "
            f"({times[0]:.3f}, {times[-1]:.3f}) s"
        )
    first = int(np.argmax(mask))
    return epochs.with_data(
        epochs.data[:, :, mask].copy(), t0=float(times[first])
    )


def baseline_correct(epochs: EegEpochSet) -> EegEpochSet:
    """Subtract the pre-stimulus (t < 0) mean per trial and channel."""
    pre = epochs.times < 0
    if not pre.any():
        raise ConfigError("baseline correction needs samples before t=0")
    means = epochs.data[:, :, pre].mean(axis=2, keepdims=True)
    return epochs.with_data(epochs.data - means)


def preprocess(
    epochs: EegEpochSet, cfg: PreprocessConfig
) -> tuple[EegEpochSet, list[int]]:
    """Run the full chain: crop -> CAR -> bandpass -> decimate -> reject.

    Returns the cleaned epoch set and the rejected trial indices.
    """
    cfg.validate_for_rate(epochs.sample_rate)
    t_lo, t_hi = cfg.epoch_window
    times = epochs.times
    if times[0] < t_lo - 1e-9 or times[-1] > t_hi + 1e-9:
        epochs = crop(epochs, t_lo, t_hi)
    epochs = common_average_reference(epochs)
    epochs = bandpass_filter(epochs, cfg)
    epochs = decimate(epochs, cfg.decimation_factor)
    if cfg.baseline:
        epochs = baseline_correct(epochs)
    return reject_trials(epochs, cfg.p2p_threshold)
