"""Synthetic EEG generator with planted evoked responses and paired features.

Target trials carry a Gaussian temporal bump at a known latency, projected
onto a fixed spatial pattern and scaled by a per-trial amplitude drawn from
the trial's category. Standards are noise only. Stimulus features encode
each trial's amplitude along a hidden unit direction plus Gaussian noise,
so every downstream estimate has a known ground truth.

All randomness derives from per-purpose and per-trial sub-seed streams, so
generation is order-independent and bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eeg import Condition, EegEpochSet
from .errors import ConfigError, DimensionError

# sub-seed stream tags
_PATTERN, _MIXING, _AMPLITUDE, _TARGET_NOISE, _STANDARD_NOISE = 1, 2, 3, 4, 5
_FEATURE_NOISE, _FEATURE_DIRECTION = 6, 7


@dataclass
class CategorySpec:
    """One stimulus category: label, amplitude distribution, trial count."""

    label: str
    amplitude_mean: float
    amplitude_std: float = 0.2
    count: int = 200

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"category {self.label!r} needs count >= 1")
        if self.amplitude_std < 0:
            raise ConfigError(f"category {self.label!r} needs amplitude_std >= 0")


@dataclass
class SimConfig:
    """Generator layout and noise levels; all values in microvolts/seconds.

    The default noise keeps the single-trial amplitude floor well below
    the category spacing so recovered score ratios stay faithful.
    """

    channels: int = 16
    sample_rate: float = 250.0
    span: tuple[float, float] = (0.0, 1.0)
    categories: list[CategorySpec] = field(default_factory=list)
    standard_trial_count: int = 600
    p300_latency: float = 0.5
    p300_temporal_width: float = 0.06
    spatial_pattern: np.ndarray | None = None
    noise_mixing: np.ndarray | None = None
    noise_scale: float = 0.02
    feature_dim: int = 256
    feature_noise_scale: float = 0.1
    pink_noise: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.categories:
            self.categories = [
                CategorySpec("cat1", 1.0),
                CategorySpec("cat2", 2.0),
                CategorySpec("cat3", 3.0),
            ]
        if self.channels < 1:
            raise ConfigError(f"channels must be >= 1, got {self.channels}")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.standard_trial_count < 1:
            raise ConfigError(
                f"standard_trial_count must be >= 1, got {self.standard_trial_count}"
            )
        if self.noise_scale < 0:
            raise ConfigError(f"noise_scale must be >= 0, got {self.noise_scale}")
        if self.feature_dim < 1:
            raise ConfigError(f"feature_dim must be >= 1, got {self.feature_dim}")
        if self.feature_noise_scale < 0:
            raise ConfigError(
                f"feature_noise_scale must be >= 0, got {self.feature_noise_scale}"
            )
        if self.p300_temporal_width <= 0:
            raise ConfigError(
                f"p300_temporal_width must be > 0, got {self.p300_temporal_width}"
            )
        lo, hi = self.span
        if not lo < hi:
            raise ConfigError(f"span must satisfy lo < hi, got {self.span}")
        if not lo <= self.p300_latency <= hi:
            raise ConfigError(
                f"p300_latency {self.p300_latency} outside epoch span {self.span}"
            )
        labels = [c.label for c in self.categories]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate category labels in {labels}")
        if self.spatial_pattern is not None:
            self.spatial_pattern = np.asarray(self.spatial_pattern, dtype=np.float64)
            if self.spatial_pattern.shape != (self.channels,):
                raise DimensionError(
                    f"spatial_pattern shape {self.spatial_pattern.shape} "
                    f"!= ({self.channels},)"
                )
        if self.noise_mixing is not None:
            self.noise_mixing = np.asarray(self.noise_mixing, dtype=np.float64)
            if self.noise_mixing.shape != (self.channels, self.channels):
                raise DimensionError(
                    f"noise_mixing shape {self.noise_mixing.shape} "
                    f"!= ({self.channels}, {self.channels})"
                )

    @property
    def n_timepoints(self) -> int:
        return int(round((self.span[1] - self.span[0]) * self.sample_rate))

    @property
    def n_targets(self) -> int:
        return sum(c.count for c in self.categories)

    def resolved_pattern(self) -> np.ndarray:
        if self.spatial_pattern is not None:
            return self.spatial_pattern
        v = np.random.default_rng([self.seed, _PATTERN]).normal(size=self.channels)
        return v / np.linalg.norm(v)

    def resolved_mixing(self) -> np.ndarray:
        """Default mixing is a seeded random rotation.

        A rotation keeps unit channel variance and, unlike a raw Gaussian
        matrix, cannot be near-singular; ill-conditioned mixing lets the
        beamformer amplify pattern-estimate noise without bound, which
        would put a seed-dependent floor under every amplitude estimate.
        """
        if self.noise_mixing is not None:
            return self.noise_mixing
        rng = np.random.default_rng([self.seed, _MIXING])
        q, r = np.linalg.qr(rng.normal(size=(self.channels, self.channels)))
        return q * np.sign(np.diag(r))

    def to_dict(self) -> dict:
        return {
            "channels": self.channels,
            "sample_rate": self.sample_rate,
            "span": list(self.span),
            "categories": [
                {
                    "label": c.label,
                    "amplitude_mean": c.amplitude_mean,
                    "amplitude_std": c.amplitude_std,
                    "count": c.count,
                }
                for c in self.categories
            ],
            "standard_trial_count": self.standard_trial_count,
            "p300_latency": self.p300_latency,
            "p300_temporal_width": self.p300_temporal_width,
            "spatial_pattern": None
            if self.spatial_pattern is None
            else self.spatial_pattern.tolist(),
            "noise_mixing": None
            if self.noise_mixing is None
            else self.noise_mixing.tolist(),
            "noise_scale": self.noise_scale,
            "feature_dim": self.feature_dim,
            "feature_noise_scale": self.feature_noise_scale,
            "pink_noise": self.pink_noise,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> SimConfig:
        doc = dict(doc)
        cats = [
            CategorySpec(
                label=c["label"],
                amplitude_mean=float(c["amplitude_mean"]),
                amplitude_std=float(c.get("amplitude_std", 0.2)),
                count=int(c.get("count", 200)),
            )
            for c in doc.pop("categories", [])
        ]
        if "span" in doc:
            doc["span"] = tuple(doc["span"])
        if doc.get("spatial_pattern") is not None:
            doc["spatial_pattern"] = np.asarray(doc["spatial_pattern"])
        if doc.get("noise_mixing") is not None:
            doc["noise_mixing"] = np.asarray(doc["noise_mixing"])
        return cls(categories=cats, **doc)


@dataclass
class SimOutput:
    """Everything the generator knows: epochs, planted truth, features."""

    target: EegEpochSet
    standard: EegEpochSet
    planted_amplitudes: np.ndarray
    image_features: np.ndarray
    config: SimConfig

    def __post_init__(self) -> None:
        n = self.target.n_trials
        if self.planted_amplitudes.shape != (n,):
            raise DimensionError(
                f"{self.planted_amplitudes.shape[0]} amplitudes for {n} target trials"
            )
        if self.image_features.shape[0] != n:
            raise DimensionError(
                f"{self.image_features.shape[0]} feature rows for {n} target trials"
            )

    def true_category_scores(self) -> dict[str, float]:
        """Mean planted amplitude per category, in config order."""
        labels = np.asarray(self.target.category_labels)
        return {
            c.label: float(self.planted_amplitudes[labels == c.label].mean())
            for c in self.config.categories
        }


def _bump(config: SimConfig) -> np.ndarray:
    t = config.span[0] + np.arange(config.n_timepoints) / config.sample_rate
    return np.exp(-0.5 * ((t - config.p300_latency) / config.p300_temporal_width) ** 2)


def _pink_filter(n: int) -> np.ndarray:
    freqs = np.fft.rfftfreq(n)
    weights = np.zeros_like(freqs)
    weights[1:] = 1.0 / np.sqrt(freqs[1:])
    return weights


def _trial_noise(config: SimConfig, stream: int, index: int) -> np.ndarray:
    rng = np.random.default_rng([config.seed, stream, index])
    white = rng.standard_normal((config.channels, config.n_timepoints))
    if config.pink_noise:
        spec = np.fft.rfft(white, axis=1) * _pink_filter(config.n_timepoints)
        shaped = np.fft.irfft(spec, n=config.n_timepoints, axis=1)
        std = shaped.std(axis=1, keepdims=True)
        std[std == 0] = 1.0
        white = shaped / std
    return config.resolved_mixing() @ white * config.noise_scale


def draw_amplitudes(config: SimConfig) -> np.ndarray:
    """Per-trial planted amplitudes, category Gaussians truncated at 0."""
    parts = []
    for k, cat in enumerate(config.categories):
        rng = np.random.default_rng([config.seed, _AMPLITUDE, k])
        a = rng.normal(cat.amplitude_mean, cat.amplitude_std, size=cat.count)
        while np.any(a < 0):
            bad = a < 0
            a[bad] = rng.normal(cat.amplitude_mean, cat.amplitude_std,
                                size=int(bad.sum()))
        parts.append(a)
    return np.concatenate(parts)


def make_features(planted_amplitudes: np.ndarray, config: SimConfig) -> np.ndarray:
    """Stimulus features f_i = u * a_i + noise with u a seeded unit direction."""
    a = np.asarray(planted_amplitudes, dtype=np.float64).reshape(-1)
    u_raw = np.random.default_rng([config.seed, _FEATURE_DIRECTION]).normal(
        size=config.feature_dim
    )
    u = u_raw / np.linalg.norm(u_raw)
    eps = np.random.default_rng([config.seed, _FEATURE_NOISE]).normal(
        0.0, 1.0, size=(a.size, config.feature_dim)
    )
    return np.outer(a, u) + config.feature_noise_scale * eps


def simulate(config: SimConfig) -> SimOutput:
    """Generate paired target/standard epoch sets with known ground truth."""
    pattern = config.resolved_pattern()
    bump = _bump(config)
    amplitudes = draw_amplitudes(config)
    labels = []
    for cat in config.categories:
        labels.extend([cat.label] * cat.count)

    n_targets = config.n_targets
    target = np.empty((n_targets, config.channels, config.n_timepoints))
    for i in range(n_targets):
        target[i] = np.outer(pattern, amplitudes[i] * bump)
        if config.noise_scale > 0:
            target[i] += _trial_noise(config, _TARGET_NOISE, i)

    standard = np.empty(
        (config.standard_trial_count, config.channels, config.n_timepoints)
    )
    for j in range(config.standard_trial_count):
        if config.noise_scale > 0:
            standard[j] = _trial_noise(config, _STANDARD_NOISE, j)
        else:
            standard[j] = 0.0

    channel_labels = [f"ch{c}" for c in range(config.channels)]
    target_set = EegEpochSet(
        data=target,
        sample_rate=config.sample_rate,
        t0=config.span[0],
        channel_labels=channel_labels,
        condition=Condition.TARGET,
        category_labels=labels,
    )
    standard_set = EegEpochSet(
        data=standard,
        sample_rate=config.sample_rate,
        t0=config.span[0],
        channel_labels=channel_labels,
        condition=Condition.STANDARD,
    )
    features = make_features(amplitudes, config)
    return SimOutput(
        target=target_set,
        standard=standard_set,
        planted_amplitudes=amplitudes,
        image_features=features,
        config=config,
    )


def standard_config(seed: int = 0, trials_per_category: int = 500) -> SimConfig:
    """The three-category benchmark layout: amplitude means 1, 2, 3, std 0.2.

    Standards outnumber targets as in an oddball stream; the extra standard
    trials also sharpen the spatial pattern estimate, whose noise otherwise
    floors the single-trial amplitudes through the near-singular covariance.
    """
    return SimConfig(
        categories=[
            CategorySpec("cat1", 1.0, 0.2, trials_per_category),
            CategorySpec("cat2", 2.0, 0.2, trials_per_category),
            CategorySpec("cat3", 3.0, 0.2, trials_per_category),
        ],
        standard_trial_count=3 * trials_per_category,
        seed=seed,
    )
