"""Strict run-configuration loading.

A run config is one JSON document with optional sections for the
preprocessing, simulator, training, and surrogate settings plus a
top-level seed. Parsing is strict: any key that does not name a known
field fails fast with the offending key's dotted path. After loading,
every seed is concrete (section seeds default to values derived from the
top-level seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .eeg import PreprocessConfig
from .errors import ConfigError, FormatError
from .formats import read_json
from .simulate import CategorySpec, SimConfig
from .surrogate import EmbedderSpec, SurrogateConfig, TrainConfig

_PREPROCESS_KEYS = {
    "band_lo", "band_hi", "filter_order", "decimation_factor",
    "p2p_threshold", "epoch_window", "baseline",
}
_SIM_KEYS = {
    "channels", "sample_rate", "span", "categories", "standard_trial_count",
    "p300_latency", "p300_temporal_width", "spatial_pattern", "noise_mixing",
    "noise_scale", "feature_dim", "feature_noise_scale", "pink_noise", "seed",
}
_CATEGORY_KEYS = {"label", "amplitude_mean", "amplitude_std", "count"}
_TRAIN_KEYS = {
    "mode", "learning_rate", "batch_size", "epochs", "beta1", "beta2",
    "eps", "shuffle_seed", "train_fraction",
}
_SURROGATE_KEYS = {
    "input_dim", "theta1_layers", "theta2_layers", "p300_dim", "embedder",
}
_EMBEDDER_KEYS = {"kind", "output_dim", "seed"}
_TOP_KEYS = {"seed", "preprocess", "simulator", "train", "surrogate"}


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where or 'config'} must be a JSON object")
    for key in doc:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise ConfigError(f"unknown config key {path!r}")


@dataclass
class RunConfig:
    seed: int
    preprocess: PreprocessConfig
    simulator: SimConfig
    train: TrainConfig
    surrogate: SurrogateConfig

    @property
    def model_init_seed(self) -> int:
        return self.seed + 1


def parse_run_config(doc: dict, seed_override: int | None = None) -> RunConfig:
    """Build a RunConfig from a parsed JSON document, strictly."""
    _check_keys(doc, _TOP_KEYS, "")
    seed = int(doc.get("seed", 0))
    if seed_override is not None:
        seed = seed_override

    pre_doc = dict(doc.get("preprocess", {}))
    _check_keys(pre_doc, _PREPROCESS_KEYS, "preprocess")
    if "epoch_window" in pre_doc:
        pre_doc["epoch_window"] = tuple(pre_doc["epoch_window"])
    preprocess = PreprocessConfig(**pre_doc)

    sim_doc = dict(doc.get("simulator", {}))
    _check_keys(sim_doc, _SIM_KEYS, "simulator")
    for i, cat in enumerate(sim_doc.get("categories", [])):
        _check_keys(cat, _CATEGORY_KEYS, f"simulator.categories[{i}]")
    sim_doc.setdefault("seed", seed)
    if seed_override is not None:
        sim_doc["seed"] = seed
    cats = [CategorySpec(**c) for c in sim_doc.pop("categories", [])]
    if "span" in sim_doc:
        sim_doc["span"] = tuple(sim_doc["span"])
    simulator = SimConfig(categories=cats, **sim_doc)

    train_doc = dict(doc.get("train", {}))
    _check_keys(train_doc, _TRAIN_KEYS, "train")
    train_doc.setdefault("shuffle_seed", seed + 2)
    if seed_override is not None:
        train_doc["shuffle_seed"] = seed + 2
    train = TrainConfig(**train_doc)

    sur_doc = dict(doc.get("surrogate", {}))
    _check_keys(sur_doc, _SURROGATE_KEYS, "surrogate")
    emb_doc = dict(sur_doc.pop("embedder", {}))
    _check_keys(emb_doc, _EMBEDDER_KEYS, "surrogate.embedder")
    emb_doc.setdefault("seed", seed + 1)
    embedder = EmbedderSpec(**emb_doc)
    if "theta1_layers" in sur_doc:
        sur_doc["theta1_layers"] = tuple(sur_doc["theta1_layers"])
    if "theta2_layers" in sur_doc:
        sur_doc["theta2_layers"] = tuple(sur_doc["theta2_layers"])
    surrogate = SurrogateConfig(embedder=embedder, **sur_doc)

    return RunConfig(
        seed=seed,
        preprocess=preprocess,
        simulator=simulator,
        train=train,
        surrogate=surrogate,
    )


def load_run_config(
    path: str | Path, seed_override: int | None = None
) -> RunConfig:
    try:
        doc = read_json(path)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None
    try:
        return parse_run_config(doc, seed_override=seed_override)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
