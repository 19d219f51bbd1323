"""Surrogate network mapping stimulus features to P300 signals and amplitudes.

The model is a frozen embedder followed by two trainable fully connected
stages: theta1 ends in a layer the width of the P300 target signal,
theta2 maps that signal to a single amplitude. Training happens in two
stages -- theta1 against recorded source signals, then theta2 against
single-trial amplitudes with theta1 frozen -- or end to end against
amplitudes alone as the no-EEG baseline. Everything is plain numpy with
hand-derived gradients and an Adam update rule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DimensionError

MODE_WITH_EEG = "with_eeg"
MODE_WITHOUT_EEG = "without_eeg"
MODE_RANDOM_EEG = "random_eeg"
MODES = (MODE_WITH_EEG, MODE_WITHOUT_EEG, MODE_RANDOM_EEG)


@dataclass
class EmbedderSpec:
    """Frozen front end applied before the trainable stacks.

    kind "identity" passes features through, "random_projection" applies a
    fixed seeded Gaussian projection to output_dim, and "external" marks
    features as already embedded elsewhere (identity at compute time).
    """

    kind: str = "identity"
    output_dim: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "random_projection", "external"):
            raise ConfigError(f"unknown embedder kind {self.kind!r}")
        if self.kind == "random_projection" and (
            self.output_dim is None or self.output_dim < 1
        ):
            raise ConfigError("random_projection embedder needs output_dim >= 1")


@dataclass
class SurrogateConfig:
    """Network geometry; defaults follow the shallow three-layer variant."""

    input_dim: int = 1024
    theta1_layers: tuple[int, ...] = (512, 50)
    theta2_layers: tuple[int, ...] = (1,)
    p300_dim: int = 50
    embedder: EmbedderSpec = field(default_factory=EmbedderSpec)

    def __post_init__(self) -> None:
        self.theta1_layers = tuple(int(w) for w in self.theta1_layers)
        self.theta2_layers = tuple(int(w) for w in self.theta2_layers)
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if any(w < 1 for w in self.theta1_layers + self.theta2_layers):
            raise ConfigError("layer widths must be >= 1")
        if not self.theta1_layers or self.theta1_layers[-1] != self.p300_dim:
            raise ConfigError(
                f"theta1 must end at p300_dim={self.p300_dim}, got {self.theta1_layers}"
            )
        if not self.theta2_layers or self.theta2_layers[-1] != 1:
            raise ConfigError(
                f"theta2 must end at width 1, got {self.theta2_layers}"
            )

    @property
    def embed_dim(self) -> int:
        if self.embedder.kind == "random_projection":
            return int(self.embedder.output_dim)
        return self.input_dim

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "theta1_layers": list(self.theta1_layers),
            "theta2_layers": list(self.theta2_layers),
            "p300_dim": self.p300_dim,
            "embedder": {
                "kind": self.embedder.kind,
                "output_dim": self.embedder.output_dim,
                "seed": self.embedder.seed,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> SurrogateConfig:
        emb = doc.get("embedder", {})
        return cls(
            input_dim=int(doc["input_dim"]),
            theta1_layers=tuple(doc["theta1_layers"]),
            theta2_layers=tuple(doc["theta2_layers"]),
            p300_dim=int(doc["p300_dim"]),
            embedder=EmbedderSpec(
                kind=emb.get("kind", "identity"),
                output_dim=emb.get("output_dim"),
                seed=int(emb.get("seed", 0)),
            ),
        )


def _init_stack(dims: list[int], seed_key: list[int]) -> list[np.ndarray]:
    """Affine parameters [W0, b0, W1, b1, ...], uniform +-1/sqrt(fan_in)."""
    params: list[np.ndarray] = []
    for i, (d_in, d_out) in enumerate(zip(dims[:-1], dims[1:])):
        rng = np.random.default_rng(seed_key + [i])
        bound = 1.0 / np.sqrt(d_in)
        params.append(rng.uniform(-bound, bound, size=(d_in, d_out)))
        params.append(rng.uniform(-bound, bound, size=d_out))
    return params


def _stack_forward(
    params: list[np.ndarray], x: np.ndarray, row_stable: bool = False
) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]]]:
    """Hidden layers are rectified, the final layer is linear.

    With row_stable the affine products run through einsum, whose per-row
    summation order does not depend on the batch size; a stacked batch is
    then bit-identical to per-sample calls. BLAS matmul is faster but can
    differ in the last bit between a 1-row and an n-row call.
    """
    n_layers = len(params) // 2
    caches = []
    h = x
    for i in range(n_layers):
        w, b = params[2 * i], params[2 * i + 1]
        if row_stable:
            pre = np.einsum("ij,jk->ik", h, w) + b
        else:
            pre = h @ w + b
        caches.append((h, pre))
        h = np.maximum(pre, 0.0) if i < n_layers - 1 else pre
    return h, caches


def _stack_backward(
    params: list[np.ndarray],
    caches: list[tuple[np.ndarray, np.ndarray]],
    d_out: np.ndarray,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Gradients in the same layout as params, plus gradient w.r.t. the input."""
    n_layers = len(params) // 2
    grads = [np.empty(0)] * len(params)
    delta = d_out
    for i in range(n_layers - 1, -1, -1):
        inp, pre = caches[i]
        if i < n_layers - 1:
            delta = delta * (pre > 0)
        grads[2 * i] = inp.T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        delta = delta @ params[2 * i].T
    return grads, delta


@dataclass
class SurrogateModel:
    """Trainable parameters plus the frozen embedder realization."""

    config: SurrogateConfig
    theta1: list[np.ndarray]
    theta2: list[np.ndarray]
    init_seed: int = 0
    projection: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        dims1 = [self.config.embed_dim, *self.config.theta1_layers]
        dims2 = [self.config.p300_dim, *self.config.theta2_layers]
        self._check_group("theta1", self.theta1, dims1)
        self._check_group("theta2", self.theta2, dims2)
        if self.config.embedder.kind == "random_projection" and self.projection is None:
            self.projection = _projection_matrix(self.config)

    @staticmethod
    def _check_group(name: str, params: list[np.ndarray], dims: list[int]) -> None:
        expect = []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            expect.append((d_in, d_out))
            expect.append((d_out,))
        got = [p.shape for p in params]
        if got != expect:
            raise DimensionError(f"{name} shapes {got} do not match config {expect}")
        for p in params:
            if not np.all(np.isfinite(p)):
                raise ValueError(f"{name} contains non-finite parameters")

    @classmethod
    def initialize(cls, config: SurrogateConfig, seed: int = 0) -> SurrogateModel:
        theta1 = _init_stack([config.embed_dim, *config.theta1_layers], [seed, 1])
        theta2 = _init_stack([config.p300_dim, *config.theta2_layers], [seed, 2])
        return cls(config=config, theta1=theta1, theta2=theta2, init_seed=seed)

    def copy(self) -> SurrogateModel:
        return SurrogateModel(
            config=self.config,
            theta1=[p.copy() for p in self.theta1],
            theta2=[p.copy() for p in self.theta2],
            init_seed=self.init_seed,
            projection=self.projection,
        )

    def embed(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.config.input_dim:
            raise DimensionError(
                f"input dim {x.shape[-1]} does not match config {self.config.input_dim}"
            )
        if self.projection is not None:
            if x.ndim == 2:
                return np.einsum("ij,jk->ik", x, self.projection)
            return x @ self.projection
        return x

    def forward_batch(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(N, input_dim) -> predicted signals (N, p300_dim) and amplitudes (N,).

        Row-stable: a batch of n rows is bit-identical to n single-sample
        forwards stacked.
        """
        e = self.embed(np.atleast_2d(x))
        s, _ = _stack_forward(self.theta1, e, row_stable=True)
        y, _ = _stack_forward(self.theta2, s, row_stable=True)
        return s, y[:, 0]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        """Single feature vector -> (signal prediction, amplitude prediction)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise DimensionError(f"expected a 1-D feature vector, got {x.shape}")
        s, y = self.forward_batch(x[None, :])
        return s[0], float(y[0])


def _projection_matrix(config: SurrogateConfig) -> np.ndarray:
    rng = np.random.default_rng([config.embedder.seed, 977])
    scale = 1.0 / np.sqrt(config.input_dim)
    return rng.normal(0.0, scale, size=(config.input_dim, config.embedder.output_dim))


@dataclass
class TrialDataset:
    """Paired stimuli, source-signal targets, amplitudes, and categories."""

    images: np.ndarray
    p300_signals: np.ndarray
    amplitudes: np.ndarray
    categories: list[str]

    def __post_init__(self) -> None:
        self.images = np.atleast_2d(np.asarray(self.images, dtype=np.float64))
        self.p300_signals = np.atleast_2d(
            np.asarray(self.p300_signals, dtype=np.float64)
        )
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64).reshape(-1)
        self.categories = list(self.categories)
        n = self.images.shape[0]
        if not (
            self.p300_signals.shape[0] == n
            and self.amplitudes.shape[0] == n
            and len(self.categories) == n
        ):
            raise DimensionError(
                "inconsistent trial counts: "
                f"images {n}, signals {self.p300_signals.shape[0]}, "
                f"amplitudes {self.amplitudes.shape[0]}, categories {len(self.categories)}"
            )

    @property
    def n_trials(self) -> int:
        return self.images.shape[0]

    def subset(self, idx: np.ndarray) -> TrialDataset:
        return TrialDataset(
            images=self.images[idx].copy(),
            p300_signals=self.p300_signals[idx].copy(),
            amplitudes=self.amplitudes[idx].copy(),
            categories=[self.categories[int(i)] for i in idx],
        )


def split_dataset(
    data: TrialDataset, train_fraction: float = 2.0 / 3.0, seed: int = 0
) -> tuple[TrialDataset, TrialDataset]:
    """Shuffled train/test split, defaulting to two thirds train."""
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    perm = np.random.default_rng([seed, 7]).permutation(data.n_trials)
    n_train = int(round(data.n_trials * train_fraction))
    n_train = min(max(n_train, 1), data.n_trials - 1)
    return data.subset(perm[:n_train]), data.subset(perm[n_train:])


@dataclass
class TrainConfig:
    """Optimization settings; the optimizer is Adam with stock moment constants."""

    mode: str = MODE_WITH_EEG
    learning_rate: float = 0.001
    batch_size: int = 256
    epochs: int = 20
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    shuffle_seed: int = 0
    train_fraction: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")


def loss1(s_pred: np.ndarray, s_true: np.ndarray) -> float:
    """Mean over the batch of the squared L2 distance between signal rows."""
    s_pred = np.atleast_2d(np.asarray(s_pred, dtype=np.float64))
    s_true = np.atleast_2d(np.asarray(s_true, dtype=np.float64))
    if s_pred.shape != s_true.shape:
        raise DimensionError(f"shape mismatch {s_pred.shape} vs {s_true.shape}")
    diff = s_pred - s_true
    return float(np.einsum("ij,ij->i", diff, diff).mean())


def loss2(y_pred: np.ndarray, y_true: np.ndarray) -> float:
    """Mean squared error between predicted and true amplitudes."""
    y_pred = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    y_true = np.asarray(y_true, dtype=np.float64).reshape(-1)
    if y_pred.shape != y_true.shape:
        raise DimensionError(f"shape mismatch {y_pred.shape} vs {y_true.shape}")
    diff = y_pred - y_true
    return float((diff * diff).mean())


class _Adam:
    """Adaptive-moment update over a flat parameter list, in place."""

    def __init__(self, params: list[np.ndarray], cfg: TrainConfig):
        self.params = params
        self.lr = cfg.learning_rate
        self.beta1 = cfg.beta1
        self.beta2 = cfg.beta2
        self.eps = cfg.eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1**self.t)
            v_hat = v / (1.0 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _shuffled_within_category(
    signals: np.ndarray, categories: list[str], seed: int
) -> np.ndarray:
    """Permute signal rows uniformly at random within each category."""
    rng = np.random.default_rng([seed, 101])
    out = signals.copy()
    for cat in dict.fromkeys(categories):
        idx = np.fromiter(
            (i for i, c in enumerate(categories) if c == cat), dtype=np.intp
        )
        out[idx] = signals[idx[rng.permutation(idx.size)]]
    return out


def _check_for_training(model: SurrogateModel, data: TrialDataset) -> None:
    if data.images.shape[1] != model.config.input_dim:
        raise DimensionError(
            f"feature dim {data.images.shape[1]} does not match model input "
            f"{model.config.input_dim}"
        )
    if data.p300_signals.shape[1] != model.config.p300_dim:
        raise DimensionError(
            f"signal dim {data.p300_signals.shape[1]} does not match p300_dim "
            f"{model.config.p300_dim}"
        )


def _run_epochs(
    n_trials: int, cfg: TrainConfig, step_fn
) -> list[float]:
    rng = np.random.default_rng([cfg.shuffle_seed, 0])
    history = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n_trials)
        total = 0.0
        for start in range(0, n_trials, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            loss = step_fn(idx)
            if not np.isfinite(loss):
                raise ArithmeticError(
                    f"loss became {loss} at epoch {epoch}; try a lower learning rate"
                )
            total += loss * idx.size
        history.append(total / n_trials)
    return history


def train_stage1(
    model: SurrogateModel, data: TrialDataset, cfg: TrainConfig
) -> tuple[SurrogateModel, list[float]]:
    """Fit theta1 to the source signals; theta2 is untouched.

    In random_eeg mode the signal targets are first permuted within each
    category (drawn once per run from the shuffle seed), severing the
    image-to-signal pairing while keeping the per-category marginals.
    """
    if cfg.mode not in (MODE_WITH_EEG, MODE_RANDOM_EEG):
        raise ConfigError(f"stage 1 requires with_eeg or random_eeg, got {cfg.mode!r}")
    _check_for_training(model, data)
    targets = data.p300_signals
    if cfg.mode == MODE_RANDOM_EEG:
        targets = _shuffled_within_category(targets, data.categories, cfg.shuffle_seed)

    trained = model.copy()
    opt = _Adam(trained.theta1, cfg)

    def step(idx: np.ndarray) -> float:
        e = trained.embed(data.images[idx])
        s, caches = _stack_forward(trained.theta1, e)
        diff = s - targets[idx]
        loss = float(np.einsum("ij,ij->i", diff, diff).mean())
        grads, _ = _stack_backward(trained.theta1, caches, 2.0 * diff / idx.size)
        opt.step(grads)
        return loss

    history = _run_epochs(data.n_trials, cfg, step)
    return trained, history


def train_stage2(
    model: SurrogateModel, data: TrialDataset, cfg: TrainConfig
) -> tuple[SurrogateModel, list[float]]:
    """Fit theta2 to the amplitudes with theta1 frozen."""
    _check_for_training(model, data)
    trained = model.copy()
    opt = _Adam(trained.theta2, cfg)

    def step(idx: np.ndarray) -> float:
        e = trained.embed(data.images[idx])
        s, _ = _stack_forward(trained.theta1, e)
        y, caches = _stack_forward(trained.theta2, s)
        diff = y[:, 0] - data.amplitudes[idx]
        loss = float((diff * diff).mean())
        grads, _ = _stack_backward(
            trained.theta2, caches, (2.0 * diff / idx.size)[:, None]
        )
        opt.step(grads)
        return loss

    history = _run_epochs(data.n_trials, cfg, step)
    return trained, history


def train_end_to_end(
    model: SurrogateModel, data: TrialDataset, cfg: TrainConfig
) -> tuple[SurrogateModel, list[float]]:
    """No-EEG baseline: joint gradient on the amplitude loss alone."""
    if cfg.mode != MODE_WITHOUT_EEG:
        raise ConfigError(f"end-to-end training requires without_eeg, got {cfg.mode!r}")
    _check_for_training(model, data)
    trained = model.copy()
    joint = trained.theta1 + trained.theta2
    opt = _Adam(joint, cfg)

    def step(idx: np.ndarray) -> float:
        e = trained.embed(data.images[idx])
        s, caches1 = _stack_forward(trained.theta1, e)
        y, caches2 = _stack_forward(trained.theta2, s)
        diff = y[:, 0] - data.amplitudes[idx]
        loss = float((diff * diff).mean())
        grads2, d_s = _stack_backward(
            trained.theta2, caches2, (2.0 * diff / idx.size)[:, None]
        )
        grads1, _ = _stack_backward(trained.theta1, caches1, d_s)
        opt.step(grads1 + grads2)
        return loss

    history = _run_epochs(data.n_trials, cfg, step)
    return trained, history


def _analytic_gradients(
    model: SurrogateModel, data: TrialDataset
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    e = model.embed(data.images)
    s, caches1 = _stack_forward(model.theta1, e)
    d1 = 2.0 * (s - data.p300_signals) / data.n_trials
    grads1, _ = _stack_backward(model.theta1, caches1, d1)

    y, caches2 = _stack_forward(model.theta2, s)
    d2 = (2.0 * (y[:, 0] - data.amplitudes) / data.n_trials)[:, None]
    grads2, _ = _stack_backward(model.theta2, caches2, d2)
    return grads1, grads2


def gradient_check(
    model: SurrogateModel,
    data: TrialDataset,
    epsilon: float = 1e-5,
    max_checks: int = 200,
    seed: int = 0,
) -> float:
    """Worst disagreement between backprop and central finite differences.

    Checks the signal-loss gradient over theta1 and the amplitude-loss
    gradient over theta2. Large parameter groups are subsampled to at most
    max_checks coordinates each (seeded). The returned error is
    |analytic - numeric| / max(1, |analytic| + |numeric|).
    """
    if data.n_trials > 8:
        raise ValueError(f"gradient check wants a batch of <= 8, got {data.n_trials}")
    _check_for_training(model, data)
    work = model.copy()
    grads1, grads2 = _analytic_gradients(work, data)
    rng = np.random.default_rng([seed, 31])
    embedded = work.embed(data.images)

    def loss1_now() -> float:
        s, _ = _stack_forward(work.theta1, embedded)
        return loss1(s, data.p300_signals)

    def loss2_now() -> float:
        s, _ = _stack_forward(work.theta1, embedded)
        y, _ = _stack_forward(work.theta2, s)
        return loss2(y[:, 0], data.amplitudes)

    worst = 0.0
    for params, grads, loss_fn in (
        (work.theta1, grads1, loss1_now),
        (work.theta2, grads2, loss2_now),
    ):
        for p, g in zip(params, grads):
            flat_p = p.reshape(-1)
            flat_g = g.reshape(-1)
            if flat_p.size <= max_checks:
                coords = np.arange(flat_p.size)
            else:
                coords = rng.choice(flat_p.size, size=max_checks, replace=False)
            for c in coords:
                orig = flat_p[c]
                flat_p[c] = orig + epsilon
                hi = loss_fn()
                flat_p[c] = orig - epsilon
                lo = loss_fn()
                flat_p[c] = orig
                numeric = (hi - lo) / (2.0 * epsilon)
                analytic = flat_g[c]
                err = abs(analytic - numeric) / max(1.0, abs(analytic) + abs(numeric))
                worst = max(worst, err)
    return worst


def predict_synthetic_neuroscore(
    model: SurrogateModel,
    images: np.ndarray,
    categories: list[str],
    expected_categories: list[str] | None = None,
) -> dict[str, float]:
    """Mean predicted amplitude per category of the supplied images."""
    images = np.atleast_2d(np.asarray(images, dtype=np.float64))
    if images.shape[0] != len(categories):
        raise DimensionError(
            f"{images.shape[0]} images but {len(categories)} category labels"
        )
    _, y = model.forward_batch(images)
    present = list(dict.fromkeys(categories))
    if expected_categories is not None:
        for cat in expected_categories:
            if cat not in present:
                warnings.warn(
                    f"category {cat!r} has no images and was omitted",
                    RuntimeWarning,
                    stacklevel=2,
                )
    scores: dict[str, float] = {}
    for cat in present:
        mask = np.fromiter(
            (c == cat for c in categories), dtype=bool, count=len(categories)
        )
        scores[cat] = float(y[mask].mean())
    return scores


def rank_images(
    model: SurrogateModel, images: np.ndarray
) -> list[tuple[int, float]]:
    """Image indices with predicted amplitudes, best first; ties keep input order."""
    images = np.atleast_2d(np.asarray(images, dtype=np.float64))
    _, y = model.forward_batch(images)
    order = np.argsort(-y, kind="stable")
    return [(int(i), float(y[i])) for i in order]


def evaluation_error(
    predicted: dict[str, float], true: dict[str, float]
) -> float:
    """Sum over categories of the absolute score difference."""
    if set(predicted) != set(true):
        raise ConfigError(
            f"category sets differ: {sorted(predicted)} vs {sorted(true)}"
        )
    return float(sum(abs(predicted[c] - true[c]) for c in predicted))


def resample_rows(rows: np.ndarray, width: int) -> np.ndarray:
    """Linear-interpolation resampling of each row to the requested width."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    n = rows.shape[1]
    if n == width:
        return rows.copy()
    if n < 2:
        raise DimensionError("need at least 2 samples per row to resample")
    x_new = np.linspace(0.0, 1.0, width)
    x_old = np.linspace(0.0, 1.0, n)
    out = np.empty((rows.shape[0], width))
    for i, row in enumerate(rows):
        out[i] = np.interp(x_new, x_old, row)
    return out


def build_trial_dataset(
    images: np.ndarray,
    epochs,
    result,
    window: tuple[float, float] = (0.4, 0.6),
    p300_dim: int = 50,
) -> TrialDataset:
    """Assemble training data from scored epochs.

    Signal targets are each trial's reconstructed source restricted to the
    window and resampled to p300_dim; amplitudes are the per-trial peaks
    already computed in the scoring result.
    """
    from .beamformer import reconstruct_source

    if epochs.category_labels is None:
        raise ConfigError("epochs must carry category labels")
    images = np.atleast_2d(np.asarray(images, dtype=np.float64))
    if images.shape[0] != epochs.n_trials:
        raise DimensionError(
            f"{images.shape[0]} images for {epochs.n_trials} trials"
        )
    source = reconstruct_source(result.filter.w, epochs)
    times = epochs.times
    mask = (times >= window[0] - 1e-9) & (times <= window[1] + 1e-9)
    if not mask.any():
        raise ConfigError(f"window {window} contains no samples")
    signals = resample_rows(source[:, mask], p300_dim)
    return TrialDataset(
        images=images,
        p300_signals=signals,
        amplitudes=np.asarray(result.amplitudes, dtype=np.float64),
        categories=list(epochs.category_labels),
    )
