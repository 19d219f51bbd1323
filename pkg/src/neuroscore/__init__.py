"""EEG-derived image quality scoring: beamformed P300 amplitudes and a
feature-based surrogate network that predicts them without new recordings."""

from .analysis import (
    CategoryScoreTable,
    ConvergenceCurve,
    ScoreRow,
    convergence_curve,
    emit_report,
    pearson,
    score_curve_svg,
)
from .beamformer import (
    NeuroscoreResult,
    SpatialFilter,
    estimate_covariance,
    fit_filter,
    neuroscore,
    peak_amplitudes,
    reconstruct_source,
    regularized,
    solve_beamformer,
)
from .config import RunConfig, load_run_config, parse_run_config
from .eeg import (
    Condition,
    EegEpochSet,
    PreprocessConfig,
    bandpass_filter,
    baseline_correct,
    common_average_reference,
    crop,
    decimate,
    peak_to_peak,
    preprocess,
    reject_trials,
)
from .errors import (
    ConfigError,
    DimensionError,
    EmptyResultError,
    FormatError,
    SingularCovarianceError,
)
from .metrics import (
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
from .simulate import (
    CategorySpec,
    SimConfig,
    SimOutput,
    draw_amplitudes,
    make_features,
    simulate,
    standard_config,
)
from .surrogate import (
    MODE_RANDOM_EEG,
    MODE_WITH_EEG,
    MODE_WITHOUT_EEG,
    EmbedderSpec,
    SurrogateConfig,
    SurrogateModel,
    TrainConfig,
    TrialDataset,
    build_trial_dataset,
    evaluation_error,
    gradient_check,
    loss1,
    loss2,
    predict_synthetic_neuroscore,
    rank_images,
    resample_rows,
    split_dataset,
    train_end_to_end,
    train_stage1,
    train_stage2,
)

__version__ = "0.1.0"

__all__ = [
    "CategoryScoreTable",
    "CategorySpec",
    "Condition",
    "ConfigError",
    "ConvergenceCurve",
    "DimensionError",
    "EegEpochSet",
    "EmbedderSpec",
    "EmptyResultError",
    "FeatureSet",
    "FormatError",
    "GaussianStats",
    "KernelSpec",
    "MODE_RANDOM_EEG",
    "MODE_WITHOUT_EEG",
    "MODE_WITH_EEG",
    "NeuroscoreResult",
    "PreprocessConfig",
    "ProbSet",
    "RunConfig",
    "ScoreRow",
    "SimConfig",
    "SimOutput",
    "SingularCovarianceError",
    "SpatialFilter",
    "SurrogateConfig",
    "SurrogateModel",
    "TrainConfig",
    "TrialDataset",
    "bandpass_filter",
    "baseline_correct",
    "build_trial_dataset",
    "common_average_reference",
    "convergence_curve",
    "crop",
    "decimate",
    "emit_report",
    "estimate_covariance",
    "evaluation_error",
    "fid",
    "fit_filter",
    "gaussian_stats",
    "gradient_check",
    "inception_score",
    "load_run_config",
    "loss1",
    "loss2",
    "matrix_sqrt_psd",
    "median_heuristic_bandwidth",
    "mmd2",
    "neuroscore",
    "parse_run_config",
    "peak_amplitudes",
    "peak_to_peak",
    "pearson",
    "predict_synthetic_neuroscore",
    "preprocess",
    "rank_images",
    "reconstruct_source",
    "regularized",
    "reject_trials",
    "resample_rows",
    "score_curve_svg",
    "simulate",
    "solve_beamformer",
    "split_dataset",
    "standard_config",
    "train_end_to_end",
    "train_stage1",
    "train_stage2",
]
