"""Command-line interface.

Subcommands cover the full pipeline: simulate data, score epochs, train a
surrogate, predict category scores, compute distribution metrics, build
convergence curves, and rank stimuli. Every subcommand honors --seed and
produces bit-identical outputs for identical inputs and seeds.

Exit codes: 0 success, 2 configuration or argument error, 3 file or
format error, 4 numerical failure (singular covariance, diverged loss).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, formats, metrics, surrogate
from .beamformer import DEFAULT_SEARCH, DEFAULT_SHRINKAGE, neuroscore
from .config import RunConfig, load_run_config, parse_run_config
from .eeg import preprocess
from .errors import ConfigError, FormatError, SingularCovarianceError
from .simulate import simulate
from .surrogate import (
    MODE_WITHOUT_EEG,
    SurrogateConfig,
    SurrogateModel,
    build_trial_dataset,
    predict_synthetic_neuroscore,
    rank_images,
    train_end_to_end,
    train_stage1,
    train_stage2,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_EPILOG = """exit codes:
  0  success
  2  configuration or argument error
  3  file or format error
  4  numerical failure (singular covariance, diverged training)

environment:
  NEUROSCORE_THREADS  caps the number of BLAS threads used by numerics
"""


def _resolve_config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_run_config(args.config, seed_override=args.seed)
    return parse_run_config({}, seed_override=args.seed)


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8", newline="\n")


def cmd_simulate(args) -> int:
    run = _resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sim = simulate(run.simulator)
    formats.write_epochs(out / "target.epb", sim.target)
    formats.write_epochs(out / "standard.epb", sim.standard)
    formats.write_features(
        out / "features.csv", sim.image_features, sim.target.category_labels
    )
    formats.write_json(
        out / "truth.json",
        {
            "planted_amplitudes": sim.planted_amplitudes.tolist(),
            "category_scores": sim.true_category_scores(),
            "config": sim.config.to_dict(),
        },
    )
    return EXIT_OK


def _load_epoch_pair(args):
    target = formats.read_epochs(args.target)
    standard = formats.read_epochs(args.standard)
    if args.preprocess:
        run = _resolve_config(args)
        target, _ = preprocess(target, run.preprocess)
        standard, _ = preprocess(standard, run.preprocess)
    return target, standard


def cmd_neuroscore(args) -> int:
    target, standard = _load_epoch_pair(args)
    result = neuroscore(
        target,
        standard,
        shrinkage=args.shrinkage,
        search=(args.search_lo, args.search_hi),
    )
    _emit_json(result.to_dict(), args.out)
    return EXIT_OK


def _build_dataset(args, run: RunConfig):
    """Assemble the TrialDataset plus the surrogate geometry for training."""
    features, feat_cats = formats.read_features(args.features)
    mode = args.mode.replace("-", "_")

    if args.p300:
        signals, amplitudes, categories = formats.read_p300(args.p300)
        if signals.shape[0] != features.shape[0]:
            raise ConfigError(
                f"{signals.shape[0]} signal rows for {features.shape[0]} "
                "feature rows"
            )
        width = signals.shape[1]
        if width == 0:
            if mode != MODE_WITHOUT_EEG:
                raise ConfigError(
                    f"mode {args.mode} needs signal columns in {args.p300}"
                )
            width = run.surrogate.p300_dim
            signals = np.zeros((features.shape[0], width))
    elif args.target and args.standard:
        target, standard = _load_epoch_pair(args)
        result = neuroscore(
            target,
            standard,
            shrinkage=args.shrinkage,
            search=(args.search_lo, args.search_hi),
        )
        width = run.surrogate.p300_dim
        data = build_trial_dataset(
            features, target, result, window=result.filter.p300_window, p300_dim=width
        )
        return data, _geometry(run.surrogate, features.shape[1], width)
    else:
        raise ConfigError("training needs --p300 or both --target and --standard")

    if feat_cats is not None and feat_cats != categories:
        raise ConfigError("category columns of features and signals disagree")
    data = surrogate.TrialDataset(
        images=features,
        p300_signals=signals,
        amplitudes=amplitudes,
        categories=categories,
    )
    return data, _geometry(run.surrogate, features.shape[1], width)


def _geometry(base: SurrogateConfig, input_dim: int, p300_dim: int) -> SurrogateConfig:
    """Adapt the configured geometry to the observed data dimensions."""
    layers = list(base.theta1_layers)
    layers[-1] = p300_dim
    return SurrogateConfig(
        input_dim=input_dim,
        theta1_layers=tuple(layers),
        theta2_layers=base.theta2_layers,
        p300_dim=p300_dim,
        embedder=base.embedder,
    )


def cmd_train(args) -> int:
    run = _resolve_config(args)
    data, geometry = _build_dataset(args, run)
    cfg = run.train
    overrides = {"mode": args.mode.replace("-", "_")}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if args.learning_rate is not None:
        overrides["learning_rate"] = args.learning_rate
    cfg = replace(cfg, **overrides)

    model = SurrogateModel.initialize(geometry, seed=run.model_init_seed)
    if cfg.mode == MODE_WITHOUT_EEG:
        model, history = train_end_to_end(model, data, cfg)
        stages = {"end_to_end": history}
    else:
        model, h1 = train_stage1(model, data, cfg)
        model, h2 = train_stage2(model, data, cfg)
        stages = {"stage1": h1, "stage2": h2}
    formats.write_model(args.out, model)
    if args.history:
        formats.write_history(args.history, stages)
    return EXIT_OK


def cmd_predict(args) -> int:
    model = formats.read_model(args.model)
    features, categories = formats.read_features(args.features)
    if categories is None:
        raise ConfigError(f"{args.features} has no category column")
    scores = predict_synthetic_neuroscore(model, features, categories)
    _emit_json({"synthetic_neuroscore": scores}, args.out)
    return EXIT_OK


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cmd_metrics(args) -> int:
    real_mat, _ = formats.read_features(args.real)
    gen_mat, _ = formats.read_features(args.generated)
    real = metrics.FeatureSet(real_mat, source="real")
    gen = metrics.FeatureSet(gen_mat, source="generated")

    if args.probs:
        prob_mat, _ = formats.read_features(args.probs)
        probs = metrics.ProbSet(prob_mat)
    else:
        probs = metrics.ProbSet(_softmax_rows(gen_mat))
    try:
        is_value = metrics.inception_score(probs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    bandwidth = args.bandwidth
    if bandwidth is None:
        bandwidth = metrics.median_heuristic_bandwidth(real, gen)
    kernel = metrics.KernelSpec(bandwidth=bandwidth)
    try:
        mmd_value = metrics.mmd2(real, gen, kernel, estimator=args.estimator)
        fid_value = metrics.fid(
            metrics.gaussian_stats(real), metrics.gaussian_stats(gen)
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    _emit_json(
        {
            "inception_score": is_value,
            "inverse_inception_score": 1.0 / is_value,
            "mmd2": mmd_value,
            "fid": fid_value,
            "bandwidth": bandwidth,
            "estimator": args.estimator,
        },
        args.out,
    )
    return EXIT_OK


def _default_sizes(n: int) -> list[int]:
    grid = [s for s in (2, 5, 10, 20, 40, 80, 160) if s <= n]
    if n not in grid and n >= 1:
        grid.append(n)
    return grid


def cmd_converge(args) -> int:
    if args.p300:
        _, amplitudes, categories = formats.read_p300(args.p300)
    elif args.target and args.standard:
        target, standard = _load_epoch_pair(args)
        result = neuroscore(
            target,
            standard,
            shrinkage=args.shrinkage,
            search=(args.search_lo, args.search_hi),
        )
        amplitudes = result.amplitudes
        categories = list(target.category_labels)
    else:
        raise ConfigError("convergence needs --p300 or both --target and --standard")

    seed = args.seed if args.seed is not None else 0
    if args.sizes:
        try:
            sizes_all = [int(s) for s in args.sizes.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --sizes: {exc}") from None
    else:
        sizes_all = None

    curves: dict[str, analysis.ConvergenceCurve] = {}
    groups: dict[str, np.ndarray] = {"overall": amplitudes}
    for cat in dict.fromkeys(categories):
        mask = np.fromiter(
            (c == cat for c in categories), dtype=bool, count=len(categories)
        )
        groups[cat] = amplitudes[mask]
    for name, values in groups.items():
        sizes = sizes_all if sizes_all else _default_sizes(values.size)
        curves[name] = analysis.convergence_curve(
            values, sizes, repeats=args.repeats, seed=seed
        )
    analysis.emit_report(analysis.CategoryScoreTable([]), curves, args.out)
    return EXIT_OK


def cmd_rank(args) -> int:
    model = formats.read_model(args.model)
    features, categories = formats.read_features(args.features)
    ranking = rank_images(model, features)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["rank,index,score" + (",category" if categories else "")]
    for rank, (idx, score) in enumerate(ranking):
        row = f"{rank},{idx},{repr(score)}"
        if categories:
            row += f",{categories[idx]}"
        lines.append(row)
    (out / "ranking.csv").write_text(
        "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
    )
    scores = np.array([score for _, score in ranking])
    (out / "ranking.svg").write_text(
        analysis.score_curve_svg(scores, "predicted amplitude by rank"),
        encoding="utf-8",
        newline="\n",
    )
    return EXIT_OK


def _add_beamformer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--lambda",
        dest="shrinkage",
        type=float,
        default=DEFAULT_SHRINKAGE,
        help="covariance ridge factor (default %(default)s)",
    )
    p.add_argument(
        "--search-lo",
        type=float,
        default=DEFAULT_SEARCH[0],
        help="search window start in seconds (default %(default)s)",
    )
    p.add_argument(
        "--search-hi",
        type=float,
        default=DEFAULT_SEARCH[1],
        help="search window end in seconds (default %(default)s)",
    )
    p.add_argument(
        "--preprocess",
        action="store_true",
        help="apply the preprocessing chain before scoring",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neuroscore",
        description="EEG-derived image quality scoring pipeline",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=None, help="override every derived seed"
    )
    common.add_argument(
        "--config", default=None, help="run configuration JSON file"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate", parents=[common], help="generate synthetic epoch bundles"
    )
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "neuroscore", parents=[common], help="score target epochs against standards"
    )
    p.add_argument("target", help="target EPB1 bundle")
    p.add_argument("standard", help="standard EPB1 bundle")
    _add_beamformer_flags(p)
    p.add_argument("--out", default=None, help="also write the JSON result here")
    p.set_defaults(func=cmd_neuroscore)

    p = sub.add_parser(
        "train", parents=[common], help="train a surrogate network"
    )
    p.add_argument("--features", required=True, help="stimulus feature CSV")
    p.add_argument(
        "--mode",
        choices=["with-eeg", "without-eeg", "random-eeg"],
        default="with-eeg",
    )
    p.add_argument("--p300", default=None, help="precomputed signal CSV")
    p.add_argument("--target", default=None, help="target EPB1 bundle")
    p.add_argument("--standard", default=None, help="standard EPB1 bundle")
    _add_beamformer_flags(p)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--out", required=True, help="output model blob")
    p.add_argument("--history", default=None, help="loss history CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "predict", parents=[common], help="predict per-category scores"
    )
    p.add_argument("--model", required=True, help="SNM1 model blob")
    p.add_argument("--features", required=True, help="stimulus feature CSV")
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser(
        "metrics", parents=[common], help="distribution metrics between feature sets"
    )
    p.add_argument("--real", required=True, help="real feature CSV")
    p.add_argument("--generated", required=True, help="generated feature CSV")
    p.add_argument(
        "--probs",
        default=None,
        help="probability CSV for the inception score "
        "(default: softmax of generated features)",
    )
    p.add_argument("--estimator", choices=["biased", "unbiased"], default="unbiased")
    p.add_argument(
        "--bandwidth",
        type=float,
        default=None,
        help="kernel bandwidth (default: median heuristic)",
    )
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser(
        "converge", parents=[common], help="subsample convergence curves"
    )
    p.add_argument("--p300", default=None, help="precomputed signal CSV")
    p.add_argument("--target", default=None, help="target EPB1 bundle")
    p.add_argument("--standard", default=None, help="standard EPB1 bundle")
    _add_beamformer_flags(p)
    p.add_argument("--sizes", default=None, help="comma-separated subsample sizes")
    p.add_argument("--repeats", type=int, default=200)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser(
        "rank", parents=[common], help="rank stimuli by predicted amplitude"
    )
    p.add_argument("--model", required=True, help="SNM1 model blob")
    p.add_argument("--features", required=True, help="stimulus feature CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_rank)
    return parser


def _apply_thread_cap() -> None:
    raw = os.environ.get("NEUROSCORE_THREADS")
    if not raw:
        return
    try:
        limit = int(raw)
    except ValueError:
        raise ConfigError(f"NEUROSCORE_THREADS must be an integer, got {raw!r}")
    if limit < 1:
        raise ConfigError(f"NEUROSCORE_THREADS must be >= 1, got {limit}")
    import threadpoolctl

    threadpoolctl.threadpool_limits(limits=limit)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        _apply_thread_cap()
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    except SingularCovarianceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())
