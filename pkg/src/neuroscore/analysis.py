"""Statistical post-processing: convergence curves, correlation, reports.

Convergence curves measure how the mean single-trial amplitude stabilizes
as the subsample size grows. Correlation is plain Pearson with the exact
t-distribution p-value. Reports are CSV tables plus small hand-rolled SVG
plots; emission is pure and byte-deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import betainc

from .errors import ConfigError, DimensionError


@dataclass
class ConvergenceCurve:
    """Mean and spread of subsample means at each tested sample size."""

    sample_sizes: list[int]
    means: np.ndarray
    stds: np.ndarray
    repeats: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        self.sample_sizes = [int(s) for s in self.sample_sizes]
        self.means = np.asarray(self.means, dtype=np.float64)
        self.stds = np.asarray(self.stds, dtype=np.float64)
        k = len(self.sample_sizes)
        if self.means.shape != (k,) or self.stds.shape != (k,):
            raise DimensionError(
                f"curve arrays must have length {k}, got "
                f"{self.means.shape} and {self.stds.shape}"
            )
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")


@dataclass
class ScoreRow:
    category: str
    neuroscore: float
    synthetic_neuroscore: float
    be_accuracy: float | None = None
    inception_score: float | None = None
    mmd2: float | None = None
    fid: float | None = None


@dataclass
class CategoryScoreTable:
    rows: list[ScoreRow] = field(default_factory=list)

    def __post_init__(self) -> None:
        cats = [r.category for r in self.rows]
        if len(set(cats)) != len(cats):
            raise ConfigError(f"duplicate categories in score table: {cats}")


def convergence_curve(
    amplitudes: np.ndarray,
    sizes: list[int],
    repeats: int = 200,
    seed: int = 0,
) -> ConvergenceCurve:
    """Subsample (without replacement) at each size and summarize the means.

    For each size and repeat, a fresh sub-seeded generator picks the
    subsample, so repeats are order-independent and reproducible. Indices
    are sorted before averaging so a subsample's mean does not depend on
    draw order; at full size every repeat reproduces the exact full-set
    mean and the spread collapses to zero.
    """
    a = np.asarray(amplitudes, dtype=np.float64).reshape(-1)
    n = a.size
    if n == 0:
        raise ConfigError("no amplitudes to subsample")
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    sizes = [int(s) for s in sizes]
    for s in sizes:
        if not 1 <= s <= n:
            raise ConfigError(f"subsample size {s} outside [1, {n}]")
    means = np.empty(len(sizes))
    stds = np.empty(len(sizes))
    for k, s in enumerate(sizes):
        sub_means = np.empty(repeats)
        for r in range(repeats):
            rng = np.random.default_rng([seed, s, r])
            idx = np.sort(rng.choice(n, size=s, replace=False))
            sub_means[r] = a[idx].mean()
        if np.ptp(sub_means) == 0.0:
            means[k] = sub_means[0]
            stds[k] = 0.0
        else:
            means[k] = sub_means.mean()
            stds[k] = sub_means.std()
    return ConvergenceCurve(
        sample_sizes=sizes, means=means, stds=stds, repeats=repeats, seed=seed
    )


def pearson(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Sample Pearson r and two-sided p from the exact t distribution.

    The p-value evaluates the regularized incomplete beta form of the
    t CDF at t = r * sqrt((n-2) / (1-r^2)) with n-2 degrees of freedom.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise DimensionError(f"length mismatch: {x.size} vs {y.size}")
    n = x.size
    if n < 3:
        raise ConfigError(f"need at least 3 points for a p-value, got {n}")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt(xc @ xc))
    sy = float(np.sqrt(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise ConfigError("correlation undefined: an input has zero variance")
    r = float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))
    nu = n - 2
    if abs(r) == 1.0:
        return r, 0.0
    t_sq = r * r * nu / (1.0 - r * r)
    p = float(betainc(nu / 2.0, 0.5, nu / (nu + t_sq)))
    return r, p


def _fmt(v: float) -> str:
    return format(float(v), ".9g")


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{title}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _scale(values: np.ndarray, lo_px: float, hi_px: float) -> np.ndarray:
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax == vmin:
        return np.full(values.shape, (lo_px + hi_px) / 2.0)
    return lo_px + (values - vmin) / (vmax - vmin) * (hi_px - lo_px)


def _polyline(xs: np.ndarray, ys: np.ndarray, color: str) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" points="{pts}"/>'


def _curve_svg(name: str, curve: ConvergenceCurve) -> str:
    w, h = 640, 480
    lines = _svg_header(w, h, f"convergence of {name}")
    xs = _scale(np.asarray(curve.sample_sizes, dtype=np.float64), 60, w - 20)
    lines.append(_polyline(xs, _scale(curve.means, h - 40, 20), "black"))
    lines.append(_polyline(xs, _scale(curve.stds, h - 40, 20), "gray"))
    for x, s in zip(xs, curve.sample_sizes):
        lines.append(
            f'<text x="{_fmt(x)}" y="{h - 20}" font-size="10" '
            f'text-anchor="middle">{s}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _scatter_svg(table: CategoryScoreTable) -> str:
    w, h = 480, 480
    lines = _svg_header(w, h, "score agreement by category")
    xv = np.array([r.neuroscore for r in table.rows])
    yv = np.array([r.synthetic_neuroscore for r in table.rows])
    xs = _scale(xv, 60, w - 20)
    ys = _scale(yv, h - 40, 20)
    for x, y, row in zip(xs, ys, table.rows):
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="black"/>')
        lines.append(
            f'<text x="{_fmt(x + 6)}" y="{_fmt(y - 6)}" '
            f'font-size="10">{row.category}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def score_curve_svg(values: np.ndarray, title: str) -> str:
    """Polyline of scores against their position, highest-ranked first."""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    w, h = 640, 480
    lines = _svg_header(w, h, title)
    xs = _scale(np.arange(values.size, dtype=np.float64), 60, w - 20)
    lines.append(_polyline(xs, _scale(values, h - 40, 20), "black"))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _csv_cell(v: float | None) -> str:
    return "" if v is None else _fmt(v)


def emit_report(
    table: CategoryScoreTable,
    curves: dict[str, ConvergenceCurve],
    destination: str | Path,
) -> list[Path]:
    """Write scores.csv plus per-curve CSV/SVG files; returns written paths.

    With no curves only the CSV table is written. Output bytes depend only
    on the inputs (no timestamps, no environment lookups).
    """
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    lines = ["category,neuroscore,synthetic_neuroscore,be_accuracy,"
             "inception_score,mmd2,fid"]
    for row in table.rows:
        lines.append(
            ",".join(
                [
                    row.category,
                    _fmt(row.neuroscore),
                    _fmt(row.synthetic_neuroscore),
                    _csv_cell(row.be_accuracy),
                    _csv_cell(row.inception_score),
                    _csv_cell(row.mmd2),
                    _csv_cell(row.fid),
                ]
            )
        )
    path = dest / "scores.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    written.append(path)

    for name, curve in curves.items():
        rows = ["size,mean,std"]
        for s, m, sd in zip(curve.sample_sizes, curve.means, curve.stds):
            rows.append(f"{s},{_fmt(m)},{_fmt(sd)}")
        cpath = dest / f"curve_{name}.csv"
        cpath.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
        written.append(cpath)
        spath = dest / f"curve_{name}.svg"
        spath.write_text(_curve_svg(name, curve), encoding="utf-8", newline="\n")
        written.append(spath)

    if curves and table.rows:
        spath = dest / "scatter.svg"
        spath.write_text(_scatter_svg(table), encoding="utf-8", newline="\n")
        written.append(spath)
    return written
