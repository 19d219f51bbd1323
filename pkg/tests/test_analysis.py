"""Tests for convergence curves, correlation, and report emission."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import pearsonr

from neuroscore import (
    CategoryScoreTable,
    ConfigError,
    ConvergenceCurve,
    DimensionError,
    ScoreRow,
    convergence_curve,
    emit_report,
    pearson,
    score_curve_svg,
)


def t_two_sided_p(t_value, nu):
    """Two-sided tail probability by direct quadrature of the t density."""
    def pdf(u):
        c = math.gamma((nu + 1) / 2.0) / (math.sqrt(nu * math.pi)
                                          * math.gamma(nu / 2.0))
        return c * (1.0 + u * u / nu) ** (-(nu + 1) / 2.0)

    tail, _ = quad(pdf, abs(t_value), np.inf)
    return 2.0 * tail


class TestConvergenceCurve:
    def test_full_size_collapses_exactly(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=40)
        curve = convergence_curve(a, sizes=[40], repeats=50, seed=0)
        assert curve.stds[0] == 0.0
        assert curve.means[0] == a.mean()

    def test_constant_amplitudes_have_zero_spread(self):
        a = np.full(30, 2.75)
        curve = convergence_curve(a, sizes=[2, 5, 17, 30], repeats=40, seed=1)
        assert np.all(curve.stds == 0.0)
        assert np.allclose(curve.means, 2.75)

    def test_spread_tracks_standard_error(self):
        """Subsample-mean spread should match sigma/sqrt(n) with a finite
        population correction, within 20% at 200 repeats."""
        rng = np.random.default_rng(2)
        a = rng.normal(size=1500)
        sizes = [5, 20, 80]
        curve = convergence_curve(a, sizes=sizes, repeats=200, seed=3)
        sigma = a.std()
        n_total = a.size
        for size, got in zip(sizes, curve.stds):
            fpc = math.sqrt((n_total - size) / (n_total - 1))
            expected = sigma / math.sqrt(size) * fpc
            assert abs(got / expected - 1.0) < 0.20, (size, got, expected)

    def test_size_out_of_range(self):
        a = np.zeros(10)
        with pytest.raises(ConfigError):
            convergence_curve(a, sizes=[11])
        with pytest.raises(ConfigError):
            convergence_curve(a, sizes=[0])

    def test_deterministic_and_order_independent(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=60)
        fwd = convergence_curve(a, sizes=[5, 20], repeats=30, seed=7)
        rev = convergence_curve(a, sizes=[20, 5], repeats=30, seed=7)
        assert np.array_equal(fwd.means, rev.means[::-1])
        assert np.array_equal(fwd.stds, rev.stds[::-1])
        again = convergence_curve(a, sizes=[5, 20], repeats=30, seed=7)
        assert np.array_equal(fwd.means, again.means)

    def test_doubling_size_shrinks_spread(self):
        shrank = 0
        for run in range(50):
            rng = np.random.default_rng(100 + run)
            a = rng.normal(size=200)
            curve = convergence_curve(a, sizes=[10, 20], repeats=50, seed=run)
            shrank += curve.stds[1] < curve.stds[0]
        assert shrank >= 48

    def test_curve_validation(self):
        with pytest.raises(DimensionError):
            ConvergenceCurve(sample_sizes=[2, 4], means=np.zeros(3),
                             stds=np.zeros(2))
        with pytest.raises(ConfigError):
            ConvergenceCurve(sample_sizes=[2], means=np.zeros(1),
                             stds=np.zeros(1), repeats=0)


class TestPearson:
    def test_positive_affine_is_one(self):
        x = np.array([1.0, 2.0, 5.0, 7.0])
        r, p = pearson(x, 2.0 * x + 1.0)
        assert abs(r - 1.0) < 1e-12
        assert p == 0.0

    def test_negation_is_minus_one(self):
        x = np.array([0.5, 1.5, -2.0, 4.0])
        r, _ = pearson(x, -x)
        assert abs(r + 1.0) < 1e-12

    def test_textbook_example(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        y = np.array([2.0, 1.0, 4.0, 3.0, 7.0])
        n = 5
        sxy = np.sum((x - x.mean()) * (y - y.mean()))
        sxx = np.sum((x - x.mean()) ** 2)
        syy = np.sum((y - y.mean()) ** 2)
        r_direct = sxy / math.sqrt(sxx * syy)
        t = r_direct * math.sqrt((n - 2) / (1.0 - r_direct**2))
        p_direct = t_two_sided_p(t, n - 2)
        r, p = pearson(x, y)
        assert abs(r - r_direct) < 1e-10
        assert abs(p - p_direct) < 1e-6

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(5, 40))
            x = rng.normal(size=n)
            y = 0.4 * x + rng.normal(size=n)
            r, p = pearson(x, y)
            ref = pearsonr(x, y)
            assert abs(r - ref.statistic) < 1e-12
            assert abs(p - ref.pvalue) < 1e-10

    def test_zero_variance_rejected(self):
        with pytest.raises(ConfigError):
            pearson(np.ones(5), np.arange(5.0))

    def test_short_input_rejected(self):
        with pytest.raises(ConfigError):
            pearson(np.array([1.0, 2.0]), np.array([3.0, 4.0]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            pearson(np.zeros(4), np.zeros(5))


def sample_table():
    return CategoryScoreTable(rows=[
        ScoreRow(category="cat1", neuroscore=1.0, synthetic_neuroscore=1.1,
                 fid=12.5),
        ScoreRow(category="cat2", neuroscore=2.0, synthetic_neuroscore=1.9,
                 be_accuracy=0.8, inception_score=3.2, mmd2=0.01, fid=8.0),
    ])


def sample_curve(seed=0):
    a = np.random.default_rng(seed).normal(size=50)
    return convergence_curve(a, sizes=[2, 10, 50], repeats=20, seed=seed)


class TestEmitReport:
    def test_no_curves_writes_csv_only(self, tmp_path):
        written = emit_report(sample_table(), {}, tmp_path)
        assert [p.name for p in written] == ["scores.csv"]
        assert not list(tmp_path.glob("*.svg"))

    def test_scores_csv_layout(self, tmp_path):
        emit_report(sample_table(), {}, tmp_path)
        lines = (tmp_path / "scores.csv").read_text().splitlines()
        assert lines[0] == ("category,neuroscore,synthetic_neuroscore,"
                            "be_accuracy,inception_score,mmd2,fid")
        assert lines[1].startswith("cat1,1,1.1,,")
        assert lines[1].endswith(",12.5")
        assert lines[2] == "cat2,2,1.9,0.8,3.2,0.01,8"

    def test_one_curve_emits_csv_and_svg(self, tmp_path):
        written = emit_report(sample_table(), {"overall": sample_curve()},
                              tmp_path)
        names = {p.name for p in written}
        assert names == {"scores.csv", "curve_overall.csv",
                         "curve_overall.svg", "scatter.svg"}
        svg = (tmp_path / "curve_overall.svg").read_text()
        assert svg.count("<polyline") == 2
        csv = (tmp_path / "curve_overall.csv").read_text().splitlines()
        assert csv[0] == "size,mean,std"
        assert len(csv) == 4

    def test_no_scatter_without_rows(self, tmp_path):
        written = emit_report(CategoryScoreTable(rows=[]),
                              {"overall": sample_curve()}, tmp_path)
        assert "scatter.svg" not in {p.name for p in written}

    def test_byte_deterministic(self, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        curves = {"overall": sample_curve(3), "cat1": sample_curve(4)}
        emit_report(sample_table(), curves, a_dir)
        emit_report(sample_table(), curves, b_dir)
        for path in sorted(a_dir.iterdir()):
            assert path.read_bytes() == (b_dir / path.name).read_bytes()

    def test_duplicate_categories_rejected(self):
        with pytest.raises(ConfigError):
            CategoryScoreTable(rows=[
                ScoreRow(category="a", neuroscore=1.0,
                         synthetic_neuroscore=1.0),
                ScoreRow(category="a", neuroscore=2.0,
                         synthetic_neuroscore=2.0),
            ])

    def test_score_curve_svg_structure(self):
        svg = score_curve_svg(np.array([3.0, 2.0, 1.0]), "ranking")
        assert svg.startswith("<svg ")
        assert "<polyline" in svg
        assert "<title>ranking</title>" in svg
        assert svg.endswith("</svg>\n")
