"""Tests for the synthetic EEG generator and its ground-truth guarantees."""

import numpy as np
import pytest

from neuroscore import (
    CategorySpec,
    ConfigError,
    DimensionError,
    SimConfig,
    draw_amplitudes,
    fit_filter,
    make_features,
    neuroscore,
    simulate,
    standard_config,
)


class TestConfigValidation:
    def test_bad_channels(self):
        with pytest.raises(ConfigError):
            SimConfig(channels=0)

    def test_latency_outside_span(self):
        with pytest.raises(ConfigError):
            SimConfig(span=(0.0, 1.0), p300_latency=1.5)

    def test_reversed_span(self):
        with pytest.raises(ConfigError):
            SimConfig(span=(1.0, 0.0))

    def test_duplicate_labels(self):
        with pytest.raises(ConfigError):
            SimConfig(categories=[CategorySpec("a", 1.0),
                                  CategorySpec("a", 2.0)])

    def test_negative_noise(self):
        with pytest.raises(ConfigError):
            SimConfig(noise_scale=-0.1)

    def test_zero_count_category(self):
        with pytest.raises(ConfigError):
            CategorySpec("a", 1.0, count=0)

    def test_pattern_length_checked(self):
        with pytest.raises(DimensionError):
            SimConfig(channels=4, spatial_pattern=np.ones(3))

    def test_mixing_shape_checked(self):
        with pytest.raises(DimensionError):
            SimConfig(channels=4, noise_mixing=np.eye(3))

    def test_round_trip(self):
        cfg = standard_config(seed=9, trials_per_category=7)
        restored = SimConfig.from_dict(cfg.to_dict())
        assert restored == cfg

    def test_round_trip_with_arrays(self):
        cfg = SimConfig(channels=3, spatial_pattern=np.array([1.0, 0.0, 0.0]),
                        noise_mixing=np.eye(3))
        restored = SimConfig.from_dict(cfg.to_dict())
        assert np.array_equal(restored.spatial_pattern, cfg.spatial_pattern)
        assert np.array_equal(restored.noise_mixing, cfg.noise_mixing)

    def test_resolved_pattern_is_unit(self):
        cfg = SimConfig(seed=3)
        p = cfg.resolved_pattern()
        assert np.linalg.norm(p) == pytest.approx(1.0)
        assert np.array_equal(p, SimConfig(seed=3).resolved_pattern())

    def test_resolved_mixing_is_orthogonal(self):
        cfg = SimConfig(seed=4)
        q = cfg.resolved_mixing()
        assert np.allclose(q.T @ q, np.eye(cfg.channels), atol=1e-12)


class TestAmplitudes:
    def test_truncated_at_zero(self):
        cfg = SimConfig(categories=[CategorySpec("a", 0.1, 2.0, 500)], seed=1)
        a = draw_amplitudes(cfg)
        assert a.shape == (500,)
        assert np.all(a >= 0.0)

    def test_zero_std_is_exact(self):
        cfg = SimConfig(categories=[CategorySpec("a", 2.0, 0.0, 10)])
        assert np.array_equal(draw_amplitudes(cfg), np.full(10, 2.0))

    def test_per_category_streams_independent(self):
        """Growing one category's count must not disturb another's draws."""
        base = SimConfig(categories=[CategorySpec("x", 1.0, 0.2, 5),
                                     CategorySpec("y", 2.0, 0.2, 5)], seed=2)
        grown = SimConfig(categories=[CategorySpec("x", 1.0, 0.2, 9),
                                      CategorySpec("y", 2.0, 0.2, 5)], seed=2)
        a_base = draw_amplitudes(base)
        a_grown = draw_amplitudes(grown)
        assert np.array_equal(a_base[5:], a_grown[9:])
        assert np.array_equal(a_base[:5], a_grown[:5])

    def test_category_means_near_targets(self):
        cfg = standard_config(seed=5, trials_per_category=400)
        out = simulate(cfg)
        truth = out.true_category_scores()
        for label, target_mean in (("cat1", 1.0), ("cat2", 2.0), ("cat3", 3.0)):
            assert abs(truth[label] - target_mean) < 0.05


class TestNoiselessGeneration:
    def test_closed_form_trials(self):
        cfg = SimConfig(
            channels=5,
            categories=[CategorySpec("a", 2.0, 0.0, 4)],
            standard_trial_count=3,
            noise_scale=0.0,
            seed=6,
        )
        out = simulate(cfg)
        pattern = cfg.resolved_pattern()
        t = np.arange(cfg.n_timepoints) / cfg.sample_rate
        bump = np.exp(-0.5 * ((t - 0.5) / 0.06) ** 2)
        expected = np.outer(pattern, 2.0 * bump)
        for i in range(4):
            assert np.array_equal(out.target.data[i], expected)
        assert np.all(out.standard.data == 0.0)

    def test_latency_recovered_within_three_samples(self):
        cfg = SimConfig(
            categories=[CategorySpec("a", 1.0, 0.2, 12),
                        CategorySpec("b", 2.0, 0.2, 12)],
            standard_trial_count=5,
            noise_scale=0.0,
            seed=7,
        )
        out = simulate(cfg)
        filt = fit_filter(out.target, out.standard)
        assert abs(filt.t_optimal - 0.5) <= 3.0 / 250.0 + 1e-9

    def test_noiseless_scores_exactly_proportional(self):
        cfg = SimConfig(
            categories=[CategorySpec("a", 1.0, 0.2, 15),
                        CategorySpec("b", 3.0, 0.2, 15)],
            standard_trial_count=5,
            noise_scale=0.0,
            seed=8,
        )
        out = simulate(cfg)
        result = neuroscore(out.target, out.standard)
        truth = out.true_category_scores()
        ratio_a = result.per_category["a"][0] / truth["a"]
        ratio_b = result.per_category["b"][0] / truth["b"]
        assert ratio_b == pytest.approx(ratio_a, rel=1e-6)


class TestDeterminism:
    def test_identical_seeds_bitwise(self):
        cfg = standard_config(seed=11, trials_per_category=10)
        a = simulate(cfg)
        b = simulate(standard_config(seed=11, trials_per_category=10))
        assert np.array_equal(a.target.data, b.target.data)
        assert np.array_equal(a.standard.data, b.standard.data)
        assert np.array_equal(a.planted_amplitudes, b.planted_amplitudes)
        assert np.array_equal(a.image_features, b.image_features)

    def test_different_seeds_differ(self):
        a = simulate(standard_config(seed=1, trials_per_category=5))
        b = simulate(standard_config(seed=2, trials_per_category=5))
        assert not np.array_equal(a.target.data, b.target.data)

    def test_labels_follow_config_order(self):
        out = simulate(standard_config(seed=0, trials_per_category=3))
        assert out.target.category_labels == (
            ["cat1"] * 3 + ["cat2"] * 3 + ["cat3"] * 3)


class TestSnrSweep:
    def test_recovery_degrades_monotonically(self):
        """Recovered and planted single-trial amplitudes must correlate
        strongly at low noise and lose correlation monotonically."""
        noises = (0.05, 0.2, 0.5, 1.0, 2.0)
        rs = []
        for noise in noises:
            cfg = standard_config(seed=7, trials_per_category=100)
            cfg.noise_scale = noise
            out = simulate(cfg)
            result = neuroscore(out.target, out.standard)
            rs.append(np.corrcoef(result.amplitudes,
                                  out.planted_amplitudes)[0, 1])
        assert rs[1] > 0.95, f"r at noise 0.2 was {rs[1]:.4f}"
        assert all(a > b for a, b in zip(rs, rs[1:])), rs


class TestStandards:
    def test_mean_standard_vanishes(self):
        cfg = standard_config(seed=12, trials_per_category=50)
        out = simulate(cfg)
        mean_trial = out.standard.data.mean(axis=0)
        floor = cfg.noise_scale / np.sqrt(out.standard.n_trials)
        assert np.abs(mean_trial).max() < 5.0 * floor

    def test_standards_carry_no_bump(self):
        """Projecting the mean standard onto the planted pattern at the
        latency sample must stay at the noise floor."""
        cfg = standard_config(seed=13, trials_per_category=50)
        out = simulate(cfg)
        pattern = cfg.resolved_pattern()
        col = int(round((0.5 - cfg.span[0]) * cfg.sample_rate))
        mean_col = out.standard.data.mean(axis=0)[:, col]
        floor = cfg.noise_scale / np.sqrt(out.standard.n_trials)
        assert abs(pattern @ mean_col) < 5.0 * floor


class TestCategorySeparation:
    def test_ordering_recovered_in_95_percent_of_runs(self):
        hits = 0
        for seed in range(100):
            out = simulate(standard_config(seed=seed, trials_per_category=30))
            result = neuroscore(out.target, out.standard)
            scores = [result.per_category[c][0]
                      for c in ("cat1", "cat2", "cat3")]
            hits += scores[0] < scores[1] < scores[2]
        assert hits >= 95, f"ordering recovered in only {hits}/100 runs"


class TestFeatures:
    def test_noiseless_features_collinear(self):
        cfg = SimConfig(categories=[CategorySpec("a", 2.0, 0.4, 20)],
                        feature_noise_scale=0.0, feature_dim=32, seed=14)
        a = draw_amplitudes(cfg)
        f = make_features(a, cfg)
        norms = np.linalg.norm(f, axis=1)
        assert np.allclose(norms, a, atol=1e-12)
        directions = f / norms[:, None]
        assert np.allclose(directions, directions[0], atol=1e-12)

    def test_zero_amplitudes_leave_noise(self):
        cfg = SimConfig(categories=[CategorySpec("a", 1.0, 0.2, 400)],
                        feature_dim=16, feature_noise_scale=0.1, seed=15)
        f = make_features(np.zeros(400), cfg)
        assert np.abs(f.mean(axis=0)).max() < 5.0 * 0.1 / np.sqrt(400)
        assert f.std() == pytest.approx(0.1, rel=0.05)

    def test_regression_recovers_amplitudes(self):
        cfg = SimConfig(categories=[CategorySpec("a", 2.0, 0.5, 400)],
                        feature_dim=64, feature_noise_scale=0.1, seed=16)
        a = draw_amplitudes(cfg)
        f = make_features(a, cfg)
        design = np.hstack([f, np.ones((400, 1))])
        beta, *_ = np.linalg.lstsq(design, a, rcond=None)
        residual = a - design @ beta
        r2 = 1.0 - residual @ residual / ((a - a.mean()) @ (a - a.mean()))
        assert r2 > 0.9

    def test_feature_rows_align_with_trials(self):
        out = simulate(standard_config(seed=17, trials_per_category=4))
        assert out.image_features.shape == (12, 256)
        regenerated = make_features(out.planted_amplitudes, out.config)
        assert np.array_equal(out.image_features, regenerated)


class TestPinkNoise:
    def test_pink_noise_tilts_spectrum_low(self):
        cfg = standard_config(seed=18, trials_per_category=5)
        cfg.pink_noise = True
        out = simulate(cfg)
        spec = np.abs(np.fft.rfft(out.standard.data, axis=2)) ** 2
        power = spec.mean(axis=(0, 1))
        low = power[1:10].mean()
        high = power[-10:].mean()
        assert low > 5.0 * high

    def test_pink_noise_deterministic(self):
        cfg = standard_config(seed=19, trials_per_category=3)
        cfg.pink_noise = True
        a = simulate(cfg)
        cfg2 = standard_config(seed=19, trials_per_category=3)
        cfg2.pink_noise = True
        b = simulate(cfg2)
        assert np.array_equal(a.target.data, b.target.data)


class TestOutputShape:
    def test_output_invariants(self):
        out = simulate(standard_config(seed=20, trials_per_category=6))
        assert out.target.n_trials == 18
        assert out.standard.n_trials == 18
        assert out.target.n_channels == 16
        assert out.target.n_timepoints == 250
        assert out.planted_amplitudes.shape == (18,)
        assert out.target.sample_rate == 250.0
        assert out.standard.category_labels is None

    def test_true_category_scores(self):
        out = simulate(standard_config(seed=21, trials_per_category=5))
        truth = out.true_category_scores()
        labels = np.asarray(out.target.category_labels)
        for cat in ("cat1", "cat2", "cat3"):
            expected = out.planted_amplitudes[labels == cat].mean()
            assert truth[cat] == pytest.approx(expected)
        assert list(truth) == ["cat1", "cat2", "cat3"]
