"""Smoke tests for the _fatigue extension module."""

import math

import _fatigue as f


def test_scalar_stats():
    assert f.mean([1, 2, 3, 4, 5]) == 3.0
    assert abs(f.sample_variance([1, 2, 3, 4, 5]) - 2.5) < 1e-12
    assert abs(f.population_autocovariance([1, 2, 3, 4, 5]) - 2.0) < 1e-12


def test_chi_square():
    assert abs(f.chi_square_quantile(0.5, 1) - 0.45494) < 1e-4
    x = f.chi_square_quantile(0.975, 3)
    assert abs(f.chi_square_cdf(x, 3) - 0.975) < 1e-9


def test_mcd():
    assert f.choose_h(100, 0.5) == 51
    assert f.consistency_factor(1.0) == 1.0
    assert abs(f.consistency_factor(0.5) - 7.01) < 0.01
    est = f.robust_estimate([1.0, 2.0, 3.0, 4.0, 100.0], alpha=0.5)
    assert est.location == 2.0
    assert est.raw_scale == 1.0


def test_pipeline_end_to_end(tmp_path):
    spec = f.SynthSpec()
    spec.n_subjects = 2
    spec.duration_s = 12.0
    spec.sample_rate_hz = 250.0
    recs = f.generate_synthetic(spec)
    assert len(recs) == 4
    assert [label for _, label in recs] == [0, 0, 1, 1]

    ds = f.build_labeled_dataset(recs, "TP7")
    windows = f.segment_windows(int(12.0 * 250), 250.0)
    assert len(ds) == 4 * len(windows)

    model = f.train_on_dataset(ds, channel="TP7", trees=9)
    assert model.ensemble_size == 9
    assert model.channel_name == "TP7"

    # Serialization round trip preserves predictions.
    clone = f.deserialize_model(f.serialize_model(model))
    row = ds.rows[0].as_array()
    assert f.predict(model, row) == f.predict(clone, row)

    report = f.cross_validate(ds, trees=9, k=4)
    assert report["accuracy"] >= 0.9
    assert report["auc"] >= 0.95

    stream = f.stream_recording(recs[3][0], model)
    assert len(stream["decisions"]) == len(windows)
    assert stream["detection_delay_s"] > 2.0


def test_evaluation_helpers():
    assert f.roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75
    F, p = f.anova_f_test([1, 2, 3], [2, 3, 4])
    assert abs(F - 1.5) < 1e-12
    assert abs(p - 0.288) < 0.005
    assert math.isfinite(p)
