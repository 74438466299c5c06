import numpy as np
import pytest

from amsdetect import (InputError, detect_windowed, detections_to_csv,
                       fit_kmeans, latency_report)

# a 1-D model whose clusters sit at 0.1 (normal) and 0.9 (anomalous)
_TRAIN = np.array([0.08, 0.1, 0.12, 0.88, 0.9, 0.92])[:, None]


def _model():
    return fit_kmeans(_TRAIN, seed=0)


def test_detects_at_first_anomalous_window():
    model = _model()
    for j in range(5):
        feats = np.full((5, 1), 0.1)
        feats[j] = 0.9
        res = detect_windowed(model, feats, samples_per_window=300,
                              sample_period=2e-8, anomalous_cluster=1)
        assert res.first_anomalous_window == j
        assert res.windows_consumed == j + 1
        assert res.latency_seconds == pytest.approx((j + 1) * 300 * 2e-8)
        assert res.speedup == pytest.approx(5.0 / (j + 1))
        assert res.anomalous


def test_clean_signal_consumes_every_window():
    res = detect_windowed(_model(), np.full((5, 1), 0.1), 300, 2e-8)
    assert res.first_anomalous_window is None
    assert not res.anomalous
    assert res.windows_consumed == 5
    assert res.speedup == 1.0


def test_early_stop_equivalence():
    feats = np.full((6, 1), 0.1)
    feats[2] = 0.9
    feats[4] = 0.9
    eager = detect_windowed(_model(), feats, 100, 1e-8, stop_early=True)
    lazy = detect_windowed(_model(), feats, 100, 1e-8, stop_early=False)
    assert eager.first_anomalous_window == lazy.first_anomalous_window == 2
    assert eager.windows_consumed == 3
    assert lazy.windows_consumed == 6
    assert lazy.per_window_assignment == [0, 0, 1, 0, 1, 0]
    assert eager.per_window_assignment == [0, 0, 1]


def test_headline_latency_numbers_are_exact():
    """First-window detection on the default grid: 4 us latency, 5x speedup."""
    feats = np.full((5, 1), 0.1)
    feats[0] = 0.9
    dt = 20e-6 / 1500
    res = detect_windowed(_model(), feats, 300, dt)
    assert res.latency_seconds == 4e-6       # exact in binary floating point
    assert res.speedup == 5.0


def test_detect_input_validation():
    model = _model()
    with pytest.raises(InputError):
        detect_windowed(model, np.empty((0, 1)), 300, 1e-8)
    with pytest.raises(InputError):
        detect_windowed(model, np.full((5, 1), 0.1), 0, 1e-8)
    with pytest.raises(InputError):
        detect_windowed(model, np.full((5, 1), 0.1), 300, 0.0)
    with pytest.raises(InputError):
        detect_windowed(model, np.full((5, 1), 0.1), 300, 1e-8,
                        anomalous_cluster=7)


def test_latency_report_aggregates():
    model = _model()
    hot = np.full((5, 1), 0.1)
    hot[0] = 0.9
    cold = np.full((5, 1), 0.1)
    r1 = detect_windowed(model, hot, 300, 1e-8, sample_id="hot")
    r2 = detect_windowed(model, cold, 300, 1e-8, sample_id="cold")
    rep = latency_report([r1, r2])
    assert rep["n_signals"] == 2
    assert rep["n_detected"] == 1
    assert rep["detect_rate"] == 0.5
    assert rep["mean_speedup"] == pytest.approx((5.0 + 1.0) / 2)
    assert rep["mean_latency_s"] == pytest.approx(300 * 1e-8)
    none_rep = latency_report([r2])
    assert none_rep["mean_latency_s"] is None
    with pytest.raises(InputError):
        latency_report([])


def test_detections_csv(tmp_path):
    model = _model()
    hot = np.full((4, 1), 0.1)
    hot[1] = 0.9
    res = detect_windowed(model, hot, 250, 1e-8, sample_id="sig-7")
    path = tmp_path / "det.csv"
    detections_to_csv([res], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "sample_id,first_window,m,latency_s,speedup"
    assert lines[1].startswith("sig-7,1,2,")
