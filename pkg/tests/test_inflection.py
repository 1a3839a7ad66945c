import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compmc.errors import ConfigError, InsufficientDataError
from compmc.inflection import (
    SCORED_SERIES,
    TrendWeights,
    feature_names,
    label_series,
    score_series,
    score_window,
    trend_delta,
    write_labeled_csv,
)

from test_ingest import series


def test_trend_delta_examples():
    assert trend_delta([100, 90, 70, 50], "down") == 0.5
    assert trend_delta([100, 90, 70, 50], "up") == 0.0
    assert trend_delta([7, 7, 7, 7], "down") == trend_delta([7, 7, 7, 7], "up") == 0.0
    assert trend_delta([100, 150, 200, 300], "up") == 1.0
    assert trend_delta([0, 1, 2, 3], "up") == 0.0
    with pytest.raises(ConfigError):
        trend_delta([1, 2, 3], "up")
    with pytest.raises(ConfigError):
        trend_delta([1, 2, 3, 4], "sideways")


def halving_bundle():
    return {
        "ndic": [100, 80, 60, 50],
        "current_confirmed": [1000, 800, 600, 500],
        "cured_rate": [20, 25, 30, 40],
        "death_rate": [3, 3, 3, 3],
    }


def mirror(bundle):
    return {
        "ndic": bundle["ndic"][::-1],
        "current_confirmed": bundle["current_confirmed"][::-1],
        "cured_rate": bundle["death_rate"],
        "death_rate": bundle["cured_rate"],
    }


def test_halving_window():
    s = score_window(halving_bundle())
    assert s.win_score == pytest.approx(0.375, abs=1e-15)
    assert s.lose_score == 0.0
    assert s.label == 1


def test_flat_window_loses():
    flat = {k: [5.0] * 4 for k in SCORED_SERIES}
    s = score_window(flat)
    assert s.win_score == s.lose_score == 0.0 and s.label == 0


def test_mirrored_window_loses():
    s = score_window(mirror(halving_bundle()))
    assert s.win_score == 0.0
    assert s.lose_score > 0
    assert s.label == 0


def test_weights_validated():
    with pytest.raises(ConfigError):
        TrendWeights(0, 0, 0)
    with pytest.raises(ConfigError):
        TrendWeights(-0.1, 0.1, 0.1)


def test_zero_start_is_flagged():
    b = halving_bundle()
    b["death_rate"] = [0, 0, 0, 1]
    assert "undefined-trend:death_rate" in score_window(b).flags


def ten_day_bundle(kind):
    ndic = [1000 * 0.8**t for t in range(10)]
    cc = [5000 * 0.9**t for t in range(10)]
    cured = [10 * 1.2**t for t in range(10)]
    death = [2.0] * 10
    b = {"ndic": ndic, "current_confirmed": cc, "cured_rate": cured, "death_rate": death}
    if kind == "lose":
        b = {"ndic": ndic[::-1], "current_confirmed": cc[::-1], "cured_rate": death, "death_rate": cured}
    return {k: series(k, v) for k, v in b.items()}


@pytest.mark.parametrize("kind, label", [("win", 1), ("lose", 0)])
def test_ten_day_bundles(kind, label):
    data, scores = label_series(ten_day_bundle(kind))
    assert len(data) == 7 and len(scores) == 7
    assert data.y.tolist() == [label] * 7
    assert data.feature_names == feature_names()


def reference_labels(arrays, w=(0.1, 0.15, 0.25)):
    """Plain loop over windows without the library helpers."""

    def clip(v):
        return min(1.0, max(0.0, v))

    out = []
    n = len(arrays["ndic"])
    for t in range(3, n):
        rel = {k: (arrays[k][t] - arrays[k][t - 3]) / abs(arrays[k][t - 3]) for k in arrays}
        win = w[0] * clip(-rel["ndic"]) + w[1] * clip(-rel["current_confirmed"]) + w[2] * clip(rel["cured_rate"])
        lose = w[0] * clip(rel["ndic"]) + w[1] * clip(rel["current_confirmed"]) + w[2] * clip(rel["death_rate"])
        out.append((win, lose, int(win > lose)))
    return out


def test_alternating_bundle_against_reference():
    t = np.arange(14)
    arrays = {
        "ndic": 500 + 200 * np.sin(t),
        "current_confirmed": 3000 + 800 * np.cos(0.7 * t),
        "cured_rate": 40 + 15 * np.sin(0.5 * t + 1),
        "death_rate": 4 + 1.5 * np.cos(1.3 * t),
    }
    data, scores = label_series({k: series(k, v.tolist()) for k, v in arrays.items()})
    ref = reference_labels(arrays)
    assert len(scores) == len(ref) == 11
    assert {lab for *_, lab in ref} == {0, 1}
    for s, (win, lose, lab) in zip(scores, ref):
        assert s.win_score == pytest.approx(win, abs=1e-12)
        assert s.lose_score == pytest.approx(lose, abs=1e-12)
        assert s.label == lab
    # feature row layout: current value first, then 1..3 days back
    row = data.X[0]
    names = list(data.feature_names)
    assert row[names.index("ndic")] == arrays["ndic"][3]
    assert row[names.index("yester3days_ndic")] == arrays["ndic"][0]


def test_too_short():
    with pytest.raises(InsufficientDataError):
        score_series({k: [1.0, 2.0, 3.0] for k in SCORED_SERIES})


def test_feature_names_include_lags():
    names = feature_names()
    assert "yester2days_ndic" in names and "yester3days_ndic" in names
    assert len(names) == 16


def test_labeled_csv(tmp_path):
    data, _ = label_series(ten_day_bundle("win"))
    p = tmp_path / "labeled.csv"
    write_labeled_csv(p, data)
    lines = p.read_text().splitlines()
    assert lines[0].split(",") == ["date", *feature_names(), "win"]
    assert len(lines) == 8


positive = st.floats(0.5, 1e4)
bundles = st.fixed_dictionaries({k: st.lists(positive, min_size=4, max_size=4) for k in SCORED_SERIES})


@settings(max_examples=100)
@given(bundles, st.floats(0.01, 1e3))
def test_scale_invariance(bundle, k):
    a = score_window(bundle)
    b = score_window({n: [k * v for v in vals] for n, vals in bundle.items()})
    assert b.label == a.label or abs(a.win_score - a.lose_score) < 1e-9
    assert b.win_score == pytest.approx(a.win_score, abs=1e-9)
    assert b.lose_score == pytest.approx(a.lose_score, abs=1e-9)


@settings(max_examples=100)
@given(bundles, st.floats(0.01, 100))
def test_weight_scaling_keeps_label(bundle, k):
    a = score_window(bundle)
    b = score_window(bundle, TrendWeights(0.1 * k, 0.15 * k, 0.25 * k))
    if abs(a.win_score - a.lose_score) > 1e-9:
        assert b.label == a.label


@settings(max_examples=200)
@given(st.lists(st.floats(-1e4, 1e4), min_size=4, max_size=4))
def test_at_most_one_direction(values):
    up, down = trend_delta(values, "up"), trend_delta(values, "down")
    assert 0 <= up <= 1 and 0 <= down <= 1
    assert up == 0 or down == 0
