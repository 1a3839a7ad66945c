import logging
import math
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compmc.errors import (
    ConfigError,
    EmptySelectionError,
    GapError,
    InsufficientDataError,
    OrderingError,
    ParseError,
    RangeError,
    SchemaError,
)
from compmc.ingest import (
    SupervisedDataset,
    TimeSeries,
    chronological_split,
    correlation_filter,
    lag_embed,
    lag_embed_joint,
    load_csv,
    write_csv,
)


def days(n, start=date(2020, 1, 22)):
    return tuple(start + timedelta(days=i) for i in range(n))


def series(name, values):
    return TimeSeries(name, days(len(values)), tuple(float(v) for v in values))


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# ---------------------------------------------------------------- load_csv


def test_load_three_rows(tmp_path):
    p = write(tmp_path, "date,ndic\n2020-01-01,100\n2020-01-02,200\n2020-01-03,300\n")
    out = load_csv(p, ["ndic"])
    assert list(out) == ["ndic"]
    assert out["ndic"].values == (100.0, 200.0, 300.0)
    assert out["ndic"].dates[0] == date(2020, 1, 1)


def test_rate_out_of_range(tmp_path):
    p = write(tmp_path, "date,cured_rate\n2020-01-01,50\n2020-01-02,150\n")
    with pytest.raises(RangeError, match="cured_rate"):
        load_csv(p)


def test_duplicated_date(tmp_path):
    p = write(tmp_path, "date,ndic\n2020-01-01,1\n2020-01-01,2\n")
    with pytest.raises(OrderingError):
        load_csv(p)


def test_missing_day_rejected(tmp_path):
    p = write(tmp_path, "date,ndic\n2020-01-01,1\n2020-01-03,2\n")
    with pytest.raises(GapError):
        load_csv(p)


def test_missing_column_named(tmp_path):
    p = write(tmp_path, "date,ndic\n2020-01-01,1\n")
    with pytest.raises(SchemaError) as exc:
        load_csv(p, ["ndic", "ndis"])
    assert exc.value.column == "ndis"
    assert "ndis" in str(exc.value)


def test_unparseable_value_reports_line(tmp_path):
    p = write(tmp_path, "date,ndic\n2020-01-01,1\n2020-01-02,abc\n")
    with pytest.raises(ParseError) as exc:
        load_csv(p)
    assert exc.value.line == 3


def test_unparseable_date(tmp_path):
    p = write(tmp_path, "date,ndic\n01/02/2020,1\n")
    with pytest.raises(ParseError):
        load_csv(p)


def test_first_column_must_be_date(tmp_path):
    p = write(tmp_path, "day,ndic\n2020-01-01,1\n")
    with pytest.raises(SchemaError):
        load_csv(p)


def test_csv_round_trip(tmp_path):
    a = series("ndic", [1.5, 2.25, 1e6])
    b = series("cured_rate", [0.1, 3.0, 99.5])
    p = tmp_path / "rt.csv"
    write_csv(p, [a, b])
    back = load_csv(p)
    assert back["ndic"] == a
    assert back["cured_rate"] == b


@pytest.mark.parametrize(
    "text, error",
    [
        ("", SchemaError),
        ("date,ndic\n2020-01-01,1,2\n", ParseError),
        ("date,ndic\n2020-01-01,nan\n", ParseError),
        ("date,ndic\n2020-01-02,1\n2020-01-01,2\n", OrderingError),
        ("date,ndic\n2020-01-01,1\n2020-01-05,2\n", GapError),
        ("date,death_rate\n2020-01-01,-1\n", RangeError),
    ],
)
def test_each_malformed_input_maps_to_one_error(tmp_path, text, error):
    p = write(tmp_path, text)
    with pytest.raises(error):
        load_csv(p)


# ---------------------------------------------------------------- lag_embed


def test_lag_embed_example():
    d = lag_embed(series("x", [1, 2, 3, 4, 5]), 2)
    assert d.rows == [((1.0, 2.0), 3.0), ((2.0, 3.0), 4.0), ((3.0, 4.0), 5.0)]
    assert d.lag == 2
    assert d.feature_names == ("x_lag2", "x_lag1")


def test_lag_embed_too_short():
    with pytest.raises(InsufficientDataError):
        lag_embed(series("x", [7]), 1)


def test_lag_embed_single_row():
    d = lag_embed(series("x", [1, 2, 3]), 2)
    assert d.rows == [((1.0, 2.0), 3.0)]


def test_lag_embed_rejects_zero_lag():
    with pytest.raises(ConfigError):
        lag_embed(series("x", [1, 2, 3]), 0)


@given(
    st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=40),
    st.integers(1, 5),
)
def test_lag_embed_reconstructs_tail(values, lag):
    if lag >= len(values):
        return
    d = lag_embed(series("v", values), lag)
    assert len(d) == len(values) - lag
    assert d.X.shape[1] == lag
    # last feature of each row followed by the targets gives back the series tail
    rebuilt = np.concatenate([d.X[:1, :].ravel(), d.y])
    assert np.array_equal(rebuilt, np.asarray(values, dtype=float))
    assert np.array_equal(d.X[1:, -1], d.y[:-1])


def test_lag_embed_joint_columns():
    a = series("a", [1, 2, 3, 4])
    b = series("b", [10, 20, 30, 40])
    d = lag_embed_joint([a, b], "b", 2)
    assert d.feature_names == ("a_lag2", "a_lag1", "b_lag2", "b_lag1")
    assert d.X[0].tolist() == [1, 2, 10, 20]
    assert d.y.tolist() == [30, 40]


def test_supervised_dataset_checks_width():
    with pytest.raises(ConfigError):
        SupervisedDataset(("a", "b"), np.zeros((3, 3)), np.zeros(3))


def test_chronological_split_keeps_order():
    d = lag_embed(series("x", list(range(1, 22))), 1)
    tr, te = chronological_split(d, 0.7)
    assert len(tr) == 14 and len(te) == 6
    assert tr.y[-1] < te.y[0]


# ---------------------------------------------------------------- correlation_filter


def dataset(columns, y):
    names = tuple(columns)
    X = np.column_stack([columns[n] for n in names])
    return SupervisedDataset(names, X, np.asarray(y, dtype=float))


def test_identical_feature_kept_at_threshold_one():
    y = np.arange(10.0) ** 1.5
    d = correlation_filter(dataset({"same": y.copy(), "noise": np.sin(np.arange(10.0))}, y), 1.0)
    assert d.feature_names == ("same",)


def test_constant_feature_dropped(caplog):
    y = np.arange(10.0)
    with caplog.at_level(logging.WARNING, logger="compmc.ingest"):
        d = correlation_filter(dataset({"c": np.ones(10), "x": y * 2}, y), 0.0)
    assert d.feature_names == ("x",)
    assert "DROPPED c" in caplog.text


def two_pass_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def test_noise_feature_dropped():
    rng = np.random.default_rng(7)
    y = rng.normal(size=1000)
    noise = rng.normal(size=1000)
    signal = y + 0.5 * rng.normal(size=1000)
    assert abs(two_pass_pearson(noise.tolist(), y.tolist())) < 0.3
    d = correlation_filter(dataset({"noise": noise, "signal": signal}, y), 0.3)
    assert d.feature_names == ("signal",)


def test_all_dropped_is_an_error():
    y = np.arange(10.0)
    with pytest.raises(EmptySelectionError):
        correlation_filter(dataset({"c": np.ones(10)}, y), 0.3)


def test_threshold_validated():
    y = np.arange(10.0)
    with pytest.raises(ConfigError):
        correlation_filter(dataset({"x": y}, y), 1.5)


def test_feature_order_preserved():
    rng = np.random.default_rng(1)
    y = rng.normal(size=50)
    cols = {"z": y * 3, "a": -y, "m": y + 0.1 * rng.normal(size=50)}
    assert correlation_filter(dataset(cols, y), 0.5).feature_names == ("z", "a", "m")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 0.9))
def test_correlation_filter_idempotent(seed, threshold):
    rng = np.random.default_rng(seed)
    y = rng.normal(size=30)
    cols = {f"f{i}": y * rng.uniform(-1, 1) + rng.normal(size=30) for i in range(5)}
    try:
        once = correlation_filter(dataset(cols, y), threshold)
    except EmptySelectionError:
        return
    twice = correlation_filter(once, threshold)
    assert twice.feature_names == once.feature_names
    assert np.array_equal(twice.X, once.X)
