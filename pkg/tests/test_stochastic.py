import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compmc.errors import ConfigError
from compmc.stochastic import (
    DailySchedule,
    FixedSchedule,
    GrowthSchedule,
    Normal,
    PointMass,
    RngStream,
    Uniform,
    growth_normal,
    parse_distribution,
    philox4x32,
    sample,
    uniform_open,
    variable_id,
)

# published known-answer vectors for Philox4x32-10 (Random123 kat_vectors)
PHILOX_KAT = [
    ([0, 0, 0, 0], [0, 0], [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]),
    (
        [0xFFFFFFFF] * 4,
        [0xFFFFFFFF] * 2,
        [0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD],
    ),
    (
        [0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344],
        [0xA4093822, 0x299F31D0],
        [0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1],
    ),
]


@pytest.mark.parametrize("counter, key, expected", PHILOX_KAT)
def test_philox_known_answers(counter, key, expected):
    assert philox4x32(counter, key).tolist() == expected


def test_philox_vectorised_matches_scalar():
    ctrs = np.array([[i, 2 * i, 3, 4] for i in range(5)])
    batch = philox4x32(ctrs, [7, 9])
    for i in range(5):
        assert batch[i].tolist() == philox4x32(ctrs[i], [7, 9]).tolist()


def test_golden_uniforms():
    u = uniform_open(42, [0, 1, 2, 3], variable_id("ppi_per_day"), 5)
    assert u.tolist() == [0.814804117002172, 0.0997375285937025, 0.3483762953663067, 0.7611729531535225]


def test_golden_normals():
    z = Normal(0, 1).from_uniform(uniform_open(2020, [0, 1, 2], 7, 0))
    assert z.tolist() == [0.7851414328532165, 0.9463552420485758, 1.1902985766326122]
    s = RngStream(42, 0, "days_till_death", 0)
    assert s.uniform() == 0.8614523545595716
    assert sample(Normal(35.9, 6.37), s) == 42.82334713355455


def test_variable_ids_are_stable():
    assert variable_id("ppi_per_day") == 2910260333
    assert variable_id("days_for_recovery") == 2990955749


def test_uniforms_open_interval():
    u = uniform_open(1, np.arange(100_000), 3, 0)
    assert u.min() > 0.0 and u.max() < 1.0


def test_seed_range():
    with pytest.raises(ConfigError):
        uniform_open(-1, [0], 0, 0)
    with pytest.raises(ConfigError):
        uniform_open(2**64, [0], 0, 0)


def test_uniform_in_bounds():
    u = Uniform(11, 26)
    for t in range(200):
        v = sample(u, RngStream(9, t, "days_for_recovery", 0))
        assert 11 <= v <= 26


def test_degenerate_normal_exact():
    assert sample(Normal(35.9, 0), RngStream(1, 0, "x", 0)) == 35.9


def test_point_mass_exact():
    assert sample(PointMass(3.25), RngStream(1, 5, "x", 2)) == 3.25


def test_normal_mean_clt():
    x = Normal(35.9, 6.37).from_uniform(uniform_open(42, np.arange(10_000), 1, 0))
    assert abs(x.mean() - 35.9) < 3 * 6.37 / math.sqrt(10_000)


def test_uniform_mean():
    n = 100_000
    x = Uniform(11, 26).from_uniform(uniform_open(42, np.arange(n), 2, 0))
    assert abs(x.mean() - 18.5) < 4 * 15 / math.sqrt(12 * n)


def test_stream_independence_proxy():
    n = 10_000
    a = uniform_open(42, np.arange(n), variable_id("a"), 0)
    b = uniform_open(42, np.arange(n), variable_id("b"), 0)
    rho = np.corrcoef(a[1:], b[:-1])[0, 1]
    assert abs(rho) < 0.05
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


@settings(max_examples=100)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**32 - 1), st.integers(0, 1000))
def test_same_stream_same_value(seed, trial, day):
    s1 = RngStream(seed, trial, "v", day)
    s2 = RngStream(seed, trial, "v", day)
    assert s1.uniform() == s2.uniform()


def test_invalid_parameters():
    with pytest.raises(ConfigError):
        Normal(0, -1)
    with pytest.raises(ConfigError):
        Uniform(2, 1)
    with pytest.raises(ConfigError):
        PointMass(float("nan"))


def test_growth_normal_examples():
    assert growth_normal(1000, 0.05, 0, 9) == Normal(1000, 9)
    g = growth_normal(1000, 0.05, 2, 9)
    assert g.mu == pytest.approx(1102.5, abs=1e-9)
    assert g.sigma == 9
    assert {growth_normal(500, 0.0, d, 9).mu for d in range(10)} == {500.0}


def test_growth_normal_preconditions():
    for args in [(0, 0.1, 0, 1), (10, -1, 0, 1), (10, 0.1, -1, 1), (10, 0.1, 0, -1)]:
        with pytest.raises(ConfigError):
            growth_normal(*args)


def test_parse_distribution_literals():
    assert parse_distribution({"normal": {"mean": 1, "stdev": 2}}) == FixedSchedule(Normal(1, 2))
    assert parse_distribution({"uniform": {"min": 11, "max": 26}}) == FixedSchedule(Uniform(11, 26))
    assert parse_distribution({"point": 4}) == FixedSchedule(PointMass(4))
    g = parse_distribution({"growth_normal": {"initial": 100, "daily_rate": 0.1, "stdev": 9}})
    assert g == GrowthSchedule(100, 0.1, 9)
    assert g.at(1).mu == pytest.approx(110.0)
    d = parse_distribution({"daily": [{"point": 1}, {"point": 2}]})
    assert isinstance(d, DailySchedule) and d.at(1) == PointMass(2)
    for bad in [{"beta": {}}, {"normal": {"mean": 1}}, [], {"point": "x"}]:
        with pytest.raises(ConfigError):
            parse_distribution(bad)


def test_literal_round_trip():
    for sched in [
        FixedSchedule(Normal(1, 2)),
        FixedSchedule(Uniform(0, 1)),
        FixedSchedule(PointMass(3)),
        GrowthSchedule(100, 0.02, 9),
    ]:
        assert parse_distribution(sched.to_literal()) == sched
