import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radar_oco import (FrequencySet, HistoryWindow, JammerActionSet, RadarActionSet, Strategy,
                       decode_action, encode_action, sample)
from radar_oco.domain import inverse_cdf
from radar_oco.errors import InvalidActionError, InvalidStrategyError


def action_set(L, M):
    return RadarActionSet(FrequencySet(1e9, 1e6, L), M)


def test_frequency_set_values():
    fs = FrequencySet(10e9, 50e6, 4)
    assert fs.frequency(1) == 10e9
    assert fs.frequency(4) == 10e9 + 3 * 50e6
    np.testing.assert_allclose(fs.frequencies, [10e9, 10.05e9, 10.1e9, 10.15e9])
    with pytest.raises(ValueError):
        FrequencySet(10e9, 50e6, 1)
    with pytest.raises(ValueError):
        FrequencySet(10e9, 0.0, 4)


def test_encode_first_and_last():
    s = action_set(4, 2)
    assert encode_action((1, 1), s) == 0
    assert encode_action((4, 4), s) == 15
    assert s.size == 16


def test_encode_matches_enumeration_order():
    s = action_set(3, 3)
    # enumeration with the first sub-pulse most significant
    ordered = list(itertools.product(range(1, 4), repeat=3))
    assert encode_action((2, 1, 3), s) == ordered.index((2, 1, 3)) == 11


def test_encode_rejects_out_of_range():
    s = action_set(4, 2)
    for bad in [(0, 1), (5, 1), (1,), (1, 2, 3)]:
        with pytest.raises(InvalidActionError):
            encode_action(bad, s)
    with pytest.raises(InvalidActionError):
        decode_action(16, s)


def _pairs(limit=10**4):
    for M in range(1, 14):
        L = 2
        while L**M <= limit:
            yield L, M
            L += 1


def test_round_trip_table_all_pairs():
    """Every (L, M) with L**M <= 1e4: the decode table is a bijection onto F^M."""
    for L, M in _pairs():
        table = action_set(L, M).table()
        assert table.shape == (L**M, M)
        assert table.min() >= 0 and table.max() < L
        recoded = (table * L ** np.arange(M - 1, -1, -1)).sum(axis=1)
        np.testing.assert_array_equal(recoded, np.arange(L**M))


def test_round_trip_scalar_exhaustive():
    for L, M in _pairs():
        if M == 1 and L > 300:
            continue
        s = action_set(L, M)
        table = s.table() + 1
        for i in range(s.size):
            t = decode_action(i, s)
            assert t == tuple(table[i])
            assert encode_action(t, s) == i


def test_jammer_action_set_layout():
    rs = action_set(4, 2)
    js = JammerActionSet(rs, ("repeater",))
    assert js.size == 17
    assert not js.is_special(15) and js.is_special(16)
    assert js.special_name(16) == "repeater"
    assert js.spot_action(3) == encode_action((3, 3), rs)


def test_strategy_validation():
    Strategy([0.25, 0.75])
    Strategy([0.5, 0.5 + 5e-10])
    for bad in [[0.5, 0.6], [1.5, -0.5], [np.nan, 1.0], []]:
        with pytest.raises(InvalidStrategyError):
            Strategy(bad)
    s = Strategy.uniform(4)
    with pytest.raises(ValueError):
        s.weights[0] = 1.0


def test_sample_point_mass(rng):
    assert all(sample(Strategy([1.0, 0.0, 0.0]), rng) == 0 for _ in range(1000))


def test_sample_two_way_frequency(rng):
    draws = [sample(Strategy([0.5, 0.5]), rng) for _ in range(100_000)]
    assert abs(np.mean(np.array(draws) == 0) - 0.5) <= 0.01


def test_sample_uniform_sixteen(rng):
    draws = np.array([sample(Strategy.uniform(16), rng) for _ in range(160_000)])
    freq = np.bincount(draws, minlength=16) / draws.size
    assert np.all(np.abs(freq - 0.0625) <= 0.004)


def test_sample_reproducible():
    a = np.random.default_rng(7)
    b = np.random.default_rng(7)
    x = Strategy.normalized(np.arange(1, 9))
    assert [sample(x, a) for _ in range(200)] == [sample(x, b) for _ in range(200)]


def test_sample_rejects_degenerate(rng):
    for bad in [np.array([np.nan, 1.0]), np.array([-0.1, 1.1]), np.zeros(3)]:
        with pytest.raises(InvalidStrategyError):
            sample(bad, rng)


def test_sample_same_stream_as_block_draw():
    # the engine pre-draws uniforms in one block; single draws must match it
    a, b = np.random.default_rng(99), np.random.default_rng(99)
    np.testing.assert_array_equal([a.random() for _ in range(50)], b.random(50))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([0.0, 0.0, 1e-3, 0.2, 1.0, 7.0]), min_size=1, max_size=12)
       .filter(lambda w: sum(w) > 0),
       st.floats(0.0, 1.0, exclude_max=True))
def test_inverse_cdf_never_returns_zero_weight(weights, u):
    w = np.array(weights)
    i = int(inverse_cdf(w, u))
    assert w[i] > 0


def test_history_window():
    h = HistoryWindow(3)
    assert len(h) == 0 and not h.full
    for n in range(5):
        h = h.push(n, 10 + n)
        assert len(h) <= 3
    assert h.full
    assert h.entries == ((4, 14), (3, 13), (2, 12))
    assert h.radar_actions == (4, 3, 2)
    with pytest.raises(ValueError):
        HistoryWindow(1, ((0, 0), (1, 1)))
