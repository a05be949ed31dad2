import numpy as np
import pytest

from radar_oco import (HistoryFeatures, HistoryWindow, OpponentModel, Strategy, ame_gradient,
                       iwe_gradient, observe, ome_gradient, predict, sample)
from radar_oco.errors import ConfigurationError, InvalidActionError

from conftest import make_game

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_iwe_examples():
    g = iwe_gradient(0.6, 2, [0.3, 0.5, 0.2])
    np.testing.assert_allclose(g.values, [0.0, 0.0, 3.0])
    assert g.estimator_tag == "iwe"
    assert not np.any(iwe_gradient(0.0, 1, [0.5, 0.5]).values)
    with pytest.raises(ZeroDivisionError):
        iwe_gradient(0.5, 0, [0.0, 1.0])


def test_iwe_exhaustive_unbiased(rng):
    for K in (2, 5, 16):
        for _ in range(20):
            x = rng.dirichlet(np.ones(K))
            x = np.maximum(x, 1e-6)
            x /= x.sum()
            loss = rng.random(K)
            mean = sum(x[a] * iwe_gradient(loss[a], a, x).values for a in range(K))
            np.testing.assert_allclose(mean, loss, rtol=0, atol=1e-12)


def test_iwe_monte_carlo(rng):
    x = Strategy.normalized([4, 3, 2, 1])
    loss = np.array([0.2, 0.9, 0.5, 0.7])
    acc = np.zeros(4)
    n = 100_000
    for _ in range(n):
        a = sample(x, rng)
        acc += iwe_gradient(loss[a], a, x).values
    assert np.max(np.abs(acc / n - loss)) <= 0.03


def test_ame_examples():
    np.testing.assert_array_equal(ame_gradient(1, SWAP).values, [1.0, 0.0])
    with pytest.raises(InvalidActionError):
        ame_gradient(2, SWAP)


def test_ame_exhaustive_unbiased(desk_game, rng):
    U = desk_game[4].entries
    for _ in range(20):
        y = rng.dirichlet(np.ones(U.shape[1]))
        mean = sum(y[b] * ame_gradient(b, U).values for b in range(U.shape[1]))
        np.testing.assert_allclose(mean, U @ y, rtol=0, atol=1e-12)


def test_ame_monte_carlo(rng):
    U = rng.random((3, 2))
    y = Strategy([0.3, 0.7])
    n = 100_000
    acc = np.zeros(3)
    for _ in range(n):
        acc += ame_gradient(sample(y, rng), U).values
    assert np.max(np.abs(acc / n - U @ y.weights)) <= 0.01


def full_features(depth=1):
    return HistoryFeatures(depth, "full-history")


def test_observe_and_predict():
    h = HistoryWindow(1).push(0, 2)
    m = OpponentModel(full_features(), 5)
    m1 = observe(m, h, 3)
    assert m1.counts[full_features().key(h)][3] == 1
    assert len(m.counts) == 0                                # pure update
    m2 = observe(observe(m, h, 1), h, 2)
    np.testing.assert_array_equal(m2.counts[((0, 2),)], [0, 1, 1, 0, 0])
    np.testing.assert_allclose(predict(m2, h).weights, [0, 0.5, 0.5, 0, 0])
    np.testing.assert_allclose(predict(m2, HistoryWindow(1).push(1, 1)).weights,
                               np.full(5, 0.2))


def test_observe_additive(rng):
    feats = full_features(2)
    stream = [(int(rng.integers(3)), int(rng.integers(4))) for _ in range(40)]
    m1 = m2 = OpponentModel(feats, 4)
    for rep in range(2):
        h = HistoryWindow(2)
        for a, b in stream:
            if rep == 0:
                m1 = observe(m1, h, b)
            m2 = observe(m2, h, b)
            h = h.push(a, b)
    assert m1.counts.keys() == m2.counts.keys()
    for k in m1.counts:
        np.testing.assert_array_equal(m2.counts[k], 2 * m1.counts[k])


def test_short_history_is_not_observed():
    m = observe(OpponentModel(full_features(2), 3), HistoryWindow(2).push(0, 0), 1)
    assert len(m.counts) == 0
    np.testing.assert_allclose(predict(m, HistoryWindow(2)).weights, np.full(3, 1 / 3))


def test_deterministic_rule_point_mass():
    h = HistoryWindow(1).push(2, 0)
    m = OpponentModel(full_features(), 6)
    for _ in range(50):
        m = observe(m, h, 4)
    np.testing.assert_array_equal(predict(m, h).weights, np.eye(6)[4])


def test_ome_gradient_examples(rng):
    h = HistoryWindow(1).push(0, 0)
    m = OpponentModel(full_features(), 2)
    np.testing.assert_allclose(ome_gradient(m, h, SWAP).values, [0.5, 0.5])
    m = observe(m, h, 1)
    np.testing.assert_array_equal(ome_gradient(m, h, SWAP).values, ame_gradient(1, SWAP).values)

    U = rng.random((4, 4))
    m = OpponentModel(full_features(), 4)
    for b in rng.integers(0, 4, size=30):
        m = observe(m, h, int(b))
    y = predict(m, h).weights
    expected = [sum(U[a, b] * y[b] for b in range(4)) for a in range(4)]
    np.testing.assert_allclose(ome_gradient(m, h, U).values, expected, atol=1e-15)


def test_ome_consistency_rational_rule():
    rng = np.random.default_rng(77)
    pi = {0: Strategy([1 / 2, 1 / 4, 1 / 4]), 1: Strategy([1 / 3, 0, 2 / 3])}
    feats = full_features()
    m = OpponentModel(feats, 3)
    for key_action, rule in pi.items():
        h = HistoryWindow(1).push(key_action, 0)
        for _ in range(10_000):
            m = observe(m, h, sample(rule, rng))
    for key_action, rule in pi.items():
        y = predict(m, HistoryWindow(1).push(key_action, 0)).weights
        assert np.max(np.abs(y - rule.weights)) <= 0.05
        assert abs(y.sum() - 1) <= 1e-9 and y.min() >= 0


def test_histogram_keys_and_codes(rng):
    rs = make_game(4, 2)[0]
    feats = HistoryFeatures(3, "frequency-histogram", rs)
    h = HistoryWindow(3)
    for a in (rs.encode((1, 2)), rs.encode((2, 2)), rs.encode((4, 1))):
        h = h.push(a, 0)
    assert feats.key(h) == (2, 3, 0, 1)
    assert feats.key(HistoryWindow(3).push(0, 0)) is None
    # codes agree with keys: equal keys <-> equal codes
    hist = rng.integers(0, rs.size, size=(400, 3))
    codes = feats.codes(hist, np.zeros_like(hist), 3, rs.size, rs.size)
    keys = []
    for row in hist:
        w = HistoryWindow(3, tuple((int(a), 0) for a in row))
        keys.append(feats.key(w))
    for i in range(0, 400, 7):
        for j in range(400):
            assert (codes[i] == codes[j]) == (keys[i] == keys[j])
    np.testing.assert_array_equal(feats.codes(hist, hist, 2, 16, 16), -1)
    np.testing.assert_array_equal(HistoryFeatures(0).codes(hist, hist, 0, 16, 16), 0)


def test_feature_validation():
    with pytest.raises(ConfigurationError):
        HistoryFeatures(1, "jammer-only")
    with pytest.raises(ConfigurationError):
        HistoryFeatures(-1)
    with pytest.raises(ConfigurationError):
        HistoryFeatures(2, "frequency-histogram")
