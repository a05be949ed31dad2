import math

import numpy as np
import pytest

from radar_oco import OmdState, Strategy, default_learning_rate, omd_step
from radar_oco.errors import InvalidGradientError, UnderflowError


def kl_objective(z, x, loss, eta):
    """eta <z, loss> + KL(z || x) with the unnormalized-entropy Bregman divergence."""
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.where(z > 0, z * np.log(z / x), 0.0).sum(axis=-1) - z.sum(axis=-1) + x.sum()
    return eta * (z * loss).sum(axis=-1) + kl


def grid_argmin(x, loss, eta, points=10_000):
    """Brute-force minimizer over a simplex grid, refined once around the best point."""
    K = len(x)
    if K == 2:
        t = np.linspace(0, 1, points)
        z = np.stack([t, 1 - t], axis=1)
    else:
        side = int(math.isqrt(2 * points))
        i, j = np.meshgrid(np.arange(side + 1), np.arange(side + 1), indexing="ij")
        keep = i + j <= side
        z = np.stack([i[keep], j[keep], side - i[keep] - j[keep]], axis=1) / side
    best = z[np.argmin(kl_objective(z, x, loss, eta))]
    # local refinement on a finer grid around the coarse optimum
    step = 2.0 / side if K == 3 else 2.0 / points
    offs = np.linspace(-step, step, 201)
    if K == 2:
        cand = np.clip(best[0] + offs, 0, 1)
        z = np.stack([cand, 1 - cand], axis=1)
    else:
        a, b = np.meshgrid(best[0] + offs, best[1] + offs, indexing="ij")
        z = np.stack([a.ravel(), b.ravel(), 1 - a.ravel() - b.ravel()], axis=1)
        z = z[(z >= 0).all(axis=1)]
    return z[np.argmin(kl_objective(z, x, loss, eta))]


def test_worked_example():
    s = omd_step(OmdState.from_strategy([0.5, 0.5], math.log(2)), [1.0, 0.0])
    np.testing.assert_allclose(s.strategy.weights, [1 / 3, 2 / 3], atol=1e-12)
    np.testing.assert_allclose(grid_argmin(np.array([0.5, 0.5]), np.array([1.0, 0.0]),
                                           math.log(2)), [1 / 3, 2 / 3], atol=1e-3)
    assert s.pulse_index == 1


@pytest.mark.parametrize("K", [2, 3])
def test_closed_form_matches_grid(K):
    rng = np.random.default_rng(2024 + K)
    for _ in range(20):
        x = rng.dirichlet(np.ones(K)) * 0.9 + 0.1 / K
        loss = rng.random(K)
        eta = rng.uniform(0.1, 2.0)
        closed = omd_step(OmdState.from_strategy(x, eta), loss).strategy.weights
        np.testing.assert_allclose(closed, grid_argmin(x, loss, eta), atol=1e-3)


def test_zero_and_uniform_gradient_identity():
    x = Strategy.normalized([1, 2, 3, 4])
    s = OmdState.from_strategy(x, 0.3)
    np.testing.assert_allclose(omd_step(s, np.zeros(4)).strategy.weights, x.weights, atol=1e-12)
    np.testing.assert_allclose(omd_step(s, np.full(4, 0.7)).strategy.weights, x.weights,
                               atol=1e-12)


def test_shift_invariance(rng):
    for _ in range(50):
        s = OmdState.from_strategy(rng.dirichlet(np.ones(6)), rng.uniform(0.01, 3))
        g = rng.random(6) * 5
        a = omd_step(s, g).strategy.weights
        b = omd_step(s, g + rng.uniform(-10, 10)).strategy.weights
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_monotone_in_coordinate():
    s = OmdState.uniform(5, 0.5)
    g = np.array([0.1, 0.4, 0.2, 0.9, 0.3])
    prev = omd_step(s, g).strategy.weights[2]
    for v in [0.25, 0.5, 1.0, 3.0]:
        g2 = g.copy()
        g2[2] = v
        cur = omd_step(s, g2).strategy.weights[2]
        assert cur < prev
        prev = cur


def test_no_underflow_large_exponent():
    s = OmdState.uniform(4, 1.0)
    for _ in range(5):
        s = omd_step(s, [700.0, 0.0, 350.0, 699.0])
    w = s.strategy.weights
    assert np.all(np.isfinite(w)) and abs(w.sum() - 1) < 1e-9
    assert w[1] == pytest.approx(1.0)


def test_simplex_after_many_steps(rng):
    s = OmdState.uniform(16, 0.2)
    for _ in range(500):
        s = omd_step(s, rng.random(16) * rng.choice([1.0, 50.0]))
        w = s.strategy.weights
        assert w.min() >= 0 and abs(w.sum() - 1) <= 1e-9


def test_errors():
    s = OmdState.uniform(3, 0.1)
    with pytest.raises(InvalidGradientError):
        omd_step(s, [0.0, np.nan, 0.0])
    with pytest.raises(InvalidGradientError):
        omd_step(s, [0.0, 1.0])
    with pytest.raises(ValueError):
        OmdState.uniform(3, 0.0)
    with pytest.raises(UnderflowError):
        OmdState(np.full(3, -np.inf), 0.1)


def test_default_learning_rate():
    assert default_learning_rate("ame", 10_000, 16) == pytest.approx(0.02355, abs=5e-6)
    assert default_learning_rate("ome", 10_000, 16) == default_learning_rate("ame", 10_000, 16)
    assert default_learning_rate("iwe", 10_000, 16) == pytest.approx(
        math.sqrt(math.log(16) / (10_000 * 16)))
    v = default_learning_rate("iwe", 1, 2)
    assert math.isfinite(v) and v > 0
    for K in range(3, 200):
        assert default_learning_rate("iwe", 100, K) < default_learning_rate("ame", 100, K)
    with pytest.raises(ValueError):
        default_learning_rate("sgd", 10, 4)
