"""Repeated radar/jammer interaction, regret bookkeeping and trial aggregation.

Trials advance in lock-step as rows of numpy arrays. Every trial owns two
random streams split from its seed (radar, jammer), and every array
operation is row-local, so a trial's trajectory does not depend on which
other trials share its batch.

Per pulse ``n`` the simulation does, for every trial:

1. jammer strategy ``y_n`` from the history of pulses before ``n``;
2. ``b_n ~ y_n`` (jammer stream) and ``a_n ~ x_n`` (radar stream);
3. cost ``U[a_n, b_n]``, expected cost ``<U y_n, x_n>`` and comparators;
4. the algorithm's loss estimate and a mirror-descent step;
5. history update.

The opponent-modeling learner keeps one entropic mirror-descent strategy per
history key. Every elapsed pulse counts as a step of every key's strategy
with that key's loss estimate ``U @ y_hat(key)``, and the estimates of past
steps are refreshed whenever the opponent model changes, so the strategy of
a key after ``n`` pulses is ``softmax(-eta * n * U @ y_hat(key))``. The
strategy of the current key is played. With a single key (history depth 0)
this reproduces the cumulative loss of the action-modeling learner exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .domain import inverse_cdf
from .errors import ConfigurationError, SimulationError, UnderflowError
from .estimators import HistoryFeatures
from .omd import ALGORITHMS, default_learning_rate, normalize_log_weights, to_strategy_weights


def trial_seeds(base_seed: int, n_trials: int) -> list[int]:
    """64-bit seeds of trials ``0..n_trials-1`` derived from ``base_seed``."""
    return [int(np.random.SeedSequence([int(base_seed), i]).generate_state(1, np.uint64)[0])
            for i in range(n_trials)]


def trial_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(radar, jammer) generators of one trial."""
    radar, jammer = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(radar), np.random.default_rng(jammer)


@dataclass(frozen=True)
class PulseRecord:
    pulse: int
    radar_action: int
    jammer_action: int
    realized_cost: float
    expected_cost: float
    loss_vector: np.ndarray


@dataclass(frozen=True)
class RegretLedger:
    """Per-pulse costs and cumulative comparators of one trial.

    ``static_comparator_cost[n-1]`` is the cumulative cost of the best fixed
    action over pulses ``1..n``; ``universal_comparator_cost[n-1]`` sums the
    per-pulse minima.
    """

    expected_cost: np.ndarray
    realized_cost: np.ndarray
    static_comparator_cost: np.ndarray
    universal_comparator_cost: np.ndarray

    @property
    def n_pulses(self) -> int:
        return self.expected_cost.size

    @property
    def cumulative_expected_cost(self) -> np.ndarray:
        return np.cumsum(self.expected_cost)

    @property
    def static_regret_curve(self) -> np.ndarray:
        return self.cumulative_expected_cost - self.static_comparator_cost

    @property
    def universal_regret_curve(self) -> np.ndarray:
        return self.cumulative_expected_cost - self.universal_comparator_cost

    @classmethod
    def from_losses(cls, loss_vectors, strategies, realized_cost=None) -> "RegretLedger":
        """Ledger from per-pulse loss vectors ``(N, K)`` and played strategies ``(N, K)``."""
        losses = np.asarray(loss_vectors, dtype=float)
        x = np.asarray(strategies, dtype=float)
        expected = (losses * x).sum(axis=1)
        if realized_cost is None:
            realized_cost = expected
        return cls(expected, np.asarray(realized_cost, dtype=float),
                   np.cumsum(losses, axis=0).min(axis=1), np.cumsum(losses.min(axis=1)))


def _check_pulse(ledger, n):
    if not 1 <= n <= ledger.n_pulses:
        raise ValueError(f"pulse {n} outside 1..{ledger.n_pulses}")


def static_regret(ledger: RegretLedger, n: int) -> float:
    """Regret after ``n`` pulses against the best fixed action in hindsight."""
    _check_pulse(ledger, n)
    return float(ledger.expected_cost[:n].sum() - ledger.static_comparator_cost[n - 1])


def universal_regret(ledger: RegretLedger, n: int) -> float:
    """Regret after ``n`` pulses against the best action of every single pulse."""
    _check_pulse(ledger, n)
    return float(ledger.expected_cost[:n].sum() - ledger.universal_comparator_cost[n - 1])


@dataclass(frozen=True)
class TrialResult:
    seed: int
    radar_actions: np.ndarray
    jammer_actions: np.ndarray
    ledger: RegretLedger
    loss_vectors: np.ndarray | None = None

    def records(self) -> list[PulseRecord]:
        if self.loss_vectors is None:
            raise ValueError("trial was run without keeping loss vectors")
        led = self.ledger
        return [PulseRecord(n + 1, int(self.radar_actions[n]), int(self.jammer_actions[n]),
                            float(led.realized_cost[n]), float(led.expected_cost[n]),
                            self.loss_vectors[n])
                for n in range(led.n_pulses)]


class _KeyedCounts:
    """Opponent-model counts and loss estimates per (trial, history key)."""

    def __init__(self, n_trials, n_radar, n_jammer, fallback_gradient):
        self.T, self.K, self.KJ = n_trials, n_radar, n_jammer
        self.fallback = fallback_gradient
        self.slots: dict[int, int] = {}
        self.grad = np.empty((n_trials, 0, n_radar))
        self.counts = np.empty((n_trials, 0, n_jammer), dtype=np.int64)
        self._grow(8)

    def _grow(self, cap):
        n = self.grad.shape[1]
        self.grad = np.concatenate(
            [self.grad, np.broadcast_to(self.fallback, (self.T, cap - n, self.K))], axis=1)
        self.counts = np.concatenate(
            [self.counts, np.zeros((self.T, cap - n, self.KJ), dtype=np.int64)], axis=1)

    def slot_of(self, codes: np.ndarray) -> np.ndarray:
        slots = self.slots
        idx = np.array([slots.setdefault(c, len(slots)) for c in codes.tolist()], dtype=np.int64)
        if len(slots) > self.grad.shape[1]:
            self._grow(max(2 * self.grad.shape[1], len(slots)))
        return idx


def _normalize(log_weights, seeds, n):
    try:
        return normalize_log_weights(log_weights)
    except UnderflowError:
        top = np.max(log_weights, axis=-1)
        bad = int(np.argmax(~np.isfinite(np.atleast_1d(top))))
        raise SimulationError(f"non-finite strategy in trial {bad} (seed {seeds[bad]}) "
                              f"at pulse {n + 1}") from None


def simulate(cost_matrix, jammer, algorithm: str, n_pulses: int, seeds: Sequence[int],
             learning_rate: float | None = None, features: HistoryFeatures | None = None,
             exploration: float = 0.0, keep_loss_vectors: bool = False) -> list[TrialResult]:
    """Run one trial per seed, all in lock-step.

    Parameters
    ----------
    cost_matrix : array-like, shape (K, KJ)
    jammer : StationaryJammer or HistoryRuleJammer
    algorithm : {"iwe", "ame", "ome"}
    n_pulses : int
    seeds : sequence of int
        One seed per trial; see :func:`trial_streams`.
    learning_rate : float, optional
        Defaults to :func:`radar_oco.omd.default_learning_rate`.
    features : HistoryFeatures, optional
        Opponent-model keys for ``"ome"``; defaults to a history-free model.
    exploration : float
        Mixing weight of the uniform strategy in the played strategy of
        ``"iwe"`` (zero disables it).
    keep_loss_vectors : bool
        Keep the ``(N, K)`` true loss vectors of every trial.
    """
    algorithm = algorithm.lower()
    if algorithm not in ALGORITHMS:
        raise ConfigurationError(f"unknown algorithm {algorithm!r}", path="experiment.algorithms")
    U = np.asarray(cost_matrix, dtype=float)
    K, KJ = U.shape
    if KJ != jammer.n_actions:
        raise ConfigurationError("jammer action count does not match the cost matrix")
    if n_pulses < 1 or len(seeds) < 1:
        raise ConfigurationError("need at least one pulse and one trial")
    if learning_rate is None:
        learning_rate = default_learning_rate(algorithm, n_pulses, K)
    eta = float(learning_rate)
    if not eta > 0:
        raise ConfigurationError(f"learning rate must be positive, got {eta!r}")
    if not 0.0 <= exploration < 1.0:
        raise ConfigurationError("exploration must lie in [0, 1)")
    if features is None:
        features = HistoryFeatures(0)

    T, N = len(seeds), n_pulses
    u_radar = np.empty((T, N))
    u_jam = np.empty((T, N))
    for i, s in enumerate(seeds):
        r_rng, j_rng = trial_streams(s)
        u_radar[i], u_jam[i] = r_rng.random(N), j_rng.random(N)

    depth = max(jammer.depth, features.depth if algorithm == "ome" else 0, 1)
    r_hist = np.zeros((T, depth), dtype=np.int64)
    j_hist = np.zeros((T, depth), dtype=np.int64)
    rows = np.arange(T)

    log_w = np.full((T, K), -math.log(K))
    keyed = None
    if algorithm == "ome":
        # uniform prediction for keys without observations
        fallback = U.mean(axis=1)
        keyed = _KeyedCounts(T, K, KJ, fallback)

    a_out = np.empty((T, N), dtype=np.int64)
    b_out = np.empty((T, N), dtype=np.int64)
    expected = np.empty((T, N))
    realized = np.empty((T, N))
    static_cmp = np.empty((T, N))
    universal = np.empty((T, N))
    losses_out = np.empty((T, N, K)) if keep_loss_vectors else None
    cum_loss = np.zeros((T, K))
    min_sum = np.zeros(T)

    for n in range(N):
        filled = min(n, depth)
        y = jammer.batch_strategies(r_hist, filled)
        loss = jammer.batch_losses(U, r_hist, filled)

        if algorithm == "ome":
            codes = features.codes(r_hist, j_hist, filled, K, KJ)
            if codes[0] < 0:
                slots = None
                x = np.broadcast_to(to_strategy_weights(_normalize(
                    -eta * n * keyed.fallback, seeds, n)), (T, K))
            else:
                slots = keyed.slot_of(codes)
                x = to_strategy_weights(_normalize(
                    -eta * n * keyed.grad[rows, slots], seeds, n))
        else:
            x = to_strategy_weights(log_w)
            if exploration > 0:
                x = (1.0 - exploration) * x + exploration / K
        if not np.all(np.isfinite(x)):
            bad = int(np.argmax(~np.all(np.isfinite(x), axis=1)))
            raise SimulationError(f"non-finite strategy in trial {bad} (seed {seeds[bad]}) "
                                  f"at pulse {n + 1}")

        b = inverse_cdf(y, u_jam[:, n])
        a = inverse_cdf(x, u_radar[:, n])
        cost = U[a, b]

        a_out[:, n], b_out[:, n] = a, b
        realized[:, n] = cost
        expected[:, n] = (x * loss).sum(axis=1)
        cum_loss += loss
        static_cmp[:, n] = cum_loss.min(axis=1)
        min_sum += loss.min(axis=1)
        universal[:, n] = min_sum
        if keep_loss_vectors:
            losses_out[:, n] = loss

        if algorithm == "iwe":
            grad = np.zeros((T, K))
            grad[rows, a] = cost / x[rows, a]
            log_w = _normalize(log_w - eta * grad, seeds, n)
        elif algorithm == "ame":
            log_w = _normalize(log_w - eta * U[:, b].T, seeds, n)
        elif slots is not None:
            keyed.counts[rows, slots, b] += 1
            seen = keyed.counts[rows, slots].sum(axis=1)
            # running mean of observed columns: U @ (counts / seen)
            g = np.where((seen == 1)[:, None], 0.0, keyed.grad[rows, slots])
            keyed.grad[rows, slots] = g + (U[:, b].T - g) / seen[:, None]

        if depth > 1:
            r_hist[:, 1:] = r_hist[:, :-1]
            j_hist[:, 1:] = j_hist[:, :-1]
        r_hist[:, 0], j_hist[:, 0] = a, b

    results = []
    for i, s in enumerate(seeds):
        ledger = RegretLedger(expected[i], realized[i], static_cmp[i], universal[i])
        results.append(TrialResult(int(s), a_out[i], b_out[i], ledger,
                                   None if losses_out is None else losses_out[i]))
    return results


def run_trial(cost_matrix, jammer, algorithm: str, n_pulses: int, seed: int,
              **kwargs) -> tuple[list[PulseRecord], RegretLedger]:
    """Single trial with full per-pulse records."""
    (res,) = simulate(cost_matrix, jammer, algorithm, n_pulses, [seed],
                      keep_loss_vectors=True, **kwargs)
    return res.records(), res.ledger


def run_trials(cost_matrix, jammer, algorithm: str, n_pulses: int, seeds: Sequence[int],
               batch_size: int = 256, **kwargs) -> list[RegretLedger]:
    """Ledgers of many trials, simulated ``batch_size`` at a time, in seed order."""
    ledgers = []
    for start in range(0, len(seeds), batch_size):
        chunk = seeds[start:start + batch_size]
        ledgers.extend(r.ledger for r in simulate(cost_matrix, jammer, algorithm,
                                                  n_pulses, chunk, **kwargs))
    return ledgers


@dataclass(frozen=True)
class AggregateResult:
    """Pointwise mean and normal-approximation confidence band over trials."""

    static_mean: np.ndarray
    static_low: np.ndarray
    static_high: np.ndarray
    universal_mean: np.ndarray
    universal_low: np.ndarray
    universal_high: np.ndarray
    sinr_norm_mean: np.ndarray
    n_trials: int
    confidence: float
    seeds: tuple = ()

    @property
    def n_pulses(self) -> int:
        return self.static_mean.size


def _band(samples, z):
    mean = samples.mean(axis=0)
    half = z * samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])
    return mean, mean - half, mean + half


def aggregate(ledgers: Sequence[RegretLedger], confidence: float = 0.95,
              seeds: Sequence[int] = ()) -> AggregateResult:
    """Combine trials into mean regret curves with ``mean ± z * s / sqrt(T)`` bands.

    The normalized SINR curve is ``1 - mean expected cost`` per pulse.
    """
    if len(ledgers) < 2:
        raise ConfigurationError("aggregation needs at least two trials", path="experiment.trials")
    if not 0 < confidence < 1:
        raise ConfigurationError("confidence must lie in (0, 1)", path="experiment.confidence")
    sizes = {led.n_pulses for led in ledgers}
    if len(sizes) != 1:
        raise ConfigurationError(f"trials have different pulse counts: {sorted(sizes)}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    expected = np.stack([led.expected_cost for led in ledgers])
    cum = np.cumsum(expected, axis=1)
    s = _band(cum - np.stack([led.static_comparator_cost for led in ledgers]), z)
    u = _band(cum - np.stack([led.universal_comparator_cost for led in ledgers]), z)
    return AggregateResult(*s, *u, 1.0 - expected.mean(axis=0), len(ledgers), confidence,
                           tuple(seeds))
