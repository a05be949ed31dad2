"""Jammer opponents.

A jammer commits to its action for pulse ``n`` from the history of pulses
``1..n-1`` only; it never sees the radar's current action.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import HistoryWindow, JammerActionSet, RadarActionSet, Strategy, sample


@dataclass(frozen=True)
class StationaryJammer:
    """Draws every action from the same fixed mixed strategy."""

    strategy: Strategy
    depth: int = 0

    @property
    def n_actions(self) -> int:
        return len(self.strategy)

    def batch_strategies(self, radar_history: np.ndarray, n_filled: int) -> np.ndarray:
        T = radar_history.shape[0]
        return np.broadcast_to(self.strategy.weights, (T, self.n_actions))

    def batch_losses(self, cost_matrix: np.ndarray, radar_history: np.ndarray,
                     n_filled: int) -> np.ndarray:
        """Expected radar loss vectors ``U @ y`` for a batch of histories."""
        loss = (cost_matrix * self.strategy.weights).sum(axis=1)
        return np.broadcast_to(loss, (radar_history.shape[0], loss.size))


@dataclass(frozen=True)
class HistoryRuleJammer:
    """Spot-jams the radar's most frequently used carriers in the last ``depth`` pulses.

    Frequencies are counted over every sub-pulse of the radar actions in the
    window. The most common frequency receives ``top_weight`` and the second
    ``second_weight``; ties go to the lower frequency index. Before ``depth``
    pulses have been recorded the jammer plays uniformly.
    """

    radar_set: RadarActionSet
    jammer_set: JammerActionSet
    depth: int = 3
    top_weight: float = 0.7
    second_weight: float = 0.3

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("history depth must be >= 1")
        if min(self.top_weight, self.second_weight) < 0 or \
                abs(self.top_weight + self.second_weight - 1.0) > 1e-12:
            raise ValueError("top_weight and second_weight must be non-negative and sum to 1")
        if self.radar_set.n_frequencies < 2:
            raise ValueError("need at least two frequencies")

    @property
    def n_actions(self) -> int:
        return self.jammer_set.size

    def ranked_frequencies(self, radar_history: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """0-based (most common, second most common) frequency per history row."""
        L = self.radar_set.n_frequencies
        freqs = self.radar_set.table()[radar_history[:, : self.depth]]
        counts = (freqs[..., None] == np.arange(L)).sum(axis=(1, 2))
        score = counts * L + (L - 1 - np.arange(L))     # count first, then lower index
        first = np.argmax(score, axis=1)
        score[np.arange(len(first)), first] = -1
        second = np.argmax(score, axis=1)
        return first, second

    def _spots(self):
        return np.array([self.jammer_set.spot_action(f + 1)
                         for f in range(self.radar_set.n_frequencies)])

    def batch_strategies(self, radar_history: np.ndarray, n_filled: int) -> np.ndarray:
        T, K = radar_history.shape[0], self.n_actions
        if n_filled < self.depth:
            return np.full((T, K), 1.0 / K)
        first, second = self.ranked_frequencies(radar_history)
        spots = self._spots()
        y = np.zeros((T, K))
        rows = np.arange(T)
        y[rows, spots[first]] += self.top_weight
        y[rows, spots[second]] += self.second_weight
        return y

    def batch_losses(self, cost_matrix: np.ndarray, radar_history: np.ndarray,
                     n_filled: int) -> np.ndarray:
        """Expected radar loss vectors ``U @ y`` for a batch of histories."""
        T = radar_history.shape[0]
        if n_filled < self.depth:
            return np.broadcast_to(cost_matrix.mean(axis=1), (T, cost_matrix.shape[0]))
        first, second = self.ranked_frequencies(radar_history)
        spots = self._spots()
        return (self.top_weight * cost_matrix[:, spots[first]].T
                + self.second_weight * cost_matrix[:, spots[second]].T)


def jammer_strategy(jammer, history: HistoryWindow) -> Strategy:
    """The jammer's mixed strategy for the pulse following ``history``."""
    D = max(jammer.depth, 1)
    rh = np.zeros((1, D), dtype=np.int64)
    acts = history.radar_actions[:D]
    rh[0, : len(acts)] = acts
    return Strategy(jammer.batch_strategies(rh, len(history))[0])


def jammer_act(jammer, history: HistoryWindow, rng: np.random.Generator) -> int:
    return sample(jammer_strategy(jammer, history), rng)
