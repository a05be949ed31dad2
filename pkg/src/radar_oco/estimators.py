"""Loss-vector estimators fed to mirror descent.

* IWE: importance-weighted bandit estimate built from the observed cost of
  the radar's own action only.
* AME: the cost-matrix column of the observed jammer action.
* OME: the cost matrix applied to an empirical (maximum-likelihood) model of
  the jammer's history-conditional decision rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Hashable, Mapping

import numpy as np

from .domain import HistoryWindow, RadarActionSet, Strategy, _check_index
from .errors import ConfigurationError, InvalidActionError

FEATURE_MODES = ("full-history", "frequency-histogram")


@dataclass(frozen=True)
class GradientEstimate:
    values: np.ndarray
    estimator_tag: str

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def iwe_gradient(observed_cost: float, chosen: int, strategy) -> GradientEstimate:
    """Observed cost divided by the probability of the chosen action, zero elsewhere."""
    x = np.asarray(strategy, dtype=float)
    _check_index(chosen, x.size)
    if not x[chosen] > 0:
        raise ZeroDivisionError(f"chosen action {chosen} has zero probability")
    values = np.zeros(x.size)
    values[chosen] = observed_cost / x[chosen]
    return GradientEstimate(values, "iwe")


def ame_gradient(observed_jammer_action: int, cost_matrix) -> GradientEstimate:
    U = np.asarray(cost_matrix, dtype=float)
    _check_index(observed_jammer_action, U.shape[1])
    return GradientEstimate(U[:, observed_jammer_action], "ame")


@dataclass(frozen=True)
class HistoryFeatures:
    """Maps a length-``depth`` history to the key the opponent model conditions on.

    ``full-history`` keys on the exact (radar, jammer) action pairs.
    ``frequency-histogram`` keys on how often each carrier frequency appears
    among the sub-pulses of the radar actions in the window, which is all a
    frequency-counting DRFM jammer can react to. With ``depth == 0`` every
    pulse shares one key, i.e. the jammer is modeled as history-free.
    Histories shorter than ``depth`` have no key.
    """

    depth: int
    mode: str = "frequency-histogram"
    radar_set: RadarActionSet | None = None

    def __post_init__(self):
        if self.mode not in FEATURE_MODES:
            raise ConfigurationError(f"unknown feature mode {self.mode!r}; "
                                     f"expected one of {FEATURE_MODES}", path="ome.feature_mode")
        if self.depth < 0:
            raise ConfigurationError("history depth must be >= 0", path="ome.history_depth")
        if self.mode == "frequency-histogram" and self.depth > 0 and self.radar_set is None:
            raise ConfigurationError("frequency-histogram features need the radar action set")

    def key(self, history: HistoryWindow) -> Hashable | None:
        if len(history) < self.depth:
            return None
        if self.depth == 0:
            return ()
        entries = history.entries[: self.depth]
        if self.mode == "full-history":
            return tuple(entries)
        counts = [0] * self.radar_set.n_frequencies
        for a, _ in entries:
            for f in self.radar_set.decode(a):
                counts[f - 1] += 1
        return tuple(counts)

    def codes(self, radar_history: np.ndarray, jammer_history: np.ndarray,
              n_filled: int, n_radar: int, n_jammer: int) -> np.ndarray:
        """Integer key codes for a batch of histories (most recent first).

        Returns ``-1`` everywhere while fewer than ``depth`` pulses exist.
        Codes are injective per feature mode but are not the tuple keys of
        :meth:`key`.
        """
        T = radar_history.shape[0]
        if n_filled < self.depth:
            return np.full(T, -1, dtype=np.int64)
        if self.depth == 0:
            return np.zeros(T, dtype=np.int64)
        ra = radar_history[:, : self.depth]
        if self.mode == "full-history":
            base = n_radar * n_jammer
            if base ** self.depth >= 2**62:
                raise ConfigurationError("full-history key space too large for integer codes")
            pair = ra * n_jammer + jammer_history[:, : self.depth]
            return (pair * base ** np.arange(self.depth)).sum(axis=1).astype(np.int64)
        L = self.radar_set.n_frequencies
        freqs = self.radar_set.table()[ra]                      # (T, depth, M)
        counts = (freqs[..., None] == np.arange(L)).sum(axis=(1, 2))
        radix = self.depth * self.radar_set.subpulses + 1
        return (counts * radix ** np.arange(L)).sum(axis=1).astype(np.int64)


@dataclass(frozen=True)
class OpponentModel:
    """Per-key counts of the jammer actions that followed each history key."""

    features: HistoryFeatures
    n_jammer_actions: int
    counts: Mapping[Hashable, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "counts", MappingProxyType(dict(self.counts)))

    @property
    def history_depth(self) -> int:
        return self.features.depth

    @property
    def feature_mode(self) -> str:
        return self.features.mode


def observe(model: OpponentModel, history_before: HistoryWindow,
            jammer_action: int) -> OpponentModel:
    """Record that ``jammer_action`` followed ``history_before``."""
    _check_index(jammer_action, model.n_jammer_actions)
    key = model.features.key(history_before)
    if key is None:
        return model
    counts = dict(model.counts)
    row = counts.get(key, np.zeros(model.n_jammer_actions, dtype=np.int64)).copy()
    row[jammer_action] += 1
    row.setflags(write=False)
    counts[key] = row
    return OpponentModel(model.features, model.n_jammer_actions, counts)


def predict(model: OpponentModel, history: HistoryWindow) -> Strategy:
    """Empirical jammer frequencies for the key of ``history``; uniform if unseen."""
    key = model.features.key(history)
    row = model.counts.get(key) if key is not None else None
    if row is None or row.sum() == 0:
        return Strategy.uniform(model.n_jammer_actions)
    return Strategy(row / row.sum())


def ome_gradient(model: OpponentModel, history: HistoryWindow, cost_matrix) -> GradientEstimate:
    U = np.asarray(cost_matrix, dtype=float)
    if U.shape[1] != model.n_jammer_actions:
        raise InvalidActionError("cost matrix columns do not match the jammer action count")
    y_hat = predict(model, history).weights
    return GradientEstimate(U @ y_hat, "ome")
