"""Online mirror descent on the probability simplex with the negative-entropy
regularizer.

With ``F(x) = sum(x_i log x_i - x_i)`` the unconstrained mirror step and the
Bregman projection back onto the simplex collapse to the multiplicative
update ``x_next ∝ x * exp(-eta * grad)``. Weights are carried in the log
domain, shifted by their maximum before exponentiation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .domain import Strategy
from .errors import InvalidGradientError, UnderflowError

ALGORITHMS = ("iwe", "ame", "ome")


def normalize_log_weights(log_weights: np.ndarray) -> np.ndarray:
    """Shift log-weights (along the last axis) so they exponentiate to the simplex."""
    lw = np.asarray(log_weights, dtype=float)
    top = lw.max(axis=-1, keepdims=True)
    if not np.all(np.isfinite(top)):
        raise UnderflowError(
            "all log-weights are -inf or non-finite; the strategy normalizer is zero")
    return lw - (top + np.log(np.exp(lw - top).sum(axis=-1, keepdims=True)))


def mirror_step(log_weights: np.ndarray, gradient: np.ndarray, learning_rate: float) -> np.ndarray:
    """Batched multiplicative-weights step in the log domain.

    ``log_weights`` and ``gradient`` broadcast along leading axes; the
    result is normalized along the last axis.
    """
    return normalize_log_weights(log_weights - learning_rate * gradient)


def to_strategy_weights(log_weights: np.ndarray) -> np.ndarray:
    w = np.exp(log_weights)
    return w / w.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class OmdState:
    """Current strategy (as normalized log-weights), step size and pulse count."""

    log_weights: np.ndarray
    learning_rate: float
    pulse_index: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValueError(f"learning rate must be positive, got {self.learning_rate!r}")
        lw = normalize_log_weights(np.array(self.log_weights, dtype=float))
        lw.setflags(write=False)
        object.__setattr__(self, "log_weights", lw)

    @classmethod
    def uniform(cls, n_actions: int, learning_rate: float) -> "OmdState":
        return cls(np.zeros(n_actions), learning_rate)

    @classmethod
    def from_strategy(cls, strategy, learning_rate: float, pulse_index: int = 0) -> "OmdState":
        w = np.asarray(strategy, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(np.log(w), learning_rate, pulse_index)

    @property
    def strategy(self) -> Strategy:
        return Strategy(to_strategy_weights(self.log_weights))


def omd_step(state: OmdState, gradient) -> OmdState:
    """One mirror-descent step against the loss estimate ``gradient``."""
    g = np.asarray(gradient, dtype=float)
    if g.shape != state.log_weights.shape:
        raise InvalidGradientError(
            f"gradient has shape {g.shape}, expected {state.log_weights.shape}")
    if not np.all(np.isfinite(g)):
        raise InvalidGradientError(f"non-finite gradient entry at pulse {state.pulse_index}")
    lw = state.log_weights - state.learning_rate * g
    try:
        lw = normalize_log_weights(lw)
    except UnderflowError as exc:
        raise UnderflowError(f"{exc} (pulse {state.pulse_index}, "
                             f"learning rate {state.learning_rate})") from None
    return replace(state, log_weights=lw, pulse_index=state.pulse_index + 1)


def default_learning_rate(algorithm: str, horizon: int, n_actions: int) -> float:
    """Horizon-tuned constant step size.

    The bandit estimator gets ``sqrt(ln K / (N K))``; the two full-vector
    estimators get ``sqrt(2 ln K / N)``.
    """
    algorithm = algorithm.lower()
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if horizon < 1 or n_actions < 2:
        raise ValueError("need horizon >= 1 and at least two actions")
    if algorithm == "iwe":
        return float(np.sqrt(np.log(n_actions) / (horizon * n_actions)))
    return float(np.sqrt(2.0 * np.log(n_actions) / horizon))
