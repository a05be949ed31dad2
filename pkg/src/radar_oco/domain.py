"""Action sets, strategies and interaction histories.

Radar actions are M-tuples of carrier-frequency indices. Tuples use 1-based
frequency indices ``1..L`` and are enumerated in mixed radix with the first
sub-pulse most significant, so ``(1, ..., 1)`` is action 0 and
``(L, ..., L)`` is action ``L**M - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidActionError, InvalidStrategyError

SIMPLEX_ATOL = 1e-9


@dataclass(frozen=True)
class FrequencySet:
    """Carrier frequencies ``base + i * step`` for ``i = 0..count-1`` (Hz)."""

    base_frequency: float
    step: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"frequency count must be an integer >= 2, got {self.count}")
        if not self.step > 0:
            raise ValueError(f"frequency step must be positive, got {self.step}")
        if not self.base_frequency > 0:
            raise ValueError(f"base frequency must be positive, got {self.base_frequency}")

    def frequency(self, i: int) -> float:
        """Frequency of 1-based index ``i``."""
        if not 1 <= i <= self.count:
            raise InvalidActionError(f"frequency index {i} outside 1..{self.count}")
        return self.base_frequency + (i - 1) * self.step

    @property
    def frequencies(self) -> np.ndarray:
        return self.base_frequency + self.step * np.arange(self.count)


@dataclass(frozen=True)
class RadarActionSet:
    """All ``L**M`` sub-carrier assignments of one pulse."""

    frequencies: FrequencySet
    subpulses: int

    def __post_init__(self):
        if int(self.subpulses) != self.subpulses or self.subpulses < 1:
            raise ValueError(f"subpulses must be a positive integer, got {self.subpulses}")

    @property
    def n_frequencies(self) -> int:
        return self.frequencies.count

    @property
    def size(self) -> int:
        return self.frequencies.count ** self.subpulses

    def encode(self, action: Sequence[int]) -> int:
        return encode_action(action, self)

    def decode(self, index: int) -> tuple[int, ...]:
        return decode_action(index, self)

    def table(self) -> np.ndarray:
        """``(size, M)`` array of 0-based frequency indices, row ``i`` = action ``i``."""
        return _tuple_table(self.frequencies.count, self.subpulses)


@dataclass(frozen=True)
class JammerActionSet:
    """Frequency-tuple jamming actions followed by named special actions.

    Indices ``[0, L**M)`` mirror :class:`RadarActionSet`; index ``L**M + j``
    is ``special_actions[j]``.
    """

    frequency_actions: RadarActionSet
    special_actions: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "special_actions", tuple(self.special_actions))
        if len(set(self.special_actions)) != len(self.special_actions):
            raise ValueError("special action names must be unique")

    @property
    def n_frequency_actions(self) -> int:
        return self.frequency_actions.size

    @property
    def size(self) -> int:
        return self.frequency_actions.size + len(self.special_actions)

    def is_special(self, index: int) -> bool:
        _check_index(index, self.size)
        return index >= self.n_frequency_actions

    def special_name(self, index: int) -> str:
        if not self.is_special(index):
            raise InvalidActionError(f"jammer action {index} is a frequency action")
        return self.special_actions[index - self.n_frequency_actions]

    def spot_action(self, frequency: int) -> int:
        """Action jamming every sub-pulse at 1-based ``frequency``."""
        return self.frequency_actions.encode((frequency,) * self.frequency_actions.subpulses)


def _check_index(index, size):
    if int(index) != index or not 0 <= index < size:
        raise InvalidActionError(f"action index {index} outside [0, {size})")


def encode_action(action: Sequence[int], action_set: RadarActionSet) -> int:
    """Mixed-radix index of a tuple of 1-based frequency indices."""
    L, M = action_set.frequencies.count, action_set.subpulses
    if len(action) != M:
        raise InvalidActionError(f"expected {M} sub-pulse frequencies, got {len(action)}")
    index = 0
    for f in action:
        if int(f) != f or not 1 <= f <= L:
            raise InvalidActionError(f"frequency index {f} outside 1..{L}")
        index = index * L + (int(f) - 1)
    return index


def decode_action(index: int, action_set: RadarActionSet) -> tuple[int, ...]:
    L, M = action_set.frequencies.count, action_set.subpulses
    _check_index(index, L**M)
    digits = []
    index = int(index)
    for _ in range(M):
        index, r = divmod(index, L)
        digits.append(r + 1)
    return tuple(reversed(digits))


def _tuple_table(L, M):
    idx = np.arange(L**M)
    powers = L ** np.arange(M - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % L


class Strategy:
    """A probability vector over an action set.

    Weights are validated on construction (non-negative, finite, summing to
    one within ``SIMPLEX_ATOL``) and stored as a read-only array.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights):
        w = np.array(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidStrategyError("strategy weights must be a non-empty vector")
        if not np.all(np.isfinite(w)):
            raise InvalidStrategyError("strategy has non-finite weights")
        if np.any(w < 0):
            raise InvalidStrategyError(f"strategy has negative weight {w.min()!r}")
        total = w.sum()
        if abs(total - 1.0) > SIMPLEX_ATOL:
            raise InvalidStrategyError(f"strategy weights sum to {total!r}, not 1")
        w.setflags(write=False)
        self._weights = w

    @classmethod
    def uniform(cls, n: int) -> "Strategy":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Strategy":
        _check_index(index, n)
        w = np.zeros(n)
        w[index] = 1.0
        return cls(w)

    @classmethod
    def normalized(cls, weights) -> "Strategy":
        """Build from non-negative weights of any positive total."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __len__(self):
        return self._weights.size

    def __getitem__(self, i):
        return self._weights[i]

    def __array__(self, dtype=None, copy=None):
        return self._weights if dtype is None else self._weights.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Strategy):
            return NotImplemented
        return np.array_equal(self._weights, other._weights)

    def __hash__(self):
        return hash(self._weights.tobytes())

    def __repr__(self):
        return f"Strategy({np.array2string(self._weights, precision=4)})"


def inverse_cdf(weights: np.ndarray, u):
    """Index drawn by inverting the CDF of ``weights`` at uniform ``u``.

    Works row-wise on a ``(..., K)`` weight array with ``u`` of shape
    ``(...)``. Zero-weight actions are never returned.
    """
    weights = np.asarray(weights, dtype=float)
    cdf = np.cumsum(weights, axis=-1)
    u = np.asarray(u, dtype=float)
    idx = np.sum(cdf <= (u * cdf[..., -1])[..., None], axis=-1)
    # u * total can round up to the total; fall back to the last positive weight
    last = weights.shape[-1] - 1 - np.argmax(weights[..., ::-1] > 0, axis=-1)
    return np.minimum(idx, last)


def sample(strategy, rng: np.random.Generator) -> int:
    """Draw one action index from ``strategy`` using one uniform from ``rng``."""
    w = strategy.weights if isinstance(strategy, Strategy) else np.asarray(strategy, dtype=float)
    if w.ndim != 1 or not np.all(np.isfinite(w)) or np.any(w < 0) or not w.sum() > 0:
        raise InvalidStrategyError(f"cannot sample from degenerate strategy {w!r}")
    return int(inverse_cdf(w, rng.random()))


@dataclass(frozen=True)
class HistoryWindow:
    """The jammer's DRFM record: the last ``depth`` (radar, jammer) action pairs.

    ``entries[0]`` is the most recent pulse.
    """

    depth: int
    entries: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValueError(f"history depth must be a non-negative integer, got {self.depth}")
        entries = tuple((int(a), int(b)) for a, b in self.entries)
        if len(entries) > self.depth:
            raise ValueError(f"{len(entries)} entries exceed depth {self.depth}")
        object.__setattr__(self, "entries", entries)

    def push(self, radar_action: int, jammer_action: int) -> "HistoryWindow":
        if self.depth == 0:
            return self
        entries = ((int(radar_action), int(jammer_action)),) + self.entries
        return HistoryWindow(self.depth, entries[: self.depth])

    @property
    def full(self) -> bool:
        return len(self.entries) == self.depth

    @property
    def radar_actions(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.entries)

    @property
    def jammer_actions(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.entries)

    def __len__(self):
        return len(self.entries)
