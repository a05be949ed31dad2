"""Received powers, per-sub-pulse SINR and the normalized cost matrix.

The echo follows the two-way radar range equation, the jammer the one-way
equation (main-lobe self-protection jammer at the target range) and the
receiver noise is ``k T B F`` with ``B = 1 / T_c``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import constants

from .domain import JammerActionSet, RadarActionSet, _check_index
from .errors import ActionSpaceTooLargeError, ConfigurationError

DEFAULT_SIZE_CAP = 4096


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkBudgetParams:
    """Link-budget inputs in SI units; gains and noise figure in dB.

    Defaults: 10 kW radar, 30 dB antenna gain, 1 kW jammer, 100 km range,
    10 GHz, 3 us sub-pulses, sigma = 1 m^2, 10 dB jammer gain, 290 K and a
    3 dB noise figure.
    """

    radar_tx_power: float = 10e3
    jammer_tx_power: float = 1e3
    radar_antenna_gain: float = 30.0
    jammer_antenna_gain: float = 10.0
    target_rcs: float = 1.0
    distance: float = 100e3
    carrier_frequency: float = 10e9
    subpulse_width: float = 3e-6
    noise_temperature: float = 290.0
    noise_figure: float = 3.0
    sinr_threshold: float | None = None

    def __post_init__(self):
        for name in ("radar_tx_power", "target_rcs", "distance", "carrier_frequency",
                     "subpulse_width", "noise_temperature"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value!r}", path=name)
        if not (np.isfinite(self.jammer_tx_power) and self.jammer_tx_power >= 0):
            raise ConfigurationError(
                f"jammer_tx_power must be non-negative, got {self.jammer_tx_power!r}",
                path="jammer_tx_power")
        for name in ("radar_antenna_gain", "jammer_antenna_gain", "noise_figure"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite", path=name)
        if self.sinr_threshold is not None and not self.sinr_threshold > 0:
            raise ConfigurationError(
                f"sinr_threshold must be positive, got {self.sinr_threshold!r}",
                path="sinr_threshold")


@dataclass(frozen=True)
class ReceivedPowers:
    echo_power_per_frequency: np.ndarray
    jam_power: float
    noise_power: float

    def __post_init__(self):
        echo = np.array(self.echo_power_per_frequency, dtype=float)
        if echo.ndim != 1 or not np.all(echo > 0):
            raise ValueError("echo powers must be a vector of positive values")
        if not self.noise_power > 0 or not self.jam_power >= 0:
            raise ValueError("noise power must be positive and jam power non-negative")
        echo.setflags(write=False)
        object.__setattr__(self, "echo_power_per_frequency", echo)


def echo_power(params: LinkBudgetParams, frequency) -> np.ndarray:
    lam = constants.c / np.asarray(frequency, dtype=float)
    g = db_to_linear(params.radar_antenna_gain)
    return (params.radar_tx_power * g**2 * lam**2 * params.target_rcs
            / ((4 * np.pi) ** 3 * params.distance**4))


def jam_power(params: LinkBudgetParams, frequency) -> float:
    lam = constants.c / frequency
    gr = db_to_linear(params.radar_antenna_gain)
    gj = db_to_linear(params.jammer_antenna_gain)
    return (params.jammer_tx_power * gj * gr * lam**2
            / ((4 * np.pi) ** 2 * params.distance**2))


def noise_power(params: LinkBudgetParams) -> float:
    bandwidth = 1.0 / params.subpulse_width
    return (constants.k * params.noise_temperature * bandwidth
            * db_to_linear(params.noise_figure))


def compute_received_powers(params: LinkBudgetParams, frequencies=None,
                            flat_echo: bool = False) -> ReceivedPowers:
    """Receiver-side echo, jamming and noise powers.

    Parameters
    ----------
    params : LinkBudgetParams
    frequencies : array-like, optional
        Carrier frequencies (Hz) of the agile set. Defaults to the single
        carrier frequency.
    flat_echo : bool
        Evaluate the echo at the carrier frequency for every entry instead of
        at each frequency's own wavelength.
    """
    if frequencies is None:
        frequencies = [params.carrier_frequency]
    frequencies = np.asarray(frequencies, dtype=float)
    if flat_echo:
        echo = np.full(frequencies.shape, echo_power(params, params.carrier_frequency))
    else:
        echo = echo_power(params, frequencies)
    return ReceivedPowers(echo, float(jam_power(params, params.carrier_frequency)),
                          float(noise_power(params)))


def default_sinr_threshold(powers: ReceivedPowers) -> float:
    """Largest threshold for which every unjammed sub-pulse costs nothing."""
    return float(powers.echo_power_per_frequency.min() / powers.noise_power)


def subpulse_sinr(echo_power: float, noise_power: float, jam_power: float,
                  jammed: bool) -> float:
    return echo_power / (noise_power + (jam_power if jammed else 0.0))


def normalized_cost(sinrs, threshold: float) -> float:
    """Cost in [0, 1] from per-sub-pulse SINRs, clipped at ``threshold``."""
    clipped = np.minimum(np.asarray(sinrs, dtype=float), threshold)
    return float((threshold - clipped.mean()) / threshold)


@dataclass(frozen=True)
class SpecialAction:
    """An opaque jamming action described only by which sub-pulses it jams."""

    name: str
    jammed_subpulses: tuple[bool, ...]


def _special_patterns(jammer_set: JammerActionSet, special: Mapping[str, Sequence[bool]] | None):
    M = jammer_set.frequency_actions.subpulses
    special = dict(special or {})
    patterns = []
    for name in jammer_set.special_actions:
        if name not in special:
            raise ConfigurationError(f"special jammer action '{name}' has no configured column",
                                     path=f"special_actions.{name}")
        pattern = tuple(bool(v) for v in special[name])
        if len(pattern) != M:
            raise ConfigurationError(
                f"special action '{name}' needs {M} sub-pulse flags, got {len(pattern)}",
                path=f"special_actions.{name}")
        patterns.append(pattern)
    return patterns


def action_cost(a: int, b: int, radar_set: RadarActionSet, jammer_set: JammerActionSet,
                powers: ReceivedPowers, threshold: float,
                special: Mapping[str, Sequence[bool]] | None = None) -> float:
    """Cost of radar action ``a`` against jammer action ``b``."""
    _check_index(a, radar_set.size)
    _check_index(b, jammer_set.size)
    freqs = radar_set.decode(a)
    if jammer_set.is_special(b):
        j = b - jammer_set.n_frequency_actions
        pattern = _special_patterns(jammer_set, special)[j]
    else:
        jf = jammer_set.frequency_actions.decode(b)
        pattern = tuple(fr == fj for fr, fj in zip(freqs, jf))
    sinrs = [subpulse_sinr(powers.echo_power_per_frequency[f - 1], powers.noise_power,
                           powers.jam_power, hit)
             for f, hit in zip(freqs, pattern)]
    return normalized_cost(sinrs, threshold)


@dataclass(frozen=True)
class CostMatrix:
    """Read-only ``|A_R| x |A_J|`` matrix of normalized costs."""

    entries: np.ndarray
    radar_set: RadarActionSet | None = field(default=None, compare=False)
    jammer_set: JammerActionSet | None = field(default=None, compare=False)

    def __post_init__(self):
        u = np.array(self.entries, dtype=float)
        if u.ndim != 2:
            raise ValueError("cost matrix must be two-dimensional")
        if not np.all((u >= 0) & (u <= 1)):
            raise ValueError("cost matrix entries must lie in [0, 1]")
        u.setflags(write=False)
        object.__setattr__(self, "entries", u)

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __getitem__(self, key):
        return self.entries[key]


def check_action_space(n_frequencies: int, subpulses: int, size_cap: int = DEFAULT_SIZE_CAP):
    size = n_frequencies**subpulses
    if size > size_cap:
        raise ActionSpaceTooLargeError(
            f"action space too large: L={n_frequencies}, M={subpulses} gives "
            f"L^M={size} actions, above the size cap {size_cap}")


def build_cost_matrix(radar_set: RadarActionSet, jammer_set: JammerActionSet,
                      powers: ReceivedPowers, threshold: float,
                      special: Mapping[str, Sequence[bool]] | None = None,
                      size_cap: int = DEFAULT_SIZE_CAP) -> CostMatrix:
    check_action_space(radar_set.n_frequencies, radar_set.subpulses, size_cap)
    if powers.echo_power_per_frequency.size != radar_set.n_frequencies:
        raise ConfigurationError("echo powers do not match the frequency set size")
    R = radar_set.table()
    J = jammer_set.frequency_actions.table()
    echo = powers.echo_power_per_frequency
    M = radar_set.subpulses
    clean = np.minimum(echo / powers.noise_power, threshold)
    hit = np.minimum(echo / (powers.noise_power + powers.jam_power), threshold)

    total = np.zeros((R.shape[0], J.shape[0]))
    for m in range(M):
        jammed = R[:, m][:, None] == J[:, m][None, :]
        total += np.where(jammed, hit[R[:, m]][:, None], clean[R[:, m]][:, None])
    cols = [(threshold - total / M) / threshold]

    for pattern in _special_patterns(jammer_set, special):
        col = np.zeros(R.shape[0])
        for m, jammed in enumerate(pattern):
            col += hit[R[:, m]] if jammed else clean[R[:, m]]
        cols.append(((threshold - col / M) / threshold)[:, None])
    u = np.clip(np.hstack(cols), 0.0, 1.0)
    return CostMatrix(u, radar_set, jammer_set)
