"""Experiment configuration files.

Configs are INI files (``configparser`` syntax, ``;`` or ``#`` comments).
The full schema, with defaults, is documented in ``configs/README.md``.
Unknown sections or keys are rejected; errors carry the ``section.key``
path and the line number where the offending entry appears.
"""
from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .domain import FrequencySet, JammerActionSet, RadarActionSet, Strategy
from .errors import ConfigurationError
from .estimators import FEATURE_MODES, HistoryFeatures
from .jammer import HistoryRuleJammer, StationaryJammer
from .link_budget import (DEFAULT_SIZE_CAP, CostMatrix, LinkBudgetParams, ReceivedPowers,
                          build_cost_matrix, check_action_space, compute_received_powers,
                          default_sinr_threshold)
from .omd import ALGORITHMS, default_learning_rate

SCHEMA_VERSION = 1
JAMMER_TYPES = ("stationary", "history-rule")

# (section, key, kind, default); default None marks a required key
_SCHEMA = [
    ("meta", "schema_version", "int", None),
    ("radar", "n_frequencies", "int", None),
    ("radar", "subpulses", "int", None),
    ("radar", "base_frequency", "float", "1e10"),
    ("radar", "frequency_step", "float", "1e8"),
    ("radar", "flat_echo", "bool", "false"),
    ("radar", "size_cap", "int", str(DEFAULT_SIZE_CAP)),
    ("link_budget", "radar_tx_power", "float", "1e4"),
    ("link_budget", "jammer_tx_power", "float", "1e3"),
    ("link_budget", "radar_antenna_gain", "float", "30"),
    ("link_budget", "jammer_antenna_gain", "float", "10"),
    ("link_budget", "target_rcs", "float", "1"),
    ("link_budget", "distance", "float", "1e5"),
    ("link_budget", "carrier_frequency", "float", "1e10"),
    ("link_budget", "subpulse_width", "float", "3e-6"),
    ("link_budget", "noise_temperature", "float", "290"),
    ("link_budget", "noise_figure", "float", "3"),
    ("link_budget", "sinr_threshold", "float_or_auto", "auto"),
    ("jammer", "type", "str", None),
    ("jammer", "strategy", "floats_or_uniform", "uniform"),
    ("jammer", "strategy_seed", "str", ""),
    ("jammer", "depth", "int", "3"),
    ("jammer", "top_weight", "float", "0.7"),
    ("jammer", "second_weight", "float", "0.3"),
    ("experiment", "environment", "str", ""),
    ("experiment", "algorithms", "list", "iwe, ame, ome"),
    ("experiment", "pulses", "int", None),
    ("experiment", "trials", "int", None),
    ("experiment", "seed", "int", None),
    ("experiment", "confidence", "float", "0.95"),
    ("experiment", "output_dir", "str", "results"),
    ("experiment", "batch_size", "int", "100"),
    ("learning", "iwe_learning_rate", "float_or_auto", "auto"),
    ("learning", "ame_learning_rate", "float_or_auto", "auto"),
    ("learning", "ome_learning_rate", "float_or_auto", "auto"),
    ("learning", "iwe_exploration", "float", "0"),
    ("ome", "feature_mode", "str", "frequency-histogram"),
    ("ome", "history_depth", "int", "3"),
]
_SECTIONS = list(dict.fromkeys(s for s, *_ in _SCHEMA)) + ["special_actions"]


@dataclass(frozen=True)
class ExperimentConfig:
    n_frequencies: int
    subpulses: int
    jammer_type: str
    pulses: int
    trials: int
    seed: int
    link_budget: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    base_frequency: float = 10e9
    frequency_step: float = 100e6
    flat_echo: bool = False
    size_cap: int = DEFAULT_SIZE_CAP
    special_actions: tuple = ()
    jammer_strategy: tuple | None = None
    jammer_strategy_seed: str = ""
    jammer_depth: int = 3
    top_weight: float = 0.7
    second_weight: float = 0.3
    environment: str = ""
    algorithms: tuple = ALGORITHMS
    confidence: float = 0.95
    output_dir: str = "results"
    batch_size: int = 100
    learning_rates: tuple = (("iwe", None), ("ame", None), ("ome", None))
    iwe_exploration: float = 0.0
    feature_mode: str = "frequency-histogram"
    ome_history_depth: int = 3
    schema_version: int = SCHEMA_VERSION
    source: str = field(default="", compare=False)

    @property
    def environment_name(self) -> str:
        if self.environment:
            return self.environment
        return "stationary" if self.jammer_type == "stationary" else "nonstationary"

    def learning_rate(self, algorithm: str):
        return dict(self.learning_rates)[algorithm]


def _locate(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section:
            m = re.match(r"\s*([^=:;#\s][^=:]*?)\s*[=:]", line)
            if m and m.group(1).strip().lower() == key:
                return lineno
    return None


def _convert(raw, kind, path, line):
    def fail(what):
        raise ConfigurationError(f"invalid value {raw!r}: expected {what}", path=path, line=line)

    raw = raw.strip()
    try:
        if kind == "int":
            value = float(raw)
            if not value.is_integer():
                fail("an integer")
            return int(value)
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                fail("a finite number")
            return value
        if kind == "float_or_auto":
            return None if raw.lower() == "auto" else _convert(raw, "float", path, line)
        if kind == "bool":
            lowered = raw.lower()
            if lowered not in configparser.ConfigParser.BOOLEAN_STATES:
                fail("true or false")
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]
        if kind == "list":
            return tuple(x.strip().lower() for x in raw.split(",") if x.strip())
        if kind == "floats_or_uniform":
            if raw.lower() == "uniform":
                return None
            return tuple(float(x) for x in raw.replace("\n", " ").replace(",", " ").split())
        return raw
    except ValueError:
        fail({"int": "an integer", "list": "a list"}.get(kind, "a number"))


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse and validate config text."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigurationError(f"entry outside any [section]: {exc.line.strip()!r}",
                                 line=exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigurationError(exc.message.split(":", 1)[-1].strip(), line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigurationError(f"cannot parse {line.strip()!r}", line=lineno) from None

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown section [{section}]", path=section,
                                     line=_locate(text, section))
    known = {(s, k) for s, k, *_ in _SCHEMA}
    for section in parser.sections():
        if section == "special_actions":
            continue
        for key in parser[section]:
            if (section, key) not in known:
                raise ConfigurationError("unknown key", path=f"{section}.{key}",
                                         line=_locate(text, section, key))

    values = {}
    for section, key, kind, default in _SCHEMA:
        path = f"{section}.{key}"
        if parser.has_option(section, key):
            raw, line = parser.get(section, key), _locate(text, section, key)
        elif default is None:
            raise ConfigurationError("missing required key", path=path)
        else:
            raw, line = default, None
        values[path] = (_convert(raw, kind, path, line), line)

    special = []
    if parser.has_section("special_actions"):
        for name in parser["special_actions"]:
            path, line = f"special_actions.{name}", _locate(text, "special_actions", name)
            flags = _convert(parser.get("special_actions", name), "list", path, line)
            try:
                special.append((name, tuple(bool(int(f)) for f in flags)))
            except ValueError:
                raise ConfigurationError("expected comma-separated 0/1 flags",
                                         path=path, line=line) from None

    def v(path):
        return values[path][0]

    def check(cond, message, path):
        if not cond:
            raise ConfigurationError(message, path=path, line=values[path][1])

    check(v("meta.schema_version") == SCHEMA_VERSION,
          f"unsupported schema version (expected {SCHEMA_VERSION})", "meta.schema_version")
    check(v("radar.n_frequencies") >= 2, "need at least 2 frequencies", "radar.n_frequencies")
    check(v("radar.subpulses") >= 1, "need at least 1 sub-pulse", "radar.subpulses")
    try:
        check_action_space(v("radar.n_frequencies"), v("radar.subpulses"), v("radar.size_cap"))
    except ConfigurationError as exc:
        raise type(exc)(str(exc), path="radar.subpulses",
                        line=values["radar.subpulses"][1]) from None
    check(v("jammer.type") in JAMMER_TYPES, f"jammer type must be one of {JAMMER_TYPES}",
          "jammer.type")
    check(v("jammer.depth") >= 1, "jammer depth must be >= 1", "jammer.depth")
    check(v("experiment.pulses") >= 1, "need at least 1 pulse", "experiment.pulses")
    check(v("experiment.trials") >= 2, "need at least 2 trials", "experiment.trials")
    check(0 < v("experiment.confidence") < 1, "confidence must lie in (0, 1)",
          "experiment.confidence")
    check(v("experiment.batch_size") >= 1, "batch size must be >= 1", "experiment.batch_size")
    algos = v("experiment.algorithms")
    check(len(algos) > 0 and all(a in ALGORITHMS for a in algos) and len(set(algos)) == len(algos),
          f"algorithms must be distinct entries of {ALGORITHMS}", "experiment.algorithms")
    check(v("ome.feature_mode") in FEATURE_MODES, f"feature mode must be one of {FEATURE_MODES}",
          "ome.feature_mode")
    check(v("ome.history_depth") >= 0, "history depth must be >= 0", "ome.history_depth")
    check(0 <= v("learning.iwe_exploration") < 1, "exploration must lie in [0, 1)",
          "learning.iwe_exploration")
    for algo in ALGORITHMS:
        path = f"learning.{algo}_learning_rate"
        check(v(path) is None or v(path) > 0, "learning rate must be positive", path)
    tw, sw = v("jammer.top_weight"), v("jammer.second_weight")
    check(tw >= 0 and sw >= 0 and abs(tw + sw - 1) <= 1e-12,
          "top_weight and second_weight must be non-negative and sum to 1", "jammer.second_weight")

    n_jammer = v("radar.n_frequencies") ** v("radar.subpulses") + len(special)
    strategy = v("jammer.strategy")
    if strategy is not None:
        check(len(strategy) == n_jammer,
              f"stationary strategy needs {n_jammer} weights, got {len(strategy)}",
              "jammer.strategy")
        try:
            Strategy(strategy)
        except ValueError as exc:
            check(False, str(exc), "jammer.strategy")

    lb = {}
    for f in fields(LinkBudgetParams):
        lb[f.name] = v(f"link_budget.{f.name}")
    try:
        params = LinkBudgetParams(**lb)
    except ConfigurationError as exc:
        path = f"link_budget.{exc.path}"
        raise ConfigurationError(str(exc).split(" (")[0], path=path,
                                 line=values[path][1]) from None

    return ExperimentConfig(
        schema_version=v("meta.schema_version"),
        n_frequencies=v("radar.n_frequencies"), subpulses=v("radar.subpulses"),
        base_frequency=v("radar.base_frequency"), frequency_step=v("radar.frequency_step"),
        flat_echo=v("radar.flat_echo"), size_cap=v("radar.size_cap"),
        link_budget=params, special_actions=tuple(special),
        jammer_type=v("jammer.type"), jammer_strategy=strategy,
        jammer_strategy_seed=v("jammer.strategy_seed"), jammer_depth=v("jammer.depth"),
        top_weight=tw, second_weight=sw,
        environment=v("experiment.environment"), algorithms=algos,
        pulses=v("experiment.pulses"), trials=v("experiment.trials"), seed=v("experiment.seed"),
        confidence=v("experiment.confidence"), output_dir=v("experiment.output_dir"),
        batch_size=v("experiment.batch_size"),
        learning_rates=tuple((a, v(f"learning.{a}_learning_rate")) for a in ALGORITHMS),
        iwe_exploration=v("learning.iwe_exploration"),
        feature_mode=v("ome.feature_mode"), ome_history_depth=v("ome.history_depth"),
        source=source,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy of ``config`` with non-None overrides applied and re-validated."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    if "algorithms" in changes:
        changes["algorithms"] = tuple(dict.fromkeys(a.lower() for a in changes["algorithms"]))
    config = replace(config, **changes)
    return parse_config(format_config(config), source=config.source)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(config: ExperimentConfig) -> str:
    """Effective config text with every default written out."""
    lb = config.link_budget
    lines = ["[meta]", f"schema_version = {config.schema_version}", "",
             "[radar]",
             f"n_frequencies = {config.n_frequencies}",
             f"subpulses = {config.subpulses}",
             f"base_frequency = {_fmt(config.base_frequency)}",
             f"frequency_step = {_fmt(config.frequency_step)}",
             f"flat_echo = {_fmt(config.flat_echo)}",
             f"size_cap = {config.size_cap}", "",
             "[link_budget]"]
    for f in fields(LinkBudgetParams):
        value = getattr(lb, f.name)
        lines.append(f"{f.name} = {'auto' if value is None else _fmt(float(value))}")
    lines += ["", "[jammer]", f"type = {config.jammer_type}"]
    if config.jammer_strategy is None:
        lines.append("strategy = uniform")
    else:
        lines.append("strategy =")
        weights = [repr(float(w)) for w in config.jammer_strategy]
        for i in range(0, len(weights), 4):
            lines.append("    " + ", ".join(weights[i:i + 4]))
    if config.jammer_strategy_seed:
        lines.append(f"strategy_seed = {config.jammer_strategy_seed}")
    lines += [f"depth = {config.jammer_depth}",
              f"top_weight = {_fmt(float(config.top_weight))}",
              f"second_weight = {_fmt(float(config.second_weight))}", ""]
    if config.special_actions:
        lines.append("[special_actions]")
        for name, flags in config.special_actions:
            lines.append(f"{name} = " + ", ".join("1" if f else "0" for f in flags))
        lines.append("")
    lines += ["[experiment]"]
    if config.environment:
        lines.append(f"environment = {config.environment}")
    lines += [f"algorithms = {', '.join(config.algorithms)}",
              f"pulses = {config.pulses}",
              f"trials = {config.trials}",
              f"seed = {config.seed}",
              f"confidence = {_fmt(float(config.confidence))}",
              f"output_dir = {config.output_dir}",
              f"batch_size = {config.batch_size}", "",
              "[learning]"]
    for algo, rate in config.learning_rates:
        lines.append(f"{algo}_learning_rate = {'auto' if rate is None else _fmt(float(rate))}")
    lines += [f"iwe_exploration = {_fmt(float(config.iwe_exploration))}", "",
              "[ome]",
              f"feature_mode = {config.feature_mode}",
              f"history_depth = {config.ome_history_depth}", ""]
    return "\n".join(lines)


def config_digest(config: ExperimentConfig) -> str:
    """SHA-256 of the effective config text; the output directory is left out."""
    return hashlib.sha256(format_config(replace(config, output_dir="-")).encode()).hexdigest()


@dataclass(frozen=True)
class Scenario:
    """Everything an experiment needs, built from a config."""

    radar_set: RadarActionSet
    jammer_set: JammerActionSet
    powers: ReceivedPowers
    sinr_threshold: float
    cost_matrix: CostMatrix
    jammer: object
    features: HistoryFeatures


def build_scenario(config: ExperimentConfig) -> Scenario:
    check_action_space(config.n_frequencies, config.subpulses, config.size_cap)
    freqs = FrequencySet(config.base_frequency, config.frequency_step, config.n_frequencies)
    radar_set = RadarActionSet(freqs, config.subpulses)
    jammer_set = JammerActionSet(radar_set, tuple(n for n, _ in config.special_actions))
    powers = compute_received_powers(config.link_budget, freqs.frequencies, config.flat_echo)
    threshold = config.link_budget.sinr_threshold
    if threshold is None:
        threshold = default_sinr_threshold(powers)
    U = build_cost_matrix(radar_set, jammer_set, powers, threshold,
                          dict(config.special_actions), config.size_cap)
    if config.jammer_type == "stationary":
        y = (Strategy.uniform(jammer_set.size) if config.jammer_strategy is None
             else Strategy(np.array(config.jammer_strategy)))
        jammer = StationaryJammer(y)
    else:
        jammer = HistoryRuleJammer(radar_set, jammer_set, config.jammer_depth,
                                   config.top_weight, config.second_weight)
    features = HistoryFeatures(config.ome_history_depth, config.feature_mode, radar_set)
    return Scenario(radar_set, jammer_set, powers, threshold, U, jammer, features)


def resolved_learning_rate(config: ExperimentConfig, algorithm: str, n_actions: int) -> float:
    rate = config.learning_rate(algorithm)
    return default_learning_rate(algorithm, config.pulses, n_actions) if rate is None else rate
