"""Command-line entry point: ``radar-oco run`` and ``radar-oco validate``.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import (build_scenario, config_digest, format_config, load_config,
                     resolved_learning_rate, with_overrides)
from .engine import AggregateResult, aggregate, run_trials, trial_seeds
from .errors import ConfigurationError, RadarOcoError

log = logging.getLogger("radar_oco")

CSV_HEADER = ("pulse,static_regret_mean,static_ci_low,static_ci_high,"
              "universal_regret_mean,universal_ci_low,universal_ci_high,sinr_norm_mean")
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def format_csv(result: AggregateResult) -> str:
    """Aggregate curves as CSV text: 9 significant digits, '.' decimals, '\\n' rows."""
    cols = (result.static_mean, result.static_low, result.static_high,
            result.universal_mean, result.universal_low, result.universal_high,
            result.sinr_norm_mean)
    rows = [CSV_HEADER]
    for n in range(result.n_pulses):
        rows.append(",".join([str(n + 1)] + [format(float(c[n]), ".8e") for c in cols]))
    return "\n".join(rows) + "\n"


def _final(result: AggregateResult) -> dict:
    return {
        "static_regret_mean": float(result.static_mean[-1]),
        "static_ci": [float(result.static_low[-1]), float(result.static_high[-1])],
        "universal_regret_mean": float(result.universal_mean[-1]),
        "universal_ci": [float(result.universal_low[-1]), float(result.universal_high[-1])],
        "sinr_norm_mean": float(result.sinr_norm_mean[-1]),
    }


def run_experiment(config, out_dir=None) -> dict:
    """Run every configured algorithm and write CSVs, ``summary.json`` and the
    effective config into the output directory. Returns the summary."""
    start = time.perf_counter()
    out = Path(out_dir if out_dir is not None else config.output_dir)
    scenario = build_scenario(config)
    lb = replace(config.link_budget, sinr_threshold=scenario.sinr_threshold)
    effective = replace(config, link_budget=lb, output_dir=str(out))
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective.config").write_text(format_config(effective))

    env = config.environment_name
    seeds = trial_seeds(config.seed, config.trials)
    K = scenario.cost_matrix.shape[0]
    summary = {
        "environment": env,
        "base_seed": config.seed,
        "seed_derivation": "trial i uses SeedSequence([base_seed, i]).generate_state(1, uint64); "
                           "its radar and jammer streams are SeedSequence(trial_seed).spawn(2)",
        "trial_seeds": seeds,
        "n_radar_actions": K,
        "n_jammer_actions": scenario.cost_matrix.shape[1],
        "sinr_threshold": scenario.sinr_threshold,
        "pulses": config.pulses,
        "trials": config.trials,
        "confidence": config.confidence,
        "ome_features": {"mode": scenario.features.mode, "history_depth": scenario.features.depth},
        "config_digest": config_digest(effective),
        "algorithms": {},
    }
    for algo in config.algorithms:
        eta = resolved_learning_rate(config, algo, K)
        log.info("running %s (%s): %d trials x %d pulses, eta=%.6g",
                 algo, env, config.trials, config.pulses, eta)
        ledgers = run_trials(scenario.cost_matrix, scenario.jammer, algo, config.pulses, seeds,
                             batch_size=config.batch_size, learning_rate=eta,
                             features=scenario.features,
                             exploration=config.iwe_exploration if algo == "iwe" else 0.0)
        result = aggregate(ledgers, config.confidence, seeds)
        csv_name = f"{algo}_{env}.csv"
        with open(out / csv_name, "w", newline="", encoding="ascii") as fh:
            fh.write(format_csv(result))
        summary["algorithms"][algo] = {"learning_rate": eta, "csv": csv_name,
                                       "final": _final(result)}
    summary["runtime_seconds"] = time.perf_counter() - start
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def _parser():
    p = argparse.ArgumentParser(prog="radar-oco", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--trials", type=int)
    run.add_argument("--pulses", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--algo", action="append", choices=("iwe", "ame", "ome"))
    run.add_argument("-v", "--verbose", action="store_true")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config)
        if args.command == "validate":
            build_scenario(config)
            print(f"{args.config}: ok")
            return EXIT_OK
        config = with_overrides(config, trials=args.trials, pulses=args.pulses,
                                seed=args.seed, algorithms=args.algo)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run_experiment(config, args.out)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RadarOcoError, ArithmeticError, ValueError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out = args.out or config.output_dir
    print(f"wrote {len(summary['algorithms'])} result file(s) to {out} "
          f"in {summary['runtime_seconds']:.1f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
