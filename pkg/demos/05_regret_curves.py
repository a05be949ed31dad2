"""Static and universal regret of the three learners in both environments (short run)."""
import numpy as np

from radar_oco import (FrequencySet, HistoryFeatures, HistoryRuleJammer, JammerActionSet,
                       LinkBudgetParams, RadarActionSet, StationaryJammer, Strategy, aggregate,
                       build_cost_matrix, compute_received_powers, default_sinr_threshold,
                       run_trials, trial_seeds)

radar = RadarActionSet(FrequencySet(10e9, 100e6, 4), 2)
jammers = JammerActionSet(radar)
powers = compute_received_powers(LinkBudgetParams(), radar.frequencies.frequencies)
U = build_cost_matrix(radar, jammers, powers, default_sinr_threshold(powers))

N, seeds = 2000, trial_seeds(1, 50)
environments = {
    "stationary": (StationaryJammer(Strategy(np.random.default_rng(0).dirichlet(np.ones(16)))),
                   HistoryFeatures(0)),
    "history-rule": (HistoryRuleJammer(radar, jammers, 3),
                     HistoryFeatures(3, "frequency-histogram", radar)),
}
for env, (jammer, features) in environments.items():
    print(env)
    for algo in ("iwe", "ame", "ome"):
        res = aggregate(run_trials(U, jammer, algo, N, seeds, features=features))
        print(f"  {algo}: static {res.static_mean[-1]:7.1f}  universal "
              f"{res.universal_mean[-1]:7.1f}  SINR/c {res.sinr_norm_mean[-1]:.3f}")
