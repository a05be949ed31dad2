"""Online mirror descent for frequency-agile radar against DRFM jammers."""
from .domain import (FrequencySet, HistoryWindow, JammerActionSet, RadarActionSet, Strategy,
                     decode_action, encode_action, sample)
from .engine import (AggregateResult, PulseRecord, RegretLedger, aggregate, run_trial,
                     run_trials, simulate, static_regret, trial_seeds, universal_regret)
from .estimators import (GradientEstimate, HistoryFeatures, OpponentModel, ame_gradient,
                         iwe_gradient, observe, ome_gradient, predict)
from .jammer import HistoryRuleJammer, StationaryJammer, jammer_act, jammer_strategy
from .link_budget import (CostMatrix, LinkBudgetParams, ReceivedPowers, action_cost,
                          build_cost_matrix, compute_received_powers, default_sinr_threshold,
                          subpulse_sinr)
from .omd import OmdState, default_learning_rate, omd_step

__version__ = "0.1.0"
