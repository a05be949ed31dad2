"""The history-driven jammer reacts to the radar's most used carriers."""
import numpy as np

from radar_oco import (FrequencySet, HistoryRuleJammer, HistoryWindow, JammerActionSet,
                       RadarActionSet, jammer_strategy)

radar = RadarActionSet(FrequencySet(10e9, 100e6, 4), 2)
jammer_set = JammerActionSet(radar)
jammer = HistoryRuleJammer(radar, jammer_set, depth=3)

history = HistoryWindow(3)
for pulse in [(1, 2), (2, 2), (4, 1)]:
    history = history.push(radar.encode(pulse), 0)
    y = jammer_strategy(jammer, history)
    support = {radar.decode(int(b)): round(float(y.weights[b]), 2)
               for b in np.flatnonzero(y.weights)}
    label = "uniform" if len(support) == radar.size else support
    print(f"after radar {pulse}: {label}")
