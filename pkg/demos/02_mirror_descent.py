"""One mirror-descent step with the entropic regularizer, then a short run."""
import math

import numpy as np

from radar_oco import OmdState, default_learning_rate, omd_step

state = OmdState.from_strategy([0.5, 0.5], learning_rate=math.log(2))
state = omd_step(state, [1.0, 0.0])
print("after one step:", state.strategy.weights)    # (1/3, 2/3)

"""
Repeated losses: mass drains from the expensive actions exponentially fast.
"""
losses = np.array([0.9, 0.5, 0.1, 0.7])
eta = default_learning_rate("ame", 200, 4)
state = OmdState.uniform(4, eta)
for n in range(200):
    state = omd_step(state, losses)
    if n in (0, 9, 49, 199):
        print(f"pulse {n + 1:4d}:", np.round(state.strategy.weights, 4))
