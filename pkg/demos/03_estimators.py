"""The three loss estimates on one pulse, and their averages over many pulses."""
import numpy as np

from radar_oco import (HistoryFeatures, HistoryWindow, OpponentModel, Strategy, ame_gradient,
                       iwe_gradient, observe, ome_gradient, sample)

rng = np.random.default_rng(0)
U = np.array([[0.1, 0.8, 0.4],
              [0.9, 0.2, 0.3]])
x = Strategy([0.6, 0.4])
y = Strategy([0.2, 0.5, 0.3])
true_loss = U @ y.weights
print("true loss vector U y:", true_loss)

iwe_sum = np.zeros(2)
ame_sum = np.zeros(2)
n = 20000
for _ in range(n):
    a, b = sample(x, rng), sample(y, rng)
    iwe_sum += iwe_gradient(U[a, b], a, x).values
    ame_sum += ame_gradient(b, U).values
print("mean bandit estimate :", iwe_sum / n)
print("mean column estimate :", ame_sum / n)

"""
Opponent model: counts of jammer actions per history key.
"""
model = OpponentModel(HistoryFeatures(0), 3)
history = HistoryWindow(0)
for _ in range(500):
    model = observe(model, history, sample(y, rng))
print("modelled loss vector :", ome_gradient(model, history, U).values)
