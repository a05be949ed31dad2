"""Received powers, per-sub-pulse SINR and the cost matrix for 4 carriers x 2 sub-pulses."""
import numpy as np

from radar_oco import (FrequencySet, JammerActionSet, LinkBudgetParams, RadarActionSet,
                       build_cost_matrix, compute_received_powers, default_sinr_threshold)

params = LinkBudgetParams()
freqs = FrequencySet(10e9, 100e6, 4)
powers = compute_received_powers(params, freqs.frequencies)

print("echo power per carrier [W]:", powers.echo_power_per_frequency)
print("jammer power at receiver [W]:", powers.jam_power)
print("noise power [W]:", powers.noise_power)

"""
Threshold: the weakest clean echo, so an unjammed sub-pulse never costs anything.
"""
c = default_sinr_threshold(powers)
print("clean SINR per carrier:", powers.echo_power_per_frequency / powers.noise_power)
print("threshold c =", c)

radar = RadarActionSet(freqs, 2)
jammer = JammerActionSet(radar)
U = build_cost_matrix(radar, jammer, powers, c)

# rows: radar actions, columns: jammer actions, both in (f1, f2) order
np.set_printoptions(precision=3, suppress=True, linewidth=140)
print(U.entries)
print("radar (1, 2) vs jammer (1, 3):", U[radar.encode((1, 2)), radar.encode((1, 3))])
print("radar (1, 2) vs jammer (1, 2):", U[radar.encode((1, 2)), radar.encode((1, 2))])
