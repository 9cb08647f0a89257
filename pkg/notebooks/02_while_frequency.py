"""
How often can an scf.while be built?
====================================

A while loop needs an i1 condition computed inside its condition region.
If the ops visible to that region are N + K geometric draws and each one
yields an i1 with probability p_bool, the chance of success has a closed
form. We compare it with simulation and with the real generator.
"""

# %%
import numpy as np

from irsmith.stats import FreqModelParams, monte_carlo_while, while_success_probability

params = FreqModelParams(p_g=0.2, p_bool=1 / 90)
print("analytic:", round(while_success_probability(params), 6))
mc = monte_carlo_while(params, 100_000, seed=0)
print(f"monte carlo: {mc.estimate:.5f} +- {mc.std_error:.5f}")

# %%
# Sweep p_bool for a few stopping probabilities.
p_bools = np.array([0.0, 1 / 90, 0.05, 0.1, 0.25, 0.5, 1.0])
print("p_bool    " + "  ".join(f"{p:7.4f}" for p in p_bools))
for p_g in (0.1, 0.2, 0.5):
    row = [while_success_probability(FreqModelParams(p_g, p)) for p in p_bools]
    print(f"p_g={p_g:<5} " + "  ".join(f"{x:7.4f}" for x in row))

# %%
# The real generator at its defaults. Its bool-producer share is far above
# 1/90, and ops from enclosing scopes are visible too, so the measured
# fraction departs from the idealized model.
from irsmith import GenConfig
from irsmith.stats import compare_while_frequency, measure_op_frequencies

config = GenConfig(seed=0)
report = measure_op_frequencies(config, 500)
measured, analytic = compare_while_frequency(report, config.p_stop)
print(f"bool-producer fraction: {report.bool_fraction:.4f}")
print(f"measured while success: {measured:.4f}, model at matched params: {analytic:.4f}")
print(report.to_tsv())
