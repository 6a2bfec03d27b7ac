"""
Exact expected runtime and the best resampling number
=====================================================

How many noisy fitness evaluations does RMHC need on OneMax, starting from
the all-zeros string, when every genome is evaluated ``r`` times?
"""

import numpy as np

from noisyonemax import expected_evaluations, optimal_resampling, p_ta_resampled

# Resampling raises the chance of keeping a true improvement.
for r in (1, 2, 4, 10):
    print(f"r={r:>2}  p_ta={p_ta_resampled(r, sigma=1.0):.6f}")

# At n = 10 every extra resample is wasted: the cost grows with r.
for r in (1, 2, 3, 4, 5, 10):
    print(f"n=10 r={r:>2}  expected evaluations={expected_evaluations(10, r).expected_evaluations:.4f}")

# Cost curves for a few dimensions. Each curve has a minimum that moves right
# as n grows.
r_values = np.arange(1, 41)
for n in (10, 30, 100, 300, 1000):
    curve = np.array([expected_evaluations(n, int(r)).expected_evaluations for r in r_values])
    best = optimal_resampling(n)
    print(f"n={n:>5}  r*={best.r_star:>3}  cost={best.cost:14.1f}  cost at r=40: {curve[-1]:14.1f}")

# The same scan at a lower and a higher noise level.
for sigma in (0.5, 2.0):
    stars = [optimal_resampling(n, sigma).r_star for n in (10, 100, 1000)]
    print(f"sigma={sigma}: r* for n=10, 100, 1000 -> {stars}")
