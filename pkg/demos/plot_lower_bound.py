"""
How tight is the lower bound?
=============================

For a pair of targets the bound needs only their correlation and the
largest standard deviation among each target's contexts, so it costs O(1)
once the sliding statistics exist. Here it is compared with the optimal
distance it bounds, for a few hundred random pairs.
"""

import math

import numpy as np

from semdiscord import (calibrate_epsilon, compute_moving_stats,
                        compute_window_max_std, d_opt, lower_bound, prepare,
                        random_walk)

x = random_walk(400, seed=2)
L, l = 40, 16
eps = calibrate_epsilon(x, L, seed=2)
prep = prepare(x, L, l)
stats_l = compute_moving_stats(x, l)
maxstd = compute_window_max_std(compute_moving_stats(x, L).sigma, L, l)

rng = np.random.default_rng(0)
rows = []
while len(rows) < 300:
    p, q = (int(v) for v in rng.integers(0, x.size - l + 1, size=2))
    if abs(p - q) <= L:
        continue
    delta = float(np.corrcoef(x[p:p + l], x[q:q + l])[0, 1])
    lb = lower_bound(p, q, delta, maxstd, stats_l)
    d, _ = d_opt(x, p, q, L, l, eps, prepared=prep)
    if math.isfinite(d):
        rows.append((delta, lb, d))

rows = np.array(rows)
print("pairs with a feasible context pair:", len(rows))
print("bound never exceeds the distance:", bool(np.all(rows[:, 1] <= rows[:, 2] + 1e-9)))
print("median bound / distance: %.2f" % np.median(rows[:, 1] / rows[:, 2]))

# the bound is tightest for well-correlated targets
for lo, hi in [(-1, 0), (0, 0.5), (0.5, 0.9), (0.9, 1.0)]:
    sel = (rows[:, 0] > lo) & (rows[:, 0] <= hi)
    if sel.any():
        print(f"correlation in ({lo:+.1f}, {hi:+.1f}]: mean ratio "
              f"{np.mean(rows[sel, 1] / rows[sel, 2]):.2f} over {sel.sum()} pairs")
