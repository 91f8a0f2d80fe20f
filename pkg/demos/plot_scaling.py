"""
Distance calls as the series grows
==================================

Brute force evaluates every pair of non-overlapping targets, a number that
grows quadratically with the series length and has a closed form. The
pruned search evaluates a shrinking fraction of them. Pass larger sizes on
the command line (for example ``2000 4000 8000 16000``) to go further; the
largest take about a minute each on one core.
"""

import sys
import time

from semdiscord import SearchConfig, candidate_pair_count, pruned_search, random_walk

sizes = [int(a) for a in sys.argv[1:]] or [1000, 2000, 4000]
L, l = 400, 160
walk = random_walk(max(sizes), seed=0)

print(f"{'n':>7} {'brute force':>14} {'pruned':>12} {'pruning':>8} {'ratio':>7} {'time':>7}")
for n in sizes:
    t0 = time.perf_counter()
    _, m = pruned_search(walk[:n], SearchConfig(L, l, seed=0))
    N = n - l + 1
    assert candidate_pair_count(walk[:n], L, l) == (N - L - 1) * (N - L)
    print(f"{n:>7} {m.candidate_pairs:>14} {m.distance_calls:>12} {m.pruning_rate:>8.2%} "
          f"{m.candidate_pairs / m.distance_calls:>6.1f}x {time.perf_counter() - t0:>6.1f}s")
