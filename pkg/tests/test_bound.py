import numpy as np
import pytest

from semdiscord.bound import lb_row, lower_bound
from semdiscord.distance import DistanceInputs, context_aware_dist_direct
from semdiscord.errors import InfeasiblePairError
from semdiscord.harness import random_walk
from semdiscord.stats import (compute_moving_stats, compute_window_max_std,
                              context_range, qt_first_row)


def _setup(x, L, l):
    sl, sL = compute_moving_stats(x, l), compute_moving_stats(x, L)
    return sl, sL, compute_window_max_std(sL.sigma, L, l)


def _delta(x, p, q, l):
    return float(np.clip(np.corrcoef(x[p:p + l], x[q:q + l])[0, 1], -1, 1))


def test_bound_is_zero_at_perfect_correlation():
    x = random_walk(100, seed=2)
    sl, sL, m = _setup(x, 20, 8)
    assert lower_bound(10, 60, 1.0, m, sl) == 0.0


def test_bound_nonpositive_correlation_is_gamma_root_l():
    x = random_walk(100, seed=2)
    sl, sL, m = _setup(x, 20, 8)
    gamma = max(sl.sigma[60] / m.max_sigma[60], sl.sigma[10] / m.max_sigma[10])
    for delta in (0.0, -0.3, -1.0):
        assert lower_bound(10, 60, delta, m, sl) == pytest.approx(gamma * np.sqrt(8), rel=1e-15)


def test_bound_monotone_and_symmetric():
    x = random_walk(120, seed=5)
    sl, sL, m = _setup(x, 30, 10)
    deltas = np.linspace(0.01, 1.0, 50)
    vals = [lower_bound(5, 80, d, m, sl) for d in deltas]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    for d in (-0.5, 0.2, 0.9):
        assert lower_bound(5, 80, d, m, sl) == lower_bound(80, 5, d, m, sl)


def test_bound_infeasible_when_all_contexts_flat():
    x = np.r_[np.zeros(40), random_walk(60, seed=1)]
    sl, sL, m = _setup(x, 20, 8)
    with pytest.raises(InfeasiblePairError):
        lower_bound(2, 70, 0.1, m, sl)


def lb_soundness_violations(series=20, pairs=100_000, n=300, L=40, l=16, seed=0):
    """Count (p, q, i, j) with LB(p, q) > d_ij(p, q) + 1e-9.

    Target pairs are sampled uniformly among non-self matches
    (``|p - q| > L``), the pairs for which the optimal distance exists.
    Every context pair enclosing the two targets with both contexts
    non-flat is enumerated, ignoring the similarity threshold and the
    context non-overlap rule (the bound must hold without them). Returns
    ``(violations, pairs_checked, context_pairs_checked)``.
    """
    gen = np.random.default_rng(seed)
    per = pairs // series
    bad = checked = ctx = 0
    for s in range(series):
        x = random_walk(n, seed=seed * 100 + s)
        sl, sL, m = _setup(x, L, l)
        W = np.lib.stride_tricks.sliding_window_view(x, L)
        Tw = np.lib.stride_tricks.sliding_window_view(x, l)
        cm, cs = W.mean(axis=1), W.std(axis=1)
        N = n - l + 1
        for _ in range(per):
            p, q = (int(v) for v in gen.integers(0, N, size=2))
            while abs(p - q) <= L:
                p, q = (int(v) for v in gen.integers(0, N, size=2))
            lb = lower_bound(p, q, _delta(x, p, q, l), m, sl)
            I = np.arange(*np.add(context_range(p, L, l, n), (0, 1)))
            J = np.arange(*np.add(context_range(q, L, l, n), (0, 1)))
            A = (Tw[p][None, :] - cm[I][:, None]) / cs[I][:, None]
            B = (Tw[q][None, :] - cm[J][:, None]) / cs[J][:, None]
            D = np.sqrt(np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=-1))
            bad += int(np.sum(lb > D + 1e-9))
            checked += 1
            ctx += D.size
    return bad, checked, ctx


def test_bound_sound_small_sample():
    bad, checked, _ = lb_soundness_violations(series=4, pairs=2000, n=200, L=30, l=12, seed=3)
    assert checked == 2000 and bad == 0


def test_bound_sound_in_squares_for_overlapping_targets():
    # p = q has distance 0 and correlation 1 up to rounding; the square
    # root amplifies that rounding, so the check is made on squares
    x = random_walk(200, seed=3)
    sl, sL, m = _setup(x, 30, 12)
    for p in (0, 37, 120, 188):
        lb = lower_bound(p, p, _delta(x, p, p, 12), m, sl)
        assert lb ** 2 <= 1e-9


def test_bound_sound_against_literal_distance():
    # independent of the vectorised enumeration above
    x = random_walk(120, seed=8)
    L, l = 24, 9
    sl, sL, m = _setup(x, L, l)
    for p, q in [(0, 100), (37, 38), (60, 5), (111, 111), (50, 90)]:
        lb = lower_bound(p, q, _delta(x, p, q, l), m, sl)
        lo_i, hi_i = context_range(p, L, l, x.size)
        lo_j, hi_j = context_range(q, L, l, x.size)
        for i in range(lo_i, hi_i + 1):
            for j in range(lo_j, hi_j + 1):
                d = context_aware_dist_direct(x, DistanceInputs(p, q, i, j, l, L))
                assert lb <= d + 1e-9


def test_lb_row_matches_per_pair_calls():
    x = random_walk(200, seed=6)
    sl, sL, m = _setup(x, 30, 12)
    row = lb_row(17, qt_first_row(x, 12).__class__(17, np.lib.stride_tricks.sliding_window_view(x, 12) @ x[17:29]), sl, m)
    for q in range(0, 189, 7):
        delta = float(np.clip((row.lb.size and
                               (np.dot(x[17:29], x[q:q + 12]) - 12 * sl.mu[17] * sl.mu[q]) / (12 * sl.sigma[17] * sl.sigma[q])), -1, 1))
        assert row.lb[q] == pytest.approx(lower_bound(17, q, delta, m, sl), rel=1e-12, abs=1e-12)
    lbs = row.lb[row.order]
    assert sorted(row.order.tolist()) == list(range(row.lb.size))
    assert np.all(np.diff(lbs) >= 0)
    ties = np.flatnonzero(np.diff(lbs) == 0)
    assert np.all(row.order[ties] < row.order[ties + 1])


def test_lb_row_affine_copies_are_zero():
    # a strictly increasing ramp: every window is an affine copy of every other
    x = np.arange(60.0)
    sl, sL, m = _setup(x, 15, 6)
    row = lb_row(0, qt_first_row(x, 6), sl, m)
    assert np.allclose(row.lb, 0.0, atol=1e-6)
    assert row.order.tolist() == sorted(row.order.tolist()) or np.all(np.diff(row.lb[row.order]) >= 0)


def test_lb_row_flat_entries_last():
    x = np.r_[random_walk(50, seed=2), np.full(20, 3.0), random_walk(50, seed=3)]
    sl, sL, m = _setup(x, 20, 8)
    row = lb_row(0, qt_first_row(x, 8), sl, m)
    assert np.isinf(row.lb[sl.flat]).all()
    k = int(np.sum(np.isfinite(row.lb)))
    assert np.isinf(row.lb[row.order[k:]]).all()
