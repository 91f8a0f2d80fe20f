import math

import numpy as np
import pytest

from semdiscord.distance import (DistanceInputs, context_aware_dist_direct,
                                 context_aware_dist_fast, correlation,
                                 z_norm_dist, znorm_from_dot)
from semdiscord.errors import FlatWindowError, InvalidWindowError
from semdiscord.harness import random_walk
from semdiscord.stats import compute_moving_stats, qt_first_row, qt_next_row


def test_znorm_affine_equivalent_windows():
    assert z_norm_dist([1, 2, 3], [4, 5, 6]) == pytest.approx(0.0, abs=1e-12)


def test_znorm_reversed_ramp():
    assert z_norm_dist([1, 2, 3], [3, 2, 1]) == pytest.approx(2 * math.sqrt(3), abs=1e-12)


def test_znorm_alternating():
    assert z_norm_dist([0, 1, 0, 1], [1, 0, 1, 0]) == pytest.approx(4.0, abs=1e-12)


def test_znorm_flat_raises():
    with pytest.raises(FlatWindowError):
        z_norm_dist([2, 2, 2], [1, 2, 3])


def test_znorm_identity_against_literal_sum(rng):
    # d^2 = 2 w (1 - r), compared in squared form where it is well conditioned
    for _ in range(200):
        w = int(rng.integers(2, 30))
        a, b = rng.standard_normal(w), rng.standard_normal(w)
        za = (a - a.mean()) / a.std()
        zb = (b - b.mean()) / b.std()
        literal = float(np.sum((za - zb) ** 2))
        from_dot = znorm_from_dot(float(a @ b), w, a.mean(), a.std(), b.mean(), b.std()) ** 2
        assert from_dot == pytest.approx(literal, abs=1e-9)
        assert z_norm_dist(a, b) ** 2 == pytest.approx(literal, abs=1e-9)


def _stats(x, l, L):
    return compute_moving_stats(x, l), compute_moving_stats(x, L)


def test_context_aware_hand_example():
    # both contexts have mean 0 and population std 1; the targets differ by
    # one unit in a single position
    x = np.array([0, 1, 0, -2, 1, 0, 0, 2, 0, -1, -1, 0], float)
    d = DistanceInputs(p=0, q=6, i=0, j=6, l=3, L=6)
    assert context_aware_dist_direct(x, d) == pytest.approx(1.0, abs=1e-12)
    sl, sL = _stats(x, 3, 6)
    qt = float(x[0:3] @ x[6:9])
    assert context_aware_dist_fast(qt, d, sl, sL) == pytest.approx(1.0, abs=1e-9)


def test_context_equal_to_target_is_znorm(rng):
    x = rng.standard_normal(60)
    d = DistanceInputs(p=3, q=40, i=3, j=40, l=12, L=12)
    expect = z_norm_dist(x[3:15], x[40:52])
    assert context_aware_dist_direct(x, d) == pytest.approx(expect, abs=1e-9)
    sl, sL = _stats(x, 12, 12)
    assert context_aware_dist_fast(float(x[3:15] @ x[40:52]), d, sl, sL) == pytest.approx(expect, abs=1e-9)


def test_identical_segments_identical_contexts():
    base = np.sin(np.arange(30) / 3.0)
    x = np.r_[base, base]
    d = DistanceInputs(p=5, q=35, i=2, j=32, l=8, L=20)
    assert context_aware_dist_direct(x, d) == pytest.approx(0.0, abs=1e-12)


def test_direct_rejects_flat_context():
    x = np.r_[np.zeros(20), np.arange(20.0)]
    with pytest.raises(FlatWindowError):
        context_aware_dist_direct(x, DistanceInputs(2, 25, 0, 20, 4, 10))


def test_inputs_validation():
    with pytest.raises(InvalidWindowError):
        DistanceInputs(5, 30, 6, 30, 4, 10).check(50)   # context after target
    with pytest.raises(InvalidWindowError):
        DistanceInputs(15, 30, 0, 30, 4, 10).check(50)  # context ends before target
    with pytest.raises(InvalidWindowError):
        DistanceInputs(5, 30, 5, 30, 12, 10).check(50)  # l > L


def _random_tuple(gen, n, l, L, separated=False):
    p = int(gen.integers(0, n - l + 1))
    q = int(gen.integers(0, n - l + 1))
    while separated and abs(p - q) <= L:
        q = int(gen.integers(0, n - l + 1))
    i = int(gen.integers(max(0, p - L + l), min(p, n - L) + 1))
    j = int(gen.integers(max(0, q - L + l), min(q, n - L) + 1))
    return DistanceInputs(p, q, i, j, l, L)


def fast_vs_direct_worst(tuples=100_000, seed=0):
    """Largest |fast - direct| / max(1, direct) over random tuples.

    Targets are non-overlapping (``|p - q| > L``), the pairs on which the
    optimal distance is defined. Half the tuples read QT from the row
    streamed through ``qt_next_row`` (chained from anchor 0), the rest use a
    scalar dot product. Series are
    random walks, rescaled and offset, then centred on their mean as every
    search does before using the closed form.
    """
    gen = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    series = 0
    while done < tuples:
        x = random_walk(400, seed=seed * 1000 + series) * float(gen.uniform(0.1, 50)) + float(gen.uniform(-100, 100))
        x = x - x.mean()
        series += 1
        L = int(gen.integers(10, 60))
        l = int(gen.integers(2, L + 1))
        if x.size - l < L + 1:
            continue
        sl, sL = _stats(x, l, L)
        rows = [qt_first_row(x, l)]
        for _ in range(x.size - l):
            rows.append(qt_next_row(rows[-1], x, l))
        for _ in range(2000):
            d = _random_tuple(gen, x.size, l, L, separated=True)
            if sL.flat[d.i] or sL.flat[d.j]:
                continue
            direct = context_aware_dist_direct(x, d)
            qt = rows[d.p] if done % 2 else float(x[d.p:d.p + l] @ x[d.q:d.q + l])
            fast = context_aware_dist_fast(qt, d, sl, sL)
            worst = max(worst, abs(fast - direct) / max(1.0, direct))
            done += 1
    return worst, done


def test_fast_matches_direct_small_sample():
    worst, done = fast_vs_direct_worst(tuples=5000, seed=7)
    assert worst <= 1e-9


def test_uncentred_offset_loses_accuracy_gracefully():
    # documents the conditioning of the closed form on raw offset data: still
    # accurate to about 1e-6, which is why searches centre the series first
    x = random_walk(400, seed=1) + 100.0
    sl, sL = _stats(x, 10, 40)
    gen = np.random.default_rng(1)
    worst = 0.0
    for _ in range(2000):
        d = _random_tuple(gen, x.size, 10, 40)
        a = context_aware_dist_direct(x, d)
        b = context_aware_dist_fast(float(x[d.p:d.p + 10] @ x[d.q:d.q + 10]), d, sl, sL)
        worst = max(worst, abs(a - b) / max(1.0, a))
    assert worst <= 1e-5


def test_zero_distance_through_chained_row():
    # a target against itself under the same context: the true distance is 0,
    # and the square root turns rounding in the streamed inner product into
    # an absolute error of order sqrt(machine epsilon); in squares, the
    # quantity searches compare, it stays within the usual tolerance
    x = random_walk(400, seed=2) * 30.0
    x -= x.mean()
    sl, sL = _stats(x, 30, 38)
    row = qt_first_row(x, 30)
    worst = 0.0
    for p in range(1, 360):
        row = qt_next_row(row, x, 30)
        d = DistanceInputs(p, p, max(0, p - 8), max(0, p - 8), 30, 38)
        worst = max(worst, context_aware_dist_fast(row, d, sl, sL))
    assert worst ** 2 <= 1e-9


def test_exchange_symmetry(rng):
    x = random_walk(200, seed=4)
    sl, sL = _stats(x, 10, 30)
    for _ in range(500):
        d = _random_tuple(rng, x.size, 10, 30)
        swapped = DistanceInputs(d.q, d.p, d.j, d.i, d.l, d.L)
        qt = float(x[d.p:d.p + 10] @ x[d.q:d.q + 10])
        assert context_aware_dist_fast(qt, d, sl, sL) == pytest.approx(
            context_aware_dist_fast(qt, swapped, sl, sL), abs=1e-12)
        assert context_aware_dist_direct(x, d) == pytest.approx(
            context_aware_dist_direct(x, swapped), abs=1e-12)


def test_affine_invariance(rng):
    x = random_walk(150, seed=9)
    y = 3.7 * x - 250.0
    for _ in range(300):
        d = _random_tuple(rng, x.size, 8, 25)
        a, b = context_aware_dist_direct(x, d), context_aware_dist_direct(y, d)
        assert abs(a - b) <= 1e-9 * max(1.0, a)
        assert a >= 0.0


def test_correlation_cases(rng):
    x = rng.standard_normal(50)
    x = np.r_[x, -x[:20] + 4.0]
    sl = compute_moving_stats(x, 20)
    row = qt_first_row(x, 20)
    assert correlation(0, 0, row, sl) == pytest.approx(1.0, abs=1e-12)
    assert correlation(0, 50, row, sl) == pytest.approx(-1.0, abs=1e-12)
    for q in (7, 13, 31):
        expect = np.corrcoef(x[0:20], x[q:q + 20])[0, 1]
        assert correlation(0, q, row, sl) == pytest.approx(expect, abs=1e-9)


def test_correlation_flat_target():
    x = np.r_[np.ones(10), np.arange(10.0)]
    sl = compute_moving_stats(x, 5)
    with pytest.raises(FlatWindowError):
        correlation(0, 12, float(x[0:5] @ x[12:17]), sl)
