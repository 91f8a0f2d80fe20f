"""Compiled inner loops for the discord searches.

All positions are 0-based. The series passed in is already centred on its
global mean (every distance used here is invariant to a constant shift, and
centring keeps the streamed dot products well conditioned).

The brute-force and pruned searches call the same :func:`pair_min`, so for a
given pair they produce bit-identical squared distances. This is what lets the
pruned search reproduce brute force exactly, including tie-breaks.
"""
import math

import numpy as np
from numba import njit

INF = np.inf

# Relative slack on every prune decision; see ``search_chunk``.
PRUNE_SLACK = 1e-9


@njit(cache=True, nogil=True)
def _dot(x, a, b, w):
    s = 0.0
    for k in range(w):
        s += x[a + k] * x[b + k]
    return s


@njit(cache=True, nogil=True)
def context_mask_rows(x, mu_L, sd_L, flat_L, L, eps, r_lo, r_hi):
    """Packed bit rows ``bits[i - r_lo, j]`` of the context feasibility mask.

    Bit ``(i, j)`` is set when both contexts are non-flat, ``|i - j| > L`` and
    their z-normalised distance is below ``eps`` (already lowered by the
    caller's boundary margin). Context dot products are
    streamed row to row starting from a direct row at ``r_lo``.
    """
    nc = x.size - L + 1
    nrows = max(r_hi - r_lo + 1, 0)
    nbytes = (nc + 7) >> 3
    bits = np.zeros((nrows, nbytes), np.uint8)
    use_eps = eps < INF
    qt = np.empty(nc)
    for r in range(nrows):
        i = r_lo + r
        if use_eps:
            if r == 0:
                for j in range(nc):
                    qt[j] = _dot(x, i, j, L)
            else:
                a = x[i - 1]
                b = x[i + L - 1]
                for j in range(nc - 1, 0, -1):
                    qt[j] = qt[j - 1] - a * x[j - 1] + b * x[j + L - 1]
                qt[0] = _dot(x, i, 0, L)
        if flat_L[i]:
            continue
        for j in range(nc):
            if flat_L[j] or abs(i - j) <= L:
                continue
            if use_eps:
                rho = (qt[j] - L * mu_L[i] * mu_L[j]) / (L * sd_L[i] * sd_L[j])
                rho = min(1.0, max(-1.0, rho))
                if not math.sqrt(max(0.0, 2.0 * L * (1.0 - rho))) < eps:
                    continue
            bits[r, j >> 3] |= np.uint8(1 << (j & 7))
    return bits


@njit(cache=True, nogil=True)
def target_delta(qtv, l, mu_p, sd_p, mu_q, sd_q):
    d = (qtv - l * mu_p * mu_q) / (l * sd_p * sd_q)
    return min(1.0, max(-1.0, d))


@njit(cache=True, nogil=True)
def pair_min(bits, r_lo, mu_l, sd_l, mu_L, sd_L, flat_L, p, q, dl, l, L, nc, thr):
    """Minimum squared context-aware distance of ``(p, q)`` over feasible contexts.

    Returns ``(d2, i, j)``; ``d2`` is ``inf`` and ``i = j = -1`` when no
    context pair is feasible. Rows or columns whose lower bound already
    exceeds ``thr`` are skipped; entries at or below ``thr`` are always
    evaluated exactly, so the result is exact whenever it is ``<= thr``.
    Ties go to the smallest ``i`` then ``j``.

    The distance is written with ``s = sd_p / sd_i``, ``u = (mu_p - mu_i) / sd_i``
    (likewise ``t, v`` for ``q, j``)::

        d2 = l * ((s^2 + u^2) + (t^2 + v^2) - 2 (dl s t + u v))

    which is the mean/std/inner-product closed form regrouped.
    """
    K = L - l + 1
    i0 = max(0, p - K + 1)
    i1 = min(p, nc - 1)
    j0 = max(0, q - K + 1)
    j1 = min(q, nc - 1)
    c = 1.0 - dl * dl if dl > 0.0 else 1.0
    nj = j1 - j0 + 1
    tt = np.empty(nj)
    vv = np.empty(nj)
    bb = np.empty(nj)
    ok = np.zeros(nj, np.bool_)
    mu_q = mu_l[q]
    sd_q = sd_l[q]
    for k in range(nj):
        jj = j0 + k
        if flat_L[jj]:
            continue
        t = sd_q / sd_L[jj]
        if l * c * t * t > thr:
            continue
        v = (mu_q - mu_L[jj]) / sd_L[jj]
        tt[k] = t
        vv[k] = v
        bb[k] = t * t + v * v
        ok[k] = True
    best = INF
    bi = -1
    bj = -1
    mu_p = mu_l[p]
    sd_p = sd_l[p]
    for ii in range(i0, i1 + 1):
        if flat_L[ii]:
            continue
        s = sd_p / sd_L[ii]
        if l * c * s * s > thr:
            continue
        u = (mu_p - mu_L[ii]) / sd_L[ii]
        a = s * s + u * u
        r = ii - r_lo
        for k in range(nj):
            if not ok[k]:
                continue
            jj = j0 + k
            if not (bits[r, jj >> 3] >> (jj & 7)) & 1:
                continue
            f = l * ((a + bb[k]) - 2.0 * (dl * s * tt[k] + u * vv[k]))
            if f < 0.0:
                f = 0.0
            if f < best:
                best = f
                bi = ii
                bj = jj
    return best, bi, bj


@njit(cache=True, nogil=True)
def search_chunk(x, mu_l, sd_l, flat_l, mu_L, sd_L, flat_L, maxsd, l, L, eps,
                 p_lo, p_hi, pruned, out_nn, out_q, out_i, out_j, out_calls,
                 out_cands):
    """Nearest-neighbour search for every target in ``[p_lo, p_hi)``.

    Fills, per target ``p``: the squared nearest-neighbour distance, the
    reference target and the two contexts attaining it, the number of pair
    evaluations and the number of candidate references.

    Brute force evaluates every candidate in ascending order. The pruned
    variant sorts candidates by squared lower bound and stops as soon as the
    best distance so far is below the next bound by a relative margin of
    :data:`PRUNE_SLACK`. The margin absorbs rounding in bound and distance
    alike, so no pair that could win or tie is ever skipped.
    """
    n = x.size
    N = n - l + 1
    nc = n - L + 1
    K = L - l + 1
    r_lo = max(0, p_lo - K + 1)
    r_hi = min(p_hi - 1, nc - 1)
    bits = context_mask_rows(x, mu_L, sd_L, flat_L, L, eps, r_lo, r_hi)
    qt = np.empty(N)
    cand = np.empty(N, np.int64)
    lbsq = np.empty(N)
    for p in range(p_lo, p_hi):
        if p == p_lo:
            for q in range(N):
                qt[q] = _dot(x, p, q, l)
        else:
            a = x[p - 1]
            b = x[p + l - 1]
            for q in range(N - 1, 0, -1):
                qt[q] = qt[q - 1] - a * x[q - 1] + b * x[q + l - 1]
            qt[0] = _dot(x, p, 0, l)
        out_nn[p] = INF
        out_q[p] = -1
        out_i[p] = -1
        out_j[p] = -1
        out_calls[p] = 0
        out_cands[p] = 0
        if flat_l[p]:
            continue
        m = 0
        for q in range(N):
            if flat_l[q] or abs(p - q) <= L:
                continue
            cand[m] = q
            m += 1
        out_cands[p] = m
        if m == 0:
            continue
        mu_p = mu_l[p]
        sd_p = sd_l[p]
        if pruned:
            gp = sd_p / maxsd[p] if maxsd[p] > 0.0 else INF
            for k in range(m):
                q = cand[k]
                if maxsd[p] <= 0.0 or maxsd[q] <= 0.0:
                    lbsq[k] = INF
                    continue
                g = max(sd_l[q] / maxsd[q], gp)
                dl = target_delta(qt[q], l, mu_p, sd_p, mu_l[q], sd_l[q])
                if dl > 0.0:
                    lbsq[k] = g * g * (l * max(0.0, 1.0 - dl * dl))
                else:
                    lbsq[k] = g * g * l
            order = np.argsort(lbsq[:m], kind="mergesort")
        else:
            order = np.arange(m)
        nn = INF
        nq = -1
        ni = -1
        nj = -1
        calls = 0
        for k in range(m):
            idx = order[k]
            q = cand[idx]
            thr = INF
            if pruned:
                lb = lbsq[idx]
                if lb == INF:
                    break
                if nn <= lb - PRUNE_SLACK * max(1.0, lb):
                    break
                if nn < INF:
                    thr = nn + PRUNE_SLACK * max(1.0, nn)
            dl = target_delta(qt[q], l, mu_p, sd_p, mu_l[q], sd_l[q])
            val, bi, bj = pair_min(bits, r_lo, mu_l, sd_l, mu_L, sd_L, flat_L,
                                   p, q, dl, l, L, nc, thr)
            calls += 1
            if val < INF and (val < nn or (val == nn and q < nq)):
                nn = val
                nq = q
                ni = bi
                nj = bj
        out_nn[p] = nn
        out_q[p] = nq
        out_i[p] = ni
        out_j[p] = nj
        out_calls[p] = calls


@njit(cache=True, nogil=True)
def classic_chunk(x, mu, sd, flat, w, exclusion, p_lo, p_hi, out_nn, out_q):
    """z-normalised 1-NN distance of each window in ``[p_lo, p_hi)``.

    Neighbours must be non-flat and start more than ``exclusion`` apart.
    Ties go to the smallest neighbour start.
    """
    N = x.size - w + 1
    qt = np.empty(N)
    for p in range(p_lo, p_hi):
        if p == p_lo:
            for q in range(N):
                qt[q] = _dot(x, p, q, w)
        else:
            a = x[p - 1]
            b = x[p + w - 1]
            for q in range(N - 1, 0, -1):
                qt[q] = qt[q - 1] - a * x[q - 1] + b * x[q + w - 1]
            qt[0] = _dot(x, p, 0, w)
        best = INF
        bq = -1
        if not flat[p]:
            for q in range(N):
                if flat[q] or abs(p - q) <= exclusion:
                    continue
                dl = target_delta(qt[q], w, mu[p], sd[p], mu[q], sd[q])
                d2 = max(0.0, 2.0 * w * (1.0 - dl))
                if d2 < best:
                    best = d2
                    bq = q
        out_nn[p] = best
        out_q[p] = bq
