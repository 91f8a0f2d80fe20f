"""Distances between subsequences.

Two families live here. :func:`z_norm_dist` is the classic distance where each
window is normalised by its own mean and standard deviation. The
context-aware distance normalises a length-``l`` *target* by the mean and
standard deviation of an enclosing length-``L`` *context* instead; it comes in
a literal O(l) summation (:func:`context_aware_dist_direct`, kept as an oracle)
and an O(1) closed form driven by one target inner product
(:func:`context_aware_dist_fast`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FlatWindowError, InvalidWindowError
from .stats import FLAT_TOL, MovingStats, QTRow


@dataclass(frozen=True)
class DistanceInputs:
    """Target starts ``p, q`` with context starts ``i, j`` (0-based).

    Context ``i`` must enclose target ``p`` (``p - L + l <= i <= p``) and
    context ``j`` must enclose ``q``.
    """

    p: int
    q: int
    i: int
    j: int
    l: int
    L: int

    def check(self, n: int) -> None:
        l, L = self.l, self.L
        if not 1 <= l <= L <= n:
            raise InvalidWindowError(f"need 1 <= l <= L <= n, got l={l}, L={L}, n={n}")
        for t, c in ((self.p, self.i), (self.q, self.j)):
            if not (0 <= t <= n - l and 0 <= c <= n - L):
                raise InvalidWindowError(f"start {t} or {c} out of range")
            if not t - L + l <= c <= t:
                raise InvalidWindowError(f"context {c} does not enclose target {t}")


def znorm_from_dot(dot: float, w: int, mu_a: float, sd_a: float,
                   mu_b: float, sd_b: float) -> float:
    """z-normalised distance from a window dot product and the window stats."""
    rho = (dot - w * mu_a * mu_b) / (w * sd_a * sd_b)
    rho = min(1.0, max(-1.0, rho))
    return math.sqrt(max(0.0, 2.0 * w * (1.0 - rho)))


def z_norm_dist(a, b) -> float:
    """z-normalised Euclidean distance between two equal-length windows.

    Summed directly over the normalised values. This equals
    ``sqrt(2 w (1 - r))`` for Pearson correlation ``r`` (see
    :func:`znorm_from_dot`), but does not lose accuracy as ``r`` nears 1.

    Examples
    --------
    >>> z_norm_dist([1, 2, 3], [4, 5, 6])
    0.0
    >>> round(z_norm_dist([1, 2, 3], [3, 2, 1]), 6)
    3.464102
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidWindowError("windows must be 1-D and of equal length")
    sa, sb = a.std(), b.std()
    if sa < FLAT_TOL or sb < FLAT_TOL:
        raise FlatWindowError("z-normalisation of a flat window")
    za = (a - a.mean()) / sa
    zb = (b - b.mean()) / sb
    return math.sqrt(float(np.sum((za - zb) ** 2)))


def context_aware_dist_direct(T, d: DistanceInputs) -> float:
    """Literal summation of the context-aware distance.

    The context means and standard deviations are recomputed from the raw
    windows, so this shares nothing with the fast path.
    """
    x = np.asarray(T, dtype=np.float64)
    d.check(x.size)
    ci, cj = x[d.i:d.i + d.L], x[d.j:d.j + d.L]
    si, sj = ci.std(), cj.std()
    if si < FLAT_TOL or sj < FLAT_TOL:
        raise FlatWindowError("flat context")
    a = (x[d.p:d.p + d.l] - ci.mean()) / si
    b = (x[d.q:d.q + d.l] - cj.mean()) / sj
    return math.sqrt(float(np.sum((a - b) ** 2)))


def context_aware_dist_fast(qt, d: DistanceInputs, stats_l: MovingStats,
                            stats_L: MovingStats) -> float:
    """Context-aware distance from means, standard deviations and ``QT[p, q]``.

    ``qt`` is either the scalar inner product of the two targets or a
    :class:`QTRow` anchored at ``d.p``.
    """
    if isinstance(qt, QTRow):
        if qt.anchor != d.p:
            raise InvalidWindowError(f"QT row anchored at {qt.anchor}, not {d.p}")
        qt = qt.qt[d.q]
    l = d.l
    mu_p, sd_p = stats_l.mu[d.p], stats_l.sigma[d.p]
    mu_q, sd_q = stats_l.mu[d.q], stats_l.sigma[d.q]
    mu_i, sd_i = stats_L.mu[d.i], stats_L.sigma[d.i]
    mu_j, sd_j = stats_L.mu[d.j], stats_L.sigma[d.j]
    if sd_i < FLAT_TOL or sd_j < FLAT_TOL:
        raise FlatWindowError("flat context")
    d2 = (l / sd_i ** 2 * (sd_p ** 2 + (mu_p - mu_i) ** 2)
          - 2 * l / (sd_i * sd_j) * (qt / l - mu_i * mu_q - mu_j * mu_p + mu_i * mu_j)
          + l / sd_j ** 2 * (sd_q ** 2 + (mu_q - mu_j) ** 2))
    return math.sqrt(max(0.0, float(d2)))


def correlation(p: int, q: int, qt, stats_l: MovingStats) -> float:
    """Pearson correlation of targets ``p`` and ``q`` from their inner product."""
    if isinstance(qt, QTRow):
        if qt.anchor != p:
            raise InvalidWindowError(f"QT row anchored at {qt.anchor}, not {p}")
        qt = qt.qt[q]
    l = stats_l.window
    sp, sq = stats_l.sigma[p], stats_l.sigma[q]
    if sp < FLAT_TOL or sq < FLAT_TOL:
        raise FlatWindowError("correlation with a flat target")
    r = (qt - l * stats_l.mu[p] * stats_l.mu[q]) / (l * sp * sq)
    return min(1.0, max(-1.0, float(r)))
