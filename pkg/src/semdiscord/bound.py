"""O(1) lower bound on the optimal context-aware distance of a target pair.

Relaxing the context of one target to a free mean and scale and minimising
analytically leaves a bound that depends only on the target correlation and on
the ratio of target std to the largest std among the other target's contexts::

    gamma = max(sigma_q / max_sigma_ctx[q], sigma_p / max_sigma_ctx[p])
    LB    = gamma * sqrt(l * (1 - delta**2))   if delta > 0
          = gamma * sqrt(l)                    otherwise

The context-similarity threshold and the non-overlap rule are dropped in the
relaxation, which can only lower the bound, so it stays valid for every
feasible context pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePairError
from .stats import MovingStats, QTRow, WindowedMaxStd


def lower_bound(p: int, q: int, delta: float, maxstd: WindowedMaxStd,
                stats_l: MovingStats) -> float:
    """Lower bound for the target pair ``(p, q)`` given their correlation.

    Raises
    ------
    InfeasiblePairError
        When every context of ``p`` or of ``q`` is flat; such a pair has no
        feasible context pair at all.
    """
    mp, mq = maxstd.max_sigma[p], maxstd.max_sigma[q]
    if mp <= 0.0 or mq <= 0.0:
        raise InfeasiblePairError(f"no non-flat context for target {p if mp <= 0 else q}")
    l = stats_l.window
    gamma = max(stats_l.sigma[q] / mq, stats_l.sigma[p] / mp)
    if delta > 0:
        return float(gamma * math.sqrt(l * max(0.0, 1.0 - delta * delta)))
    return float(gamma * math.sqrt(l))


@dataclass(frozen=True)
class LBRow:
    """Lower bounds of one target against every reference target.

    ``order`` lists reference starts by ascending bound, ties by start.
    Infeasible references carry ``inf`` and therefore sort last.
    """

    anchor: int
    lb: np.ndarray
    order: np.ndarray


def lb_row(p: int, qt: QTRow, stats_l: MovingStats, maxstd: WindowedMaxStd) -> LBRow:
    """Vectorised :func:`lower_bound` of target ``p`` against all references."""
    if qt.anchor != p:
        raise ValueError(f"QT row anchored at {qt.anchor}, not {p}")
    l = stats_l.window
    mu, sd = stats_l.mu, stats_l.sigma
    m = maxstd.max_sigma
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = (qt.qt - l * mu[p] * mu) / (l * sd[p] * sd)
        delta = np.clip(delta, -1.0, 1.0)
        gamma = np.maximum(sd / m, sd[p] / m[p])
    rad = np.where(delta > 0, l * np.maximum(0.0, 1.0 - delta * delta), float(l))
    lb = gamma * np.sqrt(rad)
    lb[(m <= 0.0) | (m[p] <= 0.0)] = np.inf
    # flat targets have no correlation; they are never candidates
    lb[stats_l.flat | stats_l.flat[p]] = np.inf
    lb.setflags(write=False)
    order = np.argsort(lb, kind="stable")
    order.setflags(write=False)
    return LBRow(p, lb, order)
