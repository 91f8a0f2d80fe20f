"""Semantic discord search.

A target of length ``l`` is compared with a reference target through pairs of
enclosing length-``L`` contexts. The optimal distance of a target pair is the
smallest context-aware distance over the feasible context pairs ``(i, j)``:
each context encloses its target, both are non-flat, they do not overlap
(``|i - j| > L``) and their z-normalised distance is below ``epsilon``. The
semantic discord is the target whose nearest non-overlapping reference
(``|p - q| > L``) is farthest away.

Three interchangeable algorithms produce the same report:

``"brute"``
    direct summation of every context-aware distance (slow; an oracle).
``"smart-brute"``
    every pair, with the O(1) closed-form distance over streamed inner products.
``"pruned"``
    references visited in ascending lower-bound order, stopping once the
    nearest distance found is below the next bound.

Library functions take 0-based positions. :class:`DiscordReport` carries
1-based starts, as do all records written by the command line tools.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import (CalibrationError, FlatWindowError, InvalidWindowError,
                     NoFeasibleTargetError)
from .stats import (FLAT_TOL, QT_REFRESH, MovingStats, WindowedMaxStd,
                    as_time_series, compute_moving_stats,
                    compute_window_max_std, context_range)

log = logging.getLogger(__name__)

ALGORITHMS = ("brute", "smart-brute", "pruned")

#: Relative margin on the strict ``d_ED < epsilon`` test; see :func:`similarity_cutoff`.
EPSILON_MARGIN = 1e-9


def default_target_len(context_len: int) -> int:
    """40% of the context length, rounded half up."""
    return max(1, int(math.floor(0.4 * context_len + 0.5)))


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of a semantic discord search.

    ``epsilon=None`` calibrates the context-similarity threshold from the
    series (see :func:`calibrate_epsilon`); ``math.inf`` disables it.
    """

    context_len: int
    target_len: int | None = None
    epsilon: float | None = None
    epsilon_percentile: float = 0.4
    epsilon_samples: int = 2000
    seed: int = 0
    algorithm: str = "pruned"
    threads: int = 1

    @property
    def l(self) -> int:
        return self.target_len if self.target_len is not None else default_target_len(self.context_len)

    @property
    def L(self) -> int:
        return self.context_len

    def validate(self, n: int) -> None:
        L, l = self.L, self.l
        if not 1 <= l <= L:
            raise InvalidWindowError(
                f"target length {l} must be in [1, context length {L}]")
        if L > n:
            raise InvalidWindowError(f"context length {L} exceeds series length {n}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; pick one of {ALGORITHMS}")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0 < self.epsilon_percentile <= 1:
            raise ValueError("epsilon_percentile must be in (0, 1]")
        if self.epsilon_samples < 1:
            raise ValueError("epsilon_samples must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass(frozen=True)
class DiscordReport:
    """The semantic discord and the pair that determines its distance.

    ``target``/``reference`` are 1-based starts of the discord target and of
    its nearest reference target; ``context``/``reference_context`` are the
    1-based starts of the contexts attaining ``distance``.
    """

    distance: float
    target: int
    reference: int
    context: int
    reference_context: int
    target_len: int
    context_len: int
    epsilon: float

    @property
    def target_interval(self) -> tuple[int, int]:
        return self.target, self.target + self.target_len - 1

    @property
    def reference_interval(self) -> tuple[int, int]:
        return self.reference, self.reference + self.target_len - 1

    @property
    def context_interval(self) -> tuple[int, int]:
        return self.context, self.context + self.context_len - 1

    @property
    def reference_context_interval(self) -> tuple[int, int]:
        return self.reference_context, self.reference_context + self.context_len - 1


@dataclass(frozen=True)
class SearchMetrics:
    """Work accounting of one search.

    ``candidate_pairs`` counts ordered (target, reference) pairs that are
    both non-flat and non-overlapping; ``distance_calls`` counts those whose
    optimal distance was actually evaluated.
    """

    algorithm: str
    candidate_pairs: int
    distance_calls: int
    lb_calls: int

    @property
    def pruned_pairs(self) -> int:
        return self.candidate_pairs - self.distance_calls

    @property
    def pruning_rate(self) -> float:
        if self.candidate_pairs == 0:
            return 0.0
        return self.pruned_pairs / self.candidate_pairs


@dataclass(frozen=True)
class NNProfile:
    """Per-target nearest neighbour under the optimal context-aware distance.

    Arrays are indexed by 0-based target start. Excluded targets (flat, or
    with no feasible context pair against any reference) have ``inf``
    distance and ``-1`` indices.
    """

    distance: np.ndarray
    reference: np.ndarray
    context: np.ndarray
    reference_context: np.ndarray
    epsilon: float
    metrics: SearchMetrics


@dataclass(frozen=True)
class Prepared:
    """Series centred on its mean plus every statistic a search needs."""

    x: np.ndarray
    context_len: int
    target_len: int
    stats_l: MovingStats
    stats_L: MovingStats
    maxstd: WindowedMaxStd

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def n_targets(self) -> int:
        return self.x.size - self.target_len + 1


def prepare(T, context_len: int, target_len: int) -> Prepared:
    """Validate ``T`` and precompute the sliding statistics of both lengths."""
    raw = as_time_series(T, min_length=1)
    if not 1 <= target_len <= context_len <= raw.size:
        raise InvalidWindowError(
            f"need 1 <= l <= L <= n, got l={target_len}, L={context_len}, n={raw.size}")
    x = raw - raw.mean()
    x.setflags(write=False)
    stats_l = compute_moving_stats(x, target_len)
    stats_L = stats_l if context_len == target_len else compute_moving_stats(x, context_len)
    maxstd = compute_window_max_std(stats_L.sigma, context_len, target_len)
    return Prepared(x, context_len, target_len, stats_l, stats_L, maxstd)


def is_self_match(p: int, q: int, L: int) -> bool:
    """Targets closer than or exactly ``L`` apart overlap as trivial matches."""
    return abs(p - q) <= L


def calibrate_epsilon(T, L: int, sample_count: int = 2000, percentile: float = 0.4,
                      seed: int = 0) -> float:
    """Context-similarity threshold from a sample of random context pairs.

    Draws ``sample_count`` unordered pairs of distinct non-flat context
    starts uniformly with ``numpy.random.default_rng(seed)``, takes their
    z-normalised distances and returns the nearest-rank ``percentile``
    quantile.

    Raises
    ------
    CalibrationError
        With fewer than two non-flat contexts.
    """
    x = as_time_series(T)
    if not 1 <= L <= x.size:
        raise InvalidWindowError(f"context length {L} outside [1, {x.size}]")
    if not 0 < percentile <= 1:
        raise ValueError("percentile must be in (0, 1]")
    x = x - x.mean()
    st = compute_moving_stats(x, L)
    valid = np.flatnonzero(~st.flat)
    m = valid.size
    if m < 2:
        raise CalibrationError(f"only {m} non-flat context(s) of length {L}")
    rng = np.random.default_rng(seed)
    a = rng.integers(0, m, size=sample_count)
    b = rng.integers(0, m - 1, size=sample_count)
    b = b + (b >= a)
    ia, ib = valid[a], valid[b]
    W = np.lib.stride_tricks.sliding_window_view(x, L)
    dots = np.einsum("ij,ij->i", W[ia], W[ib])
    rho = (dots - L * st.mu[ia] * st.mu[ib]) / (L * st.sigma[ia] * st.sigma[ib])
    d = np.sqrt(np.maximum(0.0, 2.0 * L * (1.0 - np.clip(rho, -1.0, 1.0))))
    d.sort()
    rank = max(1, math.ceil(percentile * sample_count - 1e-9))
    return float(d[rank - 1])


def resolve_epsilon(T, cfg: SearchConfig) -> float:
    """The configured threshold, calibrating it when none is given.

    Calibration needs two non-flat contexts; a series without them has no
    feasible target at all, so that failure surfaces as
    :class:`NoFeasibleTargetError`.
    """
    if cfg.epsilon is not None:
        return float(cfg.epsilon)
    try:
        return calibrate_epsilon(T, cfg.L, cfg.epsilon_samples, cfg.epsilon_percentile, cfg.seed)
    except CalibrationError as exc:
        raise NoFeasibleTargetError(str(exc)) from exc


def similarity_cutoff(epsilon: float) -> float:
    """Largest context distance treated as strictly below ``epsilon``.

    A calibrated threshold is itself the distance of a sampled context
    pair, so that pair sits exactly on the boundary. Different numerical
    routes to the same distance differ by rounding, and a bare ``<`` would
    include or exclude it depending on the route. Every feasibility test
    therefore compares against ``epsilon`` lowered by a relative margin of
    :data:`EPSILON_MARGIN`.

    >>> similarity_cutoff(float("inf"))
    inf
    """
    if math.isinf(epsilon):
        return epsilon
    return epsilon - EPSILON_MARGIN * max(1.0, epsilon)


def omega_pairs(T, p: int, q: int, L: int, l: int, epsilon: float = math.inf) -> list[tuple[int, int]]:
    """Enumerate the feasible context pairs of targets ``p`` and ``q``.

    Plain loops over raw windows; meant for checking, not for speed.
    """
    x = np.asarray(T, dtype=np.float64)
    n = x.size
    out = []
    cut = similarity_cutoff(epsilon)
    ilo, ihi = context_range(p, L, l, n)
    jlo, jhi = context_range(q, L, l, n)
    for i in range(ilo, ihi + 1):
        ci = x[i:i + L]
        if ci.std() < FLAT_TOL:
            continue
        for j in range(jlo, jhi + 1):
            cj = x[j:j + L]
            if cj.std() < FLAT_TOL or abs(i - j) <= L:
                continue
            if epsilon < math.inf and not _direct_znorm(ci, cj) < cut:
                continue
            out.append((i, j))
    return out


def _direct_znorm(a: np.ndarray, b: np.ndarray) -> float:
    za = (a - a.mean()) / a.std()
    zb = (b - b.mean()) / b.std()
    return math.sqrt(float(np.sum((za - zb) ** 2)))


def d_opt(T, p: int, q: int, context_len: int, target_len: int,
          epsilon: float = math.inf, prepared: Prepared | None = None):
    """Optimal context-aware distance of targets ``p`` and ``q`` (0-based).

    Returns ``(distance, (i, j))``, or ``(inf, None)`` when no context pair is
    feasible. Ties go to the smallest ``i``, then ``j``.
    """
    L, l = context_len, target_len
    prep = prepared if prepared is not None else prepare(T, L, l)
    if is_self_match(p, q, L):
        raise InvalidWindowError(f"targets {p} and {q} overlap (|p - q| <= {L})")
    sl, sL, x = prep.stats_l, prep.stats_L, prep.x
    if sl.flat[p] or sl.flat[q]:
        raise FlatWindowError("flat target")
    ilo, ihi = context_range(p, L, l, prep.n)
    jlo, jhi = context_range(q, L, l, prep.n)
    I = np.arange(ilo, ihi + 1)
    J = np.arange(jlo, jhi + 1)
    ok = (~sL.flat[I])[:, None] & (~sL.flat[J])[None, :]
    ok &= np.abs(I[:, None] - J[None, :]) > L
    if epsilon < math.inf:
        W = np.lib.stride_tricks.sliding_window_view(x, L)
        dots = W[I] @ W[J].T
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = (dots - L * np.outer(sL.mu[I], sL.mu[J])) / (L * np.outer(sL.sigma[I], sL.sigma[J]))
        cd = np.sqrt(np.maximum(0.0, 2.0 * L * (1.0 - np.clip(rho, -1.0, 1.0))))
        ok &= cd < similarity_cutoff(epsilon)
    if not ok.any():
        return math.inf, None
    qt = float(x[p:p + l] @ x[q:q + l])
    mu_i, sd_i = sL.mu[I][:, None], sL.sigma[I][:, None]
    mu_j, sd_j = sL.mu[J][None, :], sL.sigma[J][None, :]
    mu_p, sd_p, mu_q, sd_q = sl.mu[p], sl.sigma[p], sl.mu[q], sl.sigma[q]
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = (l / sd_i ** 2 * (sd_p ** 2 + (mu_p - mu_i) ** 2)
              - 2 * l / (sd_i * sd_j) * (qt / l - mu_i * mu_q - mu_j * mu_p + mu_i * mu_j)
              + l / sd_j ** 2 * (sd_q ** 2 + (mu_q - mu_j) ** 2))
    d2 = np.where(ok, np.maximum(d2, 0.0), np.inf)
    k = int(np.argmin(d2))
    a, b = divmod(k, J.size)
    return math.sqrt(float(d2[a, b])), (int(I[a]), int(J[b]))


def _chunks(n_targets: int) -> list[tuple[int, int]]:
    # fixed partition: each chunk restarts its streamed rows from direct dot
    # products, so results do not depend on how chunks map to workers
    return [(a, min(a + QT_REFRESH, n_targets)) for a in range(0, n_targets, QT_REFRESH)]


def _kernel_profile(prep: Prepared, eps: float, pruned: bool, threads: int):
    N = prep.n_targets
    nn = np.empty(N)
    oq = np.empty(N, np.int64)
    oi = np.empty(N, np.int64)
    oj = np.empty(N, np.int64)
    calls = np.empty(N, np.int64)
    cands = np.empty(N, np.int64)
    sl, sL = prep.stats_l, prep.stats_L

    def run(chunk):
        lo, hi = chunk
        _kernels.search_chunk(prep.x, sl.mu, sl.sigma, sl.flat, sL.mu, sL.sigma, sL.flat,
                              prep.maxstd.max_sigma, prep.target_len, prep.context_len,
                              similarity_cutoff(eps), lo, hi, pruned, nn, oq, oi, oj,
                              calls, cands)

    chunks = _chunks(N)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, chunks))
    else:
        for c in chunks:
            run(c)
    return nn, oq, oi, oj, int(calls.sum()), int(cands.sum())


def _plain_profile(prep: Prepared, eps: float):
    """Every pair by literal summation over raw windows."""
    x, L, l = prep.x, prep.context_len, prep.target_len
    n, N = prep.n, prep.n_targets
    C = np.lib.stride_tricks.sliding_window_view(x, L)
    Tw = np.lib.stride_tricks.sliding_window_view(x, l)
    cm, cs = C.mean(axis=1), C.std(axis=1)
    cflat = cs < FLAT_TOL
    tflat = Tw.std(axis=1) < FLAT_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        Z = (C - cm[:, None]) / cs[:, None]
    nc = C.shape[0]
    idx = np.arange(nc)
    cut = similarity_cutoff(eps)
    cmask = np.zeros((nc, nc), bool)
    for i in range(nc):
        if cflat[i]:
            continue
        row = ~cflat & (np.abs(idx - i) > L)
        if eps < math.inf:
            with np.errstate(invalid="ignore"):
                row &= np.sqrt(np.sum((Z[i] - Z) ** 2, axis=1)) < cut
        cmask[i] = row

    nn = np.full(N, np.inf)
    oq = np.full(N, -1, np.int64)
    oi = np.full(N, -1, np.int64)
    oj = np.full(N, -1, np.int64)
    ncand = 0
    for p in range(N):
        if tflat[p]:
            continue
        I = np.arange(*_incl(context_range(p, L, l, n)))
        A = (Tw[p][None, :] - cm[I][:, None]) / np.where(cflat[I], 1.0, cs[I])[:, None]
        for q in range(N):
            if tflat[q] or is_self_match(p, q, L):
                continue
            ncand += 1
            J = np.arange(*_incl(context_range(q, L, l, n)))
            B = (Tw[q][None, :] - cm[J][:, None]) / np.where(cflat[J], 1.0, cs[J])[:, None]
            ok = cmask[np.ix_(I, J)]
            if not ok.any():
                continue
            D2 = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=-1)
            D2 = np.where(ok, D2, np.inf)
            k = int(np.argmin(D2))
            a, b = divmod(k, J.size)
            d = D2[a, b]
            if d < nn[p]:
                nn[p], oq[p], oi[p], oj[p] = d, q, I[a], J[b]
    return nn, oq, oi, oj, ncand, ncand


def _incl(r: tuple[int, int]) -> tuple[int, int]:
    return r[0], r[1] + 1


def _profile(T, cfg: SearchConfig) -> NNProfile:
    x = as_time_series(T)
    cfg.validate(x.size)
    eps = resolve_epsilon(x, cfg)
    prep = prepare(x, cfg.L, cfg.l)
    log.debug("searching n=%d L=%d l=%d eps=%.6g with %s", x.size, cfg.L, cfg.l, eps, cfg.algorithm)
    if cfg.algorithm == "brute":
        nn, oq, oi, oj, calls, cands = _plain_profile(prep, eps)
    else:
        nn, oq, oi, oj, calls, cands = _kernel_profile(
            prep, eps, cfg.algorithm == "pruned", cfg.threads)
    metrics = SearchMetrics(cfg.algorithm, cands, calls,
                            cands if cfg.algorithm == "pruned" else 0)
    return NNProfile(np.sqrt(nn), oq, oi, oj, eps, metrics)


def semantic_profile(T, cfg: SearchConfig) -> NNProfile:
    """Nearest-neighbour distance of every target, by ``cfg.algorithm``."""
    return _profile(T, cfg)


def _report(prof: NNProfile, cfg: SearchConfig) -> DiscordReport:
    d = prof.distance
    finite = np.isfinite(d)
    if not finite.any():
        raise NoFeasibleTargetError("no target has a feasible reference")
    p = int(np.argmax(np.where(finite, d, -np.inf)))
    return DiscordReport(
        distance=float(d[p]),
        target=p + 1,
        reference=int(prof.reference[p]) + 1,
        context=int(prof.context[p]) + 1,
        reference_context=int(prof.reference_context[p]) + 1,
        target_len=cfg.l,
        context_len=cfg.L,
        epsilon=prof.epsilon,
    )


def search(T, cfg: SearchConfig) -> tuple[DiscordReport, SearchMetrics]:
    """Find the semantic discord of ``T`` with the algorithm named in ``cfg``.

    Raises
    ------
    NoFeasibleTargetError
        When every target is flat or has an empty feasible set against all
        references.
    """
    prof = _profile(T, cfg)
    return _report(prof, cfg), prof.metrics


def brute_force_search(T, cfg: SearchConfig, smart: bool = True):
    """Exhaustive search; ``smart=False`` uses literal distance summation."""
    algo = "smart-brute" if smart else "brute"
    return search(T, _with_algorithm(cfg, algo))


def pruned_search(T, cfg: SearchConfig):
    """Lower-bound pruned exact search."""
    return search(T, _with_algorithm(cfg, "pruned"))


def _with_algorithm(cfg: SearchConfig, algorithm: str) -> SearchConfig:
    return replace(cfg, algorithm=algorithm)


def candidate_pair_count(T, context_len: int, target_len: int) -> int:
    """Number of ordered non-flat, non-overlapping target pairs.

    This is the number of optimal-distance evaluations brute force makes.
    Without flat targets it equals ``(N - L - 1)(N - L)`` for
    ``N = n - l + 1`` targets.
    """
    x = as_time_series(T)
    flat = compute_moving_stats(x - x.mean(), target_len).flat
    good = np.flatnonzero(~flat)
    if good.size == 0:
        return 0
    # for each good p, good q with |p - q| > L
    pos = np.searchsorted
    total = 0
    for p in good:
        lo = pos(good, p - context_len, side="left")
        hi = pos(good, p + context_len, side="right")
        total += good.size - (hi - lo)
    return int(total)


def classic_profile(T, w: int, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """z-normalised 1-NN distance of every length-``w`` window.

    Neighbours must start more than ``w`` apart. Flat windows get ``inf`` and
    index ``-1``. Returns ``(distance, neighbour)`` indexed by 0-based start.
    """
    x = as_time_series(T)
    if not 1 <= w <= x.size:
        raise InvalidWindowError(f"window length {w} outside [1, {x.size}]")
    x = x - x.mean()
    x.setflags(write=False)
    st = compute_moving_stats(x, w)
    N = x.size - w + 1
    nn = np.empty(N)
    oq = np.empty(N, np.int64)

    def run(chunk):
        _kernels.classic_chunk(x, st.mu, st.sigma, st.flat, w, w, chunk[0], chunk[1], nn, oq)

    chunks = _chunks(N)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, chunks))
    else:
        for c in chunks:
            run(c)
    return np.sqrt(nn), oq


def classic_discord(T, w: int) -> tuple[int, float]:
    """Classic discord: the window with the largest z-normalised 1-NN distance.

    Returns ``(start, distance)`` with a 1-based start, like
    :class:`DiscordReport`.

    Raises
    ------
    NoFeasibleTargetError
        When no window has a non-flat, non-overlapping neighbour.
    """
    d, _ = classic_profile(T, w)
    finite = np.isfinite(d)
    if not finite.any():
        raise NoFeasibleTargetError("every window is flat or lacks a non-self match")
    p = int(np.argmax(np.where(finite, d, -np.inf)))
    return p + 1, float(d[p])


__all__ = [
    "ALGORITHMS", "DiscordReport", "NNProfile", "Prepared",
    "SearchConfig", "SearchMetrics", "brute_force_search", "calibrate_epsilon",
    "candidate_pair_count", "classic_discord", "classic_profile", "d_opt",
    "default_target_len", "is_self_match", "omega_pairs", "prepare",
    "similarity_cutoff",
    "pruned_search", "resolve_epsilon", "search", "semantic_profile",
]
