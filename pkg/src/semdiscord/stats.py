"""Sliding-window statistics and streaming inner products.

Everything here is batch precomputation over a fixed series: per-window means
and population standard deviations, the running maximum of context standard
deviations seen by each target, and rows of the target inner-product matrix
``QT[p, q] = sum(t[p:p+l] * t[q:q+l])`` advanced one anchor at a time.

Positions are 0-based array indices throughout this module.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSeriesError, InvalidWindowError

#: Standard deviations below this are treated as exactly zero ("flat" window).
FLAT_TOL = 1e-12

#: A streamed QT row is recomputed from scratch at every multiple of this anchor.
QT_REFRESH = 4096

#: Block size (float64 elements) for the windowed passes in compute_moving_stats.
_BLOCK_ELEMENTS = 1 << 21


def as_time_series(values, min_length: int = 1) -> np.ndarray:
    """Validate ``values`` as a univariate series and return a float64 copy.

    Raises
    ------
    InvalidSeriesError
        If the input is not one-dimensional, shorter than ``min_length`` or
        contains NaN/Inf.
    """
    x = np.array(values, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidSeriesError(f"expected a 1-D series, got shape {x.shape}")
    if x.size < min_length:
        raise InvalidSeriesError(
            f"series has {x.size} points, at least {min_length} required")
    if not np.all(np.isfinite(x)):
        raise InvalidSeriesError("series contains NaN or infinite values")
    x.setflags(write=False)
    return x


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MovingStats:
    """Mean and population standard deviation of every length-``window`` window.

    ``flat[k]`` marks windows whose standard deviation is below
    :data:`FLAT_TOL`; their ``sigma`` is stored as exactly 0.
    """

    window: int
    mu: np.ndarray
    sigma: np.ndarray
    flat: np.ndarray

    def __len__(self) -> int:
        return self.mu.size


def compute_moving_stats(T, w: int) -> MovingStats:
    """Sliding mean and population std of ``T`` for window length ``w``.

    Two passes per window (mean, then mean squared deviation), evaluated in
    blocks of windows so memory stays bounded. Running-sum formulas are
    cheaper but lose about half the significant digits of sigma on
    near-constant windows. Exactly constant windows are detected separately
    so that they come out flat regardless of rounding.

    Examples
    --------
    >>> s = compute_moving_stats([1.0, 2.0, 3.0], 3)
    >>> float(s.mu[0]), round(float(s.sigma[0]) ** 2, 12)
    (2.0, 0.666666666667)
    """
    x = np.asarray(T, dtype=np.float64)
    n = x.size
    if not 1 <= w <= n:
        raise InvalidWindowError(f"window length {w} outside [1, {n}]")
    W = np.lib.stride_tricks.sliding_window_view(x, w)
    nw = n - w + 1
    m = np.empty(nw)
    sigma = np.empty(nw)
    step = max(1, _BLOCK_ELEMENTS // w)
    for a in range(0, nw, step):
        blk = W[a:a + step]
        mb = blk.mean(axis=1)
        m[a:a + step] = mb
        sigma[a:a + step] = np.sqrt(((blk - mb[:, None]) ** 2).mean(axis=1))

    # exact constancy: no value change inside the window
    changes = np.concatenate(([0], np.cumsum(x[1:] != x[:-1])))
    constant = (changes[w - 1:] - changes[: n - w + 1]) == 0
    flat = constant | (sigma < FLAT_TOL)
    sigma[flat] = 0.0
    m[constant] = x[: n - w + 1][constant]
    return MovingStats(w, _frozen(m), _frozen(sigma), _frozen(flat))


@dataclass(frozen=True)
class WindowedMaxStd:
    """For every target start ``q``, the largest context std among its contexts.

    The contexts of target ``q`` start in ``[q - (L - l), q]`` clipped to the
    valid context starts. A value of 0 means every context of that target is
    flat.
    """

    context_len: int
    target_len: int
    max_sigma: np.ndarray

    def __getitem__(self, q):
        return self.max_sigma[q]


def context_range(q: int, context_len: int, target_len: int, n: int) -> tuple[int, int]:
    """Inclusive range of context starts that enclose the target starting at ``q``."""
    return max(0, q - context_len + target_len), min(q, n - context_len)


def compute_window_max_std(sigma_L, context_len: int, target_len: int) -> WindowedMaxStd:
    """Sliding maximum of context standard deviations, one value per target.

    Uses a monotonic deque of context indices, so the whole array costs O(n).
    """
    sig = np.asarray(sigma_L, dtype=np.float64)
    L, l = context_len, target_len
    if not 1 <= l <= L:
        raise InvalidWindowError(f"need 1 <= target_len <= context_len, got {l}, {L}")
    n_ctx = sig.size
    n_targets = n_ctx + L - l
    out = np.empty(n_targets)
    dq: deque[int] = deque()
    nxt = 0
    for q in range(n_targets):
        lo, hi = max(0, q - (L - l)), min(q, n_ctx - 1)
        while nxt <= hi:
            while dq and sig[dq[-1]] <= sig[nxt]:
                dq.pop()
            dq.append(nxt)
            nxt += 1
        while dq[0] < lo:
            dq.popleft()
        out[q] = sig[dq[0]]
    return WindowedMaxStd(L, l, _frozen(out))


@dataclass(frozen=True)
class QTRow:
    """Inner products of the target at ``anchor`` with every length-``l`` window."""

    anchor: int
    qt: np.ndarray


def _windows(x: np.ndarray, l: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(x, l)


def _direct_row(x: np.ndarray, p: int, l: int) -> np.ndarray:
    return _windows(x, l) @ x[p:p + l]


def qt_first_row(T, l: int) -> QTRow:
    """QT row for anchor 0 by direct dot products."""
    x = np.asarray(T, dtype=np.float64)
    if not 1 <= l <= x.size:
        raise InvalidWindowError(f"target length {l} outside [1, {x.size}]")
    return QTRow(0, _frozen(_direct_row(x, 0, l)))


def qt_next_row(prev: QTRow, T, l: int) -> QTRow:
    """Advance a QT row from anchor ``p - 1`` to anchor ``p``.

    ``qt[q] = prev[q-1] - t[p-1] t[q-1] + t[p+l-1] t[q+l-1]`` for ``q >= 1``;
    ``qt[0]`` is a direct dot product. Anchors that are multiples of
    :data:`QT_REFRESH` are recomputed directly to stop rounding drift.
    """
    x = np.asarray(T, dtype=np.float64)
    p = prev.anchor + 1
    if p > x.size - l:
        raise InvalidWindowError(f"anchor {p} has no length-{l} window")
    if p % QT_REFRESH == 0:
        return QTRow(p, _frozen(_direct_row(x, p, l)))
    old = prev.qt
    qt = np.empty_like(old)
    qt[1:] = old[:-1] - x[p - 1] * x[:x.size - l] + x[p + l - 1] * x[l:]
    qt[0] = x[:l] @ x[p:p + l]
    return QTRow(p, _frozen(qt))
