"""Labelled benchmark series and the overlap score used to grade detections.

Three generators are provided:

* :func:`generate_concat_series` concatenates instances of one class with a
  single instance of another (for classification archives in UCR text form);
* :func:`generate_bump_series` builds near-periodic cycles with one small
  local bump whose self-normalised shape equals the normal pattern;
* :func:`random_walk` for scaling experiments.

Ground-truth intervals are 1-based and inclusive.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GenerationError, InvalidSeriesError, MetricError
from .stats import as_time_series


@dataclass(frozen=True)
class LabeledSeries:
    """A series with one planted anomaly at ``[truth_start, truth_end]`` (1-based)."""

    series: np.ndarray
    truth_start: int
    truth_end: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.series)
        if not 1 <= self.truth_start <= self.truth_end <= n:
            raise GenerationError(
                f"truth interval [{self.truth_start}, {self.truth_end}] outside [1, {n}]")

    @property
    def truth(self) -> tuple[int, int]:
        return self.truth_start, self.truth_end

    def save(self, csv_path) -> tuple[Path, Path]:
        """Write values (one per line) to ``csv_path`` and metadata beside it.

        The sidecar has the same stem with a ``.json`` suffix. Values are
        written in shortest round-trip form, so reloading is lossless.
        """
        csv_path = Path(csv_path)
        meta_path = csv_path.with_suffix(".json")
        csv_path.write_text("".join(f"{float(v)!r}\n" for v in self.series))
        record = {"truth_start": self.truth_start, "truth_end": self.truth_end,
                  "length": len(self.series), "series_file": csv_path.name,
                  **self.metadata}
        meta_path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
        return csv_path, meta_path

    @classmethod
    def load(cls, csv_path) -> "LabeledSeries":
        csv_path = Path(csv_path)
        meta = json.loads(csv_path.with_suffix(".json").read_text())
        values = read_series_csv(csv_path)
        start, end = meta.pop("truth_start"), meta.pop("truth_end")
        for k in ("length", "series_file"):
            meta.pop(k, None)
        return cls(values, start, end, meta)


def read_series_csv(path) -> np.ndarray:
    """Read a single-column CSV of reals (blank lines ignored).

    A first line that does not parse as a number is taken as a header.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if lines:
        try:
            float(lines[0].split(",")[0])
        except ValueError:
            lines = lines[1:]
    try:
        values = [float(ln.split(",")[0]) for ln in lines]
    except ValueError as exc:
        raise InvalidSeriesError(f"{path}: {exc}") from None
    return as_time_series(values)


@dataclass(frozen=True)
class InstancePool:
    """Variable-length instances with class labels, e.g. one UCR data file."""

    instances: tuple
    labels: tuple
    source: str | None = None

    def __post_init__(self):
        if len(self.instances) != len(self.labels):
            raise GenerationError("instances and labels differ in length")
        for k, inst in enumerate(self.instances):
            if len(inst) < 2 or not np.all(np.isfinite(inst)):
                raise GenerationError(f"instance {k} is shorter than 2 or not finite")

    def __len__(self) -> int:
        return len(self.instances)

    @classmethod
    def from_file(cls, path) -> "InstancePool":
        """Parse a UCR-style text file: one instance per line, label first.

        Fields may be separated by commas or whitespace. Trailing NaN fields
        (padding of variable-length instances) are dropped.
        """
        instances, labels = [], []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            fields = line.replace(",", " ").split()
            try:
                vals = np.array([float(f) for f in fields[1:]])
            except ValueError:
                raise GenerationError(f"{path}:{lineno}: non-numeric value") from None
            keep = len(vals)
            while keep and math.isnan(vals[keep - 1]):
                keep -= 1
            vals = vals[:keep]
            if vals.size < 2 or not np.all(np.isfinite(vals)):
                raise GenerationError(f"{path}:{lineno}: instance too short or not finite")
            instances.append(vals)
            labels.append(_label(fields[0]))
        if not instances:
            raise GenerationError(f"{path}: no instances")
        return cls(tuple(instances), tuple(labels), str(path))

    def with_label(self, label) -> "InstancePool":
        keep = [k for k, lab in enumerate(self.labels) if lab == label]
        return self._subset(keep)

    def without_label(self, label) -> "InstancePool":
        keep = [k for k, lab in enumerate(self.labels) if lab != label]
        return self._subset(keep)

    def _subset(self, keep) -> "InstancePool":
        return InstancePool(tuple(self.instances[k] for k in keep),
                            tuple(self.labels[k] for k in keep), self.source)


def _label(s: str):
    v = float(s)
    return int(v) if v.is_integer() else v


def generate_concat_series(normal: InstancePool, anomaly: InstancePool,
                           normal_count: int = 20, seed: int = 0) -> LabeledSeries:
    """Concatenate ``normal_count`` normal instances and one anomalous instance.

    Normal instances are drawn with replacement; the anomalous one is placed
    in a uniformly chosen slot between them (before the first through after
    the last). All draws come from ``numpy.random.default_rng(seed)``.
    """
    if len(normal) == 0 and normal_count > 0:
        raise GenerationError("empty normal pool")
    if len(anomaly) == 0:
        raise GenerationError("empty anomaly pool")
    if normal_count < 0:
        raise GenerationError("normal_count must be >= 0")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(normal), size=normal_count) if normal_count else np.empty(0, int)
    a = int(rng.integers(0, len(anomaly)))
    slot = int(rng.integers(0, normal_count + 1))
    parts = [normal.instances[k] for k in picks]
    start = sum(len(x) for x in parts[:slot])
    parts.insert(slot, anomaly.instances[a])
    series = np.concatenate(parts).astype(np.float64)
    meta = {"generator": "concat", "seed": seed, "normal_count": normal_count,
            "anomaly_slot": slot, "normal_picks": [int(k) for k in picks],
            "anomaly_pick": a}
    if normal.source:
        meta["normal_source"] = normal.source
    if anomaly.source:
        meta["anomaly_source"] = anomaly.source
    return LabeledSeries(series, start + 1, start + len(anomaly.instances[a]), meta)


def _hump(width: int) -> np.ndarray:
    # raised cosine, zero at both ends
    return np.sin(np.pi * (np.arange(width) + 0.5) / width) ** 2


def generate_bump_series(cycles: int = 20, cycle_len: int = 80, bump_width: int | None = None,
                         bump_height: float = 0.25, pattern_offset: float = 0.1,
                         bump_offset: float = 0.55, noise: float = 0.01,
                         amplitude_jitter: float = 0.02, seed: int = 0) -> LabeledSeries:
    """Near-periodic cycles with one small local bump.

    Every cycle holds one raised-cosine hump of height about 1 at
    ``pattern_offset * cycle_len``. One extra cycle, inserted at a seeded
    position among the ``cycles`` normal ones (never first or last), also
    carries a hump of the same width scaled to ``bump_height`` at
    ``bump_offset * cycle_len``. Self-normalised, the small hump looks exactly
    like the normal one; against its surrounding cycle it does not.
    Cycle amplitudes are jittered by ``amplitude_jitter`` and white noise of
    std ``noise`` is added everywhere.

    The truth interval covers the small hump. With ``bump_height=0`` the
    series is anomaly-free and the metadata carries ``negative_control``.
    """
    width = bump_width if bump_width is not None else max(2, round(0.4 * cycle_len))
    if not 2 <= width < cycle_len:
        raise GenerationError(f"bump width {width} must be in [2, cycle_len)")
    if cycles < 2:
        raise GenerationError("need at least two normal cycles")
    a0 = int(round(pattern_offset * cycle_len))
    b0 = int(round(bump_offset * cycle_len))
    if a0 < 0 or a0 + width > cycle_len or b0 < 0 or b0 + width > cycle_len:
        raise GenerationError("pattern or bump does not fit inside a cycle")
    if a0 < b0 + width and b0 < a0 + width:
        raise GenerationError("pattern and bump overlap")
    rng = np.random.default_rng(seed)
    hump = _hump(width)
    base = np.zeros(cycle_len)
    base[a0:a0 + width] = hump
    total = cycles + 1
    slot = int(rng.integers(1, total - 1))
    amps = 1.0 + amplitude_jitter * rng.standard_normal(total)
    series = np.concatenate([a * base for a in amps])
    start = slot * cycle_len + b0
    series[start:start + width] += amps[slot] * bump_height * hump
    series += noise * rng.standard_normal(series.size)
    meta = {"generator": "bump", "seed": seed, "cycles": cycles, "cycle_len": cycle_len,
            "bump_width": width, "bump_height": bump_height, "noise": noise,
            "amplitude_jitter": amplitude_jitter, "anomaly_cycle": slot,
            "negative_control": bump_height == 0}
    return LabeledSeries(series, start + 1, start + width, meta)


def random_walk(n: int, seed: int = 0) -> np.ndarray:
    """Cumulative sum of ``n`` standard normal steps from ``default_rng(seed)``."""
    if n < 1:
        raise GenerationError("random walk length must be >= 1")
    return np.cumsum(np.random.default_rng(seed).standard_normal(n))


def overlapping_rate(detected, truth) -> float:
    """``|detected & truth| / |detected|`` for inclusive integer intervals.

    >>> overlapping_rate((100, 199), (150, 249))
    0.5
    """
    d0, d1 = int(detected[0]), int(detected[1])
    t0, t1 = int(truth[0]), int(truth[1])
    if d1 < d0:
        raise MetricError(f"empty detected interval [{d0}, {d1}]")
    if t1 < t0:
        raise MetricError(f"empty truth interval [{t0}, {t1}]")
    inter = max(0, min(d1, t1) - max(d0, t0) + 1)
    return inter / (d1 - d0 + 1)


@dataclass(frozen=True)
class ProtocolResult:
    """Overlapping rates of each detector over a batch of generated series."""

    context_len: int
    target_len: int
    seeds: tuple
    semantic: tuple
    classic_target: tuple
    classic_context: tuple

    def means(self) -> dict:
        return {"semantic": float(np.mean(self.semantic)),
                "classic_target": float(np.mean(self.classic_target)),
                "classic_context": float(np.mean(self.classic_context))}


def run_concat_protocol(normal: InstancePool, anomaly: InstancePool, count: int = 20,
                        seed: int = 0, context_len: int | None = None,
                        normal_count: int = 20, threads: int = 1) -> ProtocolResult:
    """Generate ``count`` concatenated series and score three detectors on each.

    The context length defaults to the median instance length of the normal
    pool and the target length to 40% of it. Semantic discord is compared
    with the classic discord at both lengths. Per-series seeds are derived
    from ``seed`` through ``numpy.random.SeedSequence``.
    """
    # imported here: the search module is heavy and generators do not need it
    from .discord import SearchConfig, classic_discord, search

    if count < 1:
        raise GenerationError("count must be positive")
    L = context_len or int(np.median([len(x) for x in normal.instances]))
    cfg = SearchConfig(L, threads=threads)
    l = cfg.l
    seeds = tuple(int(s) for s in np.random.SeedSequence(seed).generate_state(count))
    sem, ct, cc = [], [], []
    for s in seeds:
        ls = generate_concat_series(normal, anomaly, normal_count, seed=s)
        rep, _ = search(ls.series, SearchConfig(L, seed=s, threads=threads))
        sem.append(overlapping_rate(rep.target_interval, ls.truth))
        for w, out in ((l, ct), (L, cc)):
            start, _ = classic_discord(ls.series, w)
            out.append(overlapping_rate((start, start + w - 1), ls.truth))
    return ProtocolResult(L, l, seeds, tuple(sem), tuple(ct), tuple(cc))
