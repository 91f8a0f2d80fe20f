"""Command line interface: ``semdiscord {detect,generate,evaluate,bench}``.

Exit codes: 0 on success, 2 for unusable input or arguments, 3 when the
search finds no feasible target.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .errors import NoFeasibleTargetError, SemDiscordError
from .harness import (InstancePool, LabeledSeries, generate_bump_series,
                      generate_concat_series, overlapping_rate, random_walk,
                      read_series_csv)
from .discord import ALGORITHMS, SearchConfig, candidate_pair_count, search

log = logging.getLogger("semdiscord")

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


@dataclass(frozen=True)
class DetectionRecord:
    """Machine-readable outcome of one detection run.

    Intervals are 1-based and inclusive. ``epsilon`` is ``None`` when the
    context-similarity threshold was disabled. ``wall_time`` is only filled
    when timing was requested, so that default records are reproducible byte
    for byte.
    """

    algorithm: str
    context_len: int
    target_len: int
    epsilon: float | None
    distance: float
    target_interval: tuple[int, int]
    context_interval: tuple[int, int]
    reference_interval: tuple[int, int]
    reference_context_interval: tuple[int, int]
    candidate_pairs: int
    distance_calls: int
    lb_calls: int
    pruning_rate: float
    wall_time: float | None = None
    input: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionRecord":
        d = dict(d)
        for k in ("target_interval", "context_interval", "reference_interval",
                  "reference_context_interval"):
            d[k] = tuple(d[k])
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "DetectionRecord":
        return cls.from_dict(json.loads(text))


def detect(values, cfg: SearchConfig, timing: bool = False,
           source: str | None = None) -> DetectionRecord:
    """Run a search and package the result as a :class:`DetectionRecord`."""
    t0 = time.perf_counter()
    rep, met = search(values, cfg)
    elapsed = time.perf_counter() - t0
    return DetectionRecord(
        algorithm=cfg.algorithm,
        context_len=rep.context_len,
        target_len=rep.target_len,
        epsilon=rep.epsilon if math.isfinite(rep.epsilon) else None,
        distance=rep.distance,
        target_interval=rep.target_interval,
        context_interval=rep.context_interval,
        reference_interval=rep.reference_interval,
        reference_context_interval=rep.reference_context_interval,
        candidate_pairs=met.candidate_pairs,
        distance_calls=met.distance_calls,
        lb_calls=met.lb_calls,
        pruning_rate=met.pruning_rate,
        wall_time=elapsed if timing else None,
        input=source,
    )


def _config(args) -> SearchConfig:
    return SearchConfig(
        context_len=args.context_len,
        target_len=args.target_len,
        epsilon=args.epsilon,
        epsilon_percentile=args.epsilon_percentile,
        epsilon_samples=args.epsilon_samples,
        seed=args.seed,
        algorithm=args.algorithm,
        threads=args.threads,
    )


def _read_input(path) -> np.ndarray:
    try:
        return read_series_csv(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_detect(args) -> int:
    values = _read_input(args.input)
    cfg = _config(args)
    cfg.validate(values.size)
    rec = detect(values, cfg, timing=args.timing, source=str(args.input))
    text = rec.to_json()
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    return 0


def _derived_seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def cmd_generate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = _derived_seeds(args.seed, args.count)
    if args.generator == "concat":
        try:
            pool = InstancePool.from_file(args.pool)
            extra = InstancePool.from_file(args.anomaly_pool) if args.anomaly_pool else None
        except OSError as exc:
            raise UsageError(f"cannot read pool: {exc}") from None
    for k, s in enumerate(seeds):
        if args.generator == "bump":
            ls = generate_bump_series(cycles=args.cycles, cycle_len=args.cycle_len,
                                      bump_width=args.bump_width, bump_height=args.bump_height,
                                      noise=args.noise, seed=s)
        elif args.generator == "randomwalk":
            values = random_walk(args.length, seed=s)
            # no planted anomaly; the whole series is recorded as truth
            ls = LabeledSeries(values, 1, values.size, {"generator": "randomwalk", "seed": s})
        else:
            ls = _concat_one(pool, extra, args, s)
        ls.save(out / f"series_{k:03d}.csv")
    print(f"wrote {args.count} {args.generator} series to {out}")
    return 0


def _concat_one(pool: InstancePool, extra, args, seed: int) -> LabeledSeries:
    labels = sorted(set(pool.labels), key=str)
    if args.normal_label is not None:
        normal_label = type(labels[0])(args.normal_label) if labels else args.normal_label
        if normal_label not in labels:
            raise UsageError(f"label {args.normal_label} not in pool")
    else:
        if len(labels) < 2 and extra is None:
            raise UsageError("pool needs at least two classes")
        normal_label = labels[int(np.random.default_rng(seed).integers(len(labels)))]
    normal = pool.with_label(normal_label)
    anomaly = extra if extra is not None else pool.without_label(normal_label)
    if len(anomaly) == 0:
        raise UsageError("no anomaly instances available")
    ls = generate_concat_series(normal, anomaly, args.normal_count, seed=seed)
    return LabeledSeries(ls.series, ls.truth_start, ls.truth_end,
                         {**ls.metadata, "normal_label": normal_label})


def _truth_of(path) -> tuple[int, int]:
    p = Path(path)
    meta = json.loads((p if p.suffix == ".json" else p.with_suffix(".json")).read_text())
    return int(meta["truth_start"]), int(meta["truth_end"])


def cmd_evaluate(args) -> int:
    dets, truths = args.detections or [], args.truth or []
    if not dets:
        raise UsageError("no detections given")
    if len(dets) != len(truths):
        raise UsageError(f"{len(dets)} detection files but {len(truths)} truth files")
    rows = []
    try:
        for d, t in zip(dets, truths):
            rec = DetectionRecord.from_json(Path(d).read_text())
            truth = _truth_of(t)
            rows.append({"detection": str(d), "truth_file": str(t),
                         "detected": list(rec.target_interval), "truth": list(truth),
                         "overlapping_rate": overlapping_rate(rec.target_interval, truth)})
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read detection or truth file: {exc}") from None
    mean = float(np.mean([r["overlapping_rate"] for r in rows]))
    width = max(len(r["detection"]) for r in rows)
    print(f"{'detection':<{width}}  {'detected':>13}  {'truth':>13}  overlap")
    for r in rows:
        print(f"{r['detection']:<{width}}  {_iv(r['detected']):>13}  {_iv(r['truth']):>13}  "
              f"{r['overlapping_rate']:.4f}")
    print(f"mean overlapping rate over {len(rows)} series: {mean:.4f}")
    if args.output:
        Path(args.output).write_text(json.dumps(
            {"series": rows, "mean_overlapping_rate": mean, "count": len(rows)},
            indent=2, sort_keys=True) + "\n")
    return 0


def _iv(iv) -> str:
    return f"[{iv[0]},{iv[1]}]"


def bench(values, sizes, cfg: SearchConfig, algorithms, brute_cutoff: int,
          timing: bool = True) -> list[dict]:
    """Distance-call counts per prefix size and algorithm.

    Brute-force variants above ``brute_cutoff`` points are not run; their
    call count is the exact candidate pair count, flagged ``analytic``.
    """
    rows = []
    for n in sizes:
        prefix = np.asarray(values[:n])
        if prefix.size < n:
            raise UsageError(f"input has {len(values)} points, size {n} requested")
        pairs = candidate_pair_count(prefix, cfg.L, cfg.l)
        for algo in algorithms:
            if algo != "pruned" and n > brute_cutoff:
                rows.append({"size": n, "algorithm": algo, "distance_calls": pairs,
                             "candidate_pairs": pairs, "pruning_rate": 0.0,
                             "call_ratio": 1.0, "wall_time": None, "analytic": True})
                continue
            rec = detect(prefix, _replace_algo(cfg, algo), timing=timing)
            rows.append({"size": n, "algorithm": algo, "distance_calls": rec.distance_calls,
                         "candidate_pairs": rec.candidate_pairs,
                         "pruning_rate": rec.pruning_rate,
                         "call_ratio": rec.candidate_pairs / max(rec.distance_calls, 1),
                         "wall_time": rec.wall_time, "analytic": False})
            log.info("size %d %s: %d calls", n, algo, rec.distance_calls)
    return rows


def _replace_algo(cfg: SearchConfig, algo: str) -> SearchConfig:
    return replace(cfg, algorithm=algo)


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes needs positive integers")
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad:
        raise UsageError(f"unknown algorithm(s) {bad}")
    if args.input:
        values = _read_input(args.input)
    else:
        values = random_walk(max(sizes), seed=args.seed)
    cfg = _config(argparse.Namespace(**{**vars(args), "algorithm": "pruned"}))
    rows = bench(values, sizes, cfg, algorithms, args.brute_cutoff, timing=not args.no_timing)
    print(f"{'size':>7}  {'algorithm':<12} {'distance_calls':>15} {'pruning_rate':>12} "
          f"{'call_ratio':>10} {'wall_time':>10}")
    for r in rows:
        wt = "analytic" if r["analytic"] else ("-" if r["wall_time"] is None else f"{r['wall_time']:.2f}s")
        print(f"{r['size']:>7}  {r['algorithm']:<12} {r['distance_calls']:>15} "
              f"{r['pruning_rate']:>12.5f} {r['call_ratio']:>10.1f} {wt:>10}")
    if args.output:
        Path(args.output).write_text(json.dumps(
            {"context_len": cfg.L, "target_len": cfg.l, "rows": rows}, indent=2) + "\n")
    return 0


def _add_search_flags(p: argparse.ArgumentParser, context_default=None) -> None:
    p.add_argument("--context-len", "-L", type=int, required=context_default is None,
                   default=context_default, help="context window length L")
    p.add_argument("--target-len", "-l", type=int, default=None,
                   help="target length l (default: round(0.4 L))")
    eps = p.add_mutually_exclusive_group()
    eps.add_argument("--epsilon", type=float, default=None,
                     help="fixed context-similarity threshold ('inf' disables it)")
    eps.add_argument("--epsilon-percentile", type=float, default=0.4,
                     help="calibrate the threshold at this quantile (default 0.4)")
    p.add_argument("--epsilon-samples", type=int, default=2000,
                   help="random context pairs drawn for calibration")
    p.add_argument("--seed", type=int, default=0, help="seed for numpy.random.default_rng")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the search")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semdiscord", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="find the semantic discord of a series")
    p.add_argument("--input", required=True, help="CSV with one value per line")
    _add_search_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="pruned")
    p.add_argument("--output", help="also write the JSON record here")
    p.add_argument("--timing", action="store_true", help="record wall time")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("generate", help="write labelled synthetic series")
    p.add_argument("generator", choices=("concat", "bump", "randomwalk"))
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--pool", help="UCR-style instance file (concat)")
    p.add_argument("--anomaly-pool", help="separate file for anomalous instances (concat)")
    p.add_argument("--normal-label", help="class used for normal instances (concat)")
    p.add_argument("--normal-count", type=int, default=20)
    p.add_argument("--cycles", type=int, default=20)
    p.add_argument("--cycle-len", type=int, default=80)
    p.add_argument("--bump-width", type=int, default=None)
    p.add_argument("--bump-height", type=float, default=0.25)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--length", type=int, default=1000, help="random walk length")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="overlapping rate of detections against truth")
    p.add_argument("--detections", nargs="*", help="DetectionRecord JSON files")
    p.add_argument("--truth", nargs="*", help="series CSVs or their JSON sidecars")
    p.add_argument("--output", help="write the summary as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="distance calls of pruned vs brute force search")
    p.add_argument("--input", help="CSV series; prefixes are benchmarked")
    p.add_argument("--generator", choices=("randomwalk",), default="randomwalk")
    p.add_argument("--sizes", default="2000,4000,8000,16000")
    _add_search_flags(p, context_default=400)
    p.set_defaults(target_len=160)
    p.add_argument("--algorithms", default="pruned,smart-brute")
    p.add_argument("--brute-cutoff", type=int, default=1000,
                   help="above this size brute-force counts are computed, not run")
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--output", help="write the table as JSON")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NoFeasibleTargetError as exc:
        print(f"semdiscord: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, SemDiscordError, ValueError) as exc:
        print(f"semdiscord: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
