"""Replay timing: per-event latency, sweep triggers and scores per algorithm."""

from __future__ import annotations

import gc
import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .engine import as_topk, make_detector
from .model import Query, SpatialObject
from .sweepline import warm_up
from .window import Event, iter_events


@dataclass
class AlgoStats:
    algo: str
    events: int
    mean_us: float
    median_us: float
    p99_us: float
    events_per_s: float
    sweeps: Optional[int] = None
    triggered: Optional[int] = None
    trigger_ratio: Optional[float] = None
    final_scores: list[float] = field(default_factory=list)
    scores: Optional[list[float]] = None  # rank-1 score after every event, when kept


@dataclass
class BenchReport:
    query: dict
    n_objects: int
    n_events: int
    warmup: int
    algos: list[AlgoStats]

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        d = json.loads(text)
        d["algos"] = [AlgoStats(**a) for a in d["algos"]]
        return cls(**d)

    def by_algo(self, algo: str) -> AlgoStats:
        for a in self.algos:
            if a.algo == algo:
                return a
        raise KeyError(algo)

    def table(self) -> str:
        head = f"{'algo':<8} {'events':>9} {'mean us':>10} {'median us':>10} {'p99 us':>10} {'ev/s':>11} {'trigger':>8} {'score':>12}"
        rows = [head, "-" * len(head)]
        for a in self.algos:
            tr = "-" if a.trigger_ratio is None else f"{a.trigger_ratio:.4f}"
            sc = f"{a.final_scores[0]:.6g}" if a.final_scores else "-"
            rows.append(f"{a.algo:<8} {a.events:>9} {a.mean_us:>10.2f} {a.median_us:>10.2f} "
                        f"{a.p99_us:>10.2f} {a.events_per_s:>11.0f} {tr:>8} {sc:>12}")
        return "\n".join(rows)


BLOCK = 4096  # events per turn when several algorithms are timed together


def _query_dict(q: Query) -> dict:
    d = asdict(q)
    if q.area is not None:
        d["area"] = [q.area.x_min, q.area.y_min, q.area.x_max, q.area.y_max]
    return d


class _Timer:
    """One detector being replayed and timed, possibly a block at a time."""

    def __init__(self, algo: str, q: Query, bound_mode: str, n_events: int, warmup: int, keep_scores: bool):
        self.algo = algo
        self.det = make_detector(algo, q, bound_mode)
        self.warmup = warmup
        self.times = np.empty(max(n_events - warmup, 0), dtype=np.int64)
        self.scores = [] if keep_scores else None
        self.result = None
        self.sweeps0 = self.trig0 = 0

    def run(self, events: Sequence[Event], lo: int, hi: int) -> None:
        up = self.det.update
        clock = time.perf_counter_ns
        times, warmup, scores = self.times, self.warmup, self.scores
        r = self.result
        for idx in range(lo, hi):
            e = events[idx]
            if idx == warmup:
                self.sweeps0 = getattr(self.det, "sweeps", 0)
                self.trig0 = getattr(self.det, "triggered", 0)
            t0 = clock()
            r = up(e)
            t1 = clock()
            if idx >= warmup:
                times[idx - warmup] = t1 - t0
            if scores is not None:
                scores.append(as_topk(r).regions[0].score)
        self.result = r

    def stats(self) -> AlgoStats:
        times, det, r = self.times, self.det, self.result
        n = times.size
        mean = float(times.mean()) / 1e3 if n else 0.0
        st = AlgoStats(
            algo=self.algo,
            events=n,
            mean_us=mean,
            median_us=float(np.median(times)) / 1e3 if n else 0.0,
            p99_us=float(np.percentile(times, 99)) / 1e3 if n else 0.0,
            events_per_s=1e6 / mean if mean > 0 else 0.0,
            final_scores=as_topk(r).scores if r is not None else [],
            scores=self.scores,
        )
        if hasattr(det, "sweeps"):
            st.sweeps = det.sweeps - self.sweeps0
            st.triggered = det.triggered - self.trig0
            st.trigger_ratio = st.triggered / n if n else 0.0
        return st


def _timed(timers: Sequence[_Timer], events: Sequence[Event], block: int) -> None:
    warm_up()
    # like timeit: no cyclic collections inside the timed loop
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for lo in range(0, len(events), block):
            hi = min(lo + block, len(events))
            for t in timers:
                t.run(events, lo, hi)
    finally:
        if was_enabled:
            gc.enable()


def time_detector(algo: str, events: Sequence[Event], q: Query, bound_mode: str = "both",
                  warmup: int = 0, keep_scores: bool = False) -> AlgoStats:
    """Feed ``events`` to a fresh detector, timing each update after ``warmup``."""
    t = _Timer(algo, q, bound_mode, len(events), warmup, keep_scores)
    _timed([t], events, max(len(events), 1))
    return t.stats()


def run_bench(objects: Iterable[SpatialObject], q: Query, algos: Sequence[str],
              bound_mode: str = "both", warmup: int = 0, keep_scores: bool = False,
              block: int = BLOCK) -> BenchReport:
    """Time several algorithms on the same event list.

    Every detector replays the whole stream in order, but the algorithms
    take turns in blocks of ``block`` events, so slow drift in machine
    speed hits all of them alike.  ``warmup`` events are processed but not
    timed, so measurement can start once the windows are full.
    """
    objs = list(objects)
    events = list(iter_events(objs, q))
    timers = [_Timer(a, q, bound_mode, len(events), warmup, keep_scores) for a in algos]
    _timed(timers, events, block)
    return BenchReport(_query_dict(q), len(objs), len(events), warmup, [t.stats() for t in timers])


def mean_ratio(num: Sequence[float], den: Sequence[float]) -> float:
    """Mean of num/den over snapshots where den > 0."""
    vals = [a / b for a, b in zip(num, den) if b > 0]
    return statistics.fmean(vals) if vals else 1.0
