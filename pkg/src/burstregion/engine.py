"""Detector registry and the object-stream replay loop."""

from __future__ import annotations

from typing import Iterable, Iterator, Union

from .approx import GridDetector, MultiGridDetector
from .cellindex import CellDetector
from .model import BurstResult, Query, SpatialObject, TopKResult
from .oracle import Snapshot, brute_best, brute_topk
from .topk import TopKCellDetector, TopKGridDetector, TopKMultiGridDetector
from .window import Event, LiveSet, iter_events

ALGOS = ("ccs", "gaps", "mgaps", "kccs", "kgaps", "kmgaps", "oracle", "naive")


class OracleDetector:
    """Brute-force answer at every event (small replays only)."""

    def __init__(self, query: Query, k: int = 1):
        self.q = query
        self.k = k
        self.live = LiveSet()

    def update(self, e: Event) -> Union[BurstResult, TopKResult]:
        self.live.apply(e)
        s = Snapshot.from_live(self.live, e.due)
        if self.k == 1:
            return brute_best(s, self.q)
        return brute_topk(s, self.q, self.k)


def make_detector(algo: str, q: Query, bound_mode: str = "both"):
    if algo == "ccs":
        return CellDetector(q, bound_mode=bound_mode)
    if algo == "naive":
        return CellDetector(q, bound_mode="none")
    if algo == "gaps":
        return GridDetector(q)
    if algo == "mgaps":
        return MultiGridDetector(q)
    if algo == "kccs":
        return TopKCellDetector(q)
    if algo == "kgaps":
        return TopKGridDetector(q)
    if algo == "kmgaps":
        return TopKMultiGridDetector(q)
    if algo == "oracle":
        return OracleDetector(q, q.k)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")


def as_topk(r: Union[BurstResult, TopKResult]) -> TopKResult:
    return r if isinstance(r, TopKResult) else TopKResult(r.t, [r])


def replay(objects: Iterable[SpatialObject], q: Query, algo: str = "ccs",
           bound_mode: str = "both", flush: bool = False) -> Iterator[TopKResult]:
    """Results after every event of the stream, as top-k records."""
    det = make_detector(algo, q, bound_mode)
    for e in iter_events(objects, q, flush):
        yield as_topk(det.update(e))
