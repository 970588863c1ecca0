"""Continuous detection of bursty regions over a stream of weighted points."""

from .approx import GridAggregate, GridDetector, MultiGridDetector
from .bench import BenchReport, run_bench
from .cellindex import CellDetector
from .engine import ALGOS, make_detector, replay
from .generate import GenConfig, default_query, default_workload, generate
from .model import (Box, BurstResult, Query, RectObject, ScorePair, SpatialObject, TopKResult,
                    burst_score, region_from_point, to_rectangle, window_score)
from .oracle import OracleGuardError, Snapshot, brute_best, brute_topk, naive_detector
from .stream import emit_result, parse_stream, write_stream
from .sweepline import point_score, sweep_best_point
from .topk import TopKCellDetector, TopKGridDetector, TopKMultiGridDetector
from .window import Event, EventKind, EventScheduler, StreamOrderError, iter_events

__all__ = [
    "ALGOS", "BenchReport", "Box", "BurstResult", "CellDetector", "Event", "EventKind",
    "EventScheduler", "GenConfig", "GridAggregate", "GridDetector", "MultiGridDetector",
    "OracleGuardError", "Query", "RectObject", "ScorePair", "Snapshot", "SpatialObject",
    "StreamOrderError", "TopKCellDetector", "TopKGridDetector", "TopKMultiGridDetector",
    "TopKResult", "brute_best", "brute_topk", "burst_score", "default_query",
    "default_workload", "emit_result", "generate", "iter_events", "make_detector",
    "naive_detector", "parse_stream", "point_score", "region_from_point", "replay",
    "run_bench", "sweep_best_point", "to_rectangle", "window_score", "write_stream",
]
