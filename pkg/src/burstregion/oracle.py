"""Brute-force reference answers computed from the live object set.

Nothing here looks at detector state.  The best point is found by direct
coverage counting over every piece of the rectangle arrangement: in each
axis the candidate coordinates are all rectangle edges plus the midpoints
between consecutive edges.  With closed rectangles those pieces realise
every distinct covering set, so the maximum over them is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import (TOL, BurstResult, Query, SpatialObject, TopKResult, empty_result,
                    point_result, window_of)
from .window import LiveSet

MAX_OBJECTS = 5000


class OracleGuardError(RuntimeError):
    """The snapshot is too large for cubic brute force."""


@dataclass
class Snapshot:
    now: float
    objects: list[SpatialObject]
    is_current: list[bool] = field(default_factory=list)

    @classmethod
    def at(cls, objects: Sequence[SpatialObject], now: float, q: Query) -> "Snapshot":
        """Tag ``objects`` by the half-open window rule at ``now``."""
        live, tags = [], []
        for o in objects:
            if q.area is not None and not q.area.contains(o.x, o.y):
                continue
            win = window_of(o.t_c, now, q)
            if win is not None:
                live.append(o)
                tags.append(win == "current")
        return cls(now, live, tags)

    @classmethod
    def from_live(cls, live: LiveSet, now: float) -> "Snapshot":
        objs, tags = [], []
        for g in live.rects.values():
            objs.append(SpatialObject(g.id, g.w, g.x, g.y, g.t_c))
            tags.append(g.id in live.current)
        return cls(now, objs, tags)


def _axis_candidates(lo: np.ndarray, hi: np.ndarray, bounds: Optional[tuple[float, float]]) -> np.ndarray:
    vals = np.concatenate((lo, hi))
    if bounds is not None:
        vals = np.concatenate((vals, bounds))
        vals = vals[(vals >= bounds[0]) & (vals <= bounds[1])]
    vals = np.unique(vals)
    mids = 0.5 * (vals[:-1] + vals[1:])
    return np.concatenate((vals, mids))


def _arrays(s: Snapshot, q: Query, keep: Optional[np.ndarray] = None):
    n = len(s.objects)
    x = np.fromiter((o.x for o in s.objects), float, n)
    y = np.fromiter((o.y for o in s.objects), float, n)
    w = np.fromiter((o.w for o in s.objects), float, n)
    cur = np.asarray(s.is_current, dtype=bool)
    if keep is not None:
        x, y, w, cur = x[keep], y[keep], w[keep], cur[keep]
    return x, y, x + q.width, y + q.height, w, cur


def _best(x0, y0, x1, y1, w, cur, q: Query):
    """(px, py, score) maximising the burst score, or None with no rectangles."""
    n = x0.size
    if n == 0:
        return None
    if n > MAX_OBJECTS:
        raise OracleGuardError(f"{n} live objects exceed the brute-force cap of {MAX_OBJECTS}")
    dom = q.domain
    cx = _axis_candidates(x0, x1, None if dom is None else (dom.x_min, dom.x_max))
    cy = _axis_candidates(y0, y1, None if dom is None else (dom.y_min, dom.y_max))
    X = (x0[:, None] <= cx[None, :]) & (cx[None, :] <= x1[:, None])
    Y = (y0[:, None] <= cy[None, :]) & (cy[None, :] <= y1[:, None])
    wc = np.where(cur, w, 0.0)
    wp = np.where(cur, 0.0, w)
    Xf = X.astype(np.float64)
    c = Xf.T @ (Y * wc[:, None])
    p = Xf.T @ (Y * wp[:, None])
    fc = c / q.wc
    sc = q.alpha * np.maximum(fc - p / q.wp, 0.0) + (1.0 - q.alpha) * fc
    i, j = np.unravel_index(int(np.argmax(sc)), sc.shape)
    return float(cx[i]), float(cy[j]), float(sc[i, j])


def brute_best(s: Snapshot, q: Query) -> BurstResult:
    hit = _best(*_arrays(s, q), q)
    if hit is None:
        return empty_result(q, s.now)
    return point_result(hit[0], hit[1], hit[2], q, s.now)


def covered(s: Snapshot, q: Query, px: float, py: float) -> np.ndarray:
    """Mask of snapshot objects whose rectangle covers ``(px, py)``."""
    x0, y0, x1, y1, _, _ = _arrays(s, q)
    return (x0 <= px) & (px <= x1) & (y0 <= py) & (py <= y1)


def residual_score(s: Snapshot, q: Query, keep: np.ndarray, px: float, py: float) -> float:
    x0, y0, x1, y1, w, cur = _arrays(s, q, keep)
    m = (x0 <= px) & (px <= x1) & (y0 <= py) & (py <= y1)
    fc = w[m & cur].sum() / q.wc
    fp = w[m & ~cur].sum() / q.wp
    return q.alpha * max(fc - fp, 0.0) + (1.0 - q.alpha) * fc


def brute_topk(s: Snapshot, q: Query, k: int,
               prefer: Optional[Sequence[BurstResult]] = None) -> TopKResult:
    """Greedy top-k: best region, drop the objects it holds, repeat.

    Equal-score regions are a genuine ambiguity of the greedy definition.
    When ``prefer`` is given (e.g. a detector's answer) its rank-i region is
    taken whenever it is a valid rank-i choice, so a correct detector and
    the oracle follow the same branch; a wrong pick falls back to the
    oracle's own argmax and the score vectors then differ.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    keep = np.ones(len(s.objects), dtype=bool)
    out: list[BurstResult] = []
    for i in range(k):
        hit = _best(*_arrays(s, q, keep), q)
        if hit is None or hit[2] <= TOL:
            out.append(empty_result(q, s.now, i + 1))
            continue
        px, py, score = hit
        if prefer is not None and i < len(prefer) and prefer[i].placed and prefer[i].point is not None:
            ax, ay = prefer[i].point
            alt = residual_score(s, q, keep, ax, ay)
            if alt >= score - TOL:
                px, py, score = ax, ay, alt
        out.append(point_result(px, py, score, q, s.now, i + 1))
        keep &= ~covered(s, q, px, py)
    return TopKResult(s.now, out)


def region_score(s: Snapshot, q: Query, x_min: float, y_min: float, x_max: float, y_max: float) -> float:
    """Burst score of an arbitrary box computed from the objects inside it."""
    x, y, w, cur = (np.fromiter((o.x for o in s.objects), float, len(s.objects)),
                    np.fromiter((o.y for o in s.objects), float, len(s.objects)),
                    np.fromiter((o.w for o in s.objects), float, len(s.objects)),
                    np.asarray(s.is_current, dtype=bool))
    m = (x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max)
    fc = w[m & cur].sum() / q.wc
    fp = w[m & ~cur].sum() / q.wp
    return q.alpha * max(fc - fp, 0.0) + (1.0 - q.alpha) * fc


def naive_detector(q: Query):
    """Baseline: re-sweep every cell an event touches, no bounds, no caching."""
    from .cellindex import CellDetector

    return CellDetector(q, bound_mode="none")
