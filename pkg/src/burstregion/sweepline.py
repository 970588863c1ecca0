"""Exact best point of a set of closed rectangles inside a search box.

The sweep line moves top-down.  Its x-axis is cut at every vertical edge
into *pieces*: the breakpoints themselves (index ``2t``) and the open
intervals between consecutive breakpoints (index ``2t + 1``).  With closed
rectangles a breakpoint can be covered by strictly more rectangles than
either neighbouring interval, so both kinds of piece are tracked.  In y the
same happens: each stop is evaluated once on the line itself (after top
edges are inserted) and once for the open strip below it (after bottom
edges are removed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from numba import njit

from .model import Box, Query, RectObject, ScorePair, window_of

# (x0, y0, x1, y1, current weight, past weight)
Item = tuple[float, float, float, float, float, float]


class SweepHit(NamedTuple):
    x: float
    y: float
    cur: float  # raw weight sums of the covering set
    past: float
    score: float


@dataclass
class _Prepared:
    xs: np.ndarray  # sorted distinct x breakpoints
    rep_x: np.ndarray  # representative x of every piece
    lo: np.ndarray  # first piece covered by each rectangle
    hi: np.ndarray  # one past the last piece
    y0: np.ndarray
    y1: np.ndarray
    cw: np.ndarray
    pw: np.ndarray


def _prepare(items: Sequence[Item], box: Box) -> Optional[_Prepared]:
    if not items:
        return None
    arr = np.asarray(items, dtype=np.float64)
    x0 = np.maximum(arr[:, 0], box.x_min)
    y0 = np.maximum(arr[:, 1], box.y_min)
    x1 = np.minimum(arr[:, 2], box.x_max)
    y1 = np.minimum(arr[:, 3], box.y_max)
    keep = (x0 <= x1) & (y0 <= y1)
    if not keep.all():
        if not keep.any():
            return None
        x0, y0, x1, y1, arr = x0[keep], y0[keep], x1[keep], y1[keep], arr[keep]
    xs = np.unique(np.concatenate((x0, x1, (box.x_min, box.x_max))))
    rep_x = np.empty(2 * xs.size - 1)
    rep_x[0::2] = xs
    rep_x[1::2] = 0.5 * (xs[:-1] + xs[1:])
    lo = 2 * np.searchsorted(xs, x0)
    hi = 2 * np.searchsorted(xs, x1) + 1
    return _Prepared(xs, rep_x, lo, hi, y0, y1, arr[:, 4].copy(), arr[:, 5].copy())


def _scores(cur: np.ndarray, past: np.ndarray, alpha: float, wc: float, wp: float) -> np.ndarray:
    fc = cur / wc
    return alpha * np.maximum(fc - past / wp, 0.0) + (1.0 - alpha) * fc


class SweepTrace:
    """Observer hooks for :func:`sweep_items`; used by the invariant tests."""

    def edge(self, y: float, is_top: bool, xs: np.ndarray, cur: np.ndarray,
             past: np.ndarray, cached: np.ndarray) -> None:  # pragma: no cover - interface
        pass


def _sweep_rows(P: _Prepared, alpha: float, wc: float, wp: float,
                trace: Optional[SweepTrace]) -> SweepHit:
    """Edge-by-edge sweep keeping per-piece sums and a cached score."""
    n_pieces = P.rep_x.size
    cur = np.zeros(n_pieces)
    past = np.zeros(n_pieces)
    cached = np.zeros(n_pieces)

    stops = np.unique(np.concatenate((P.y0, P.y1)))[::-1]
    top_order = np.argsort(-P.y1, kind="stable")
    bot_order = np.argsort(-P.y0, kind="stable")
    ti = bi = 0
    n = P.y0.size
    best = -1.0
    hit = None
    for s, y in enumerate(stops):
        # top edges first: the line y itself is covered by everything touching it
        span_lo, span_hi = n_pieces, 0
        while ti < n and P.y1[top_order[ti]] == y:
            r = top_order[ti]
            lo, hi = P.lo[r], P.hi[r]
            cur[lo:hi] += P.cw[r]
            past[lo:hi] += P.pw[r]
            cached[lo:hi] = _scores(cur[lo:hi], past[lo:hi], alpha, wc, wp)
            if trace is not None:
                trace.edge(y, True, P.xs, cur, past, cached)
            span_lo, span_hi = min(span_lo, lo), max(span_hi, hi)
            ti += 1
        if span_hi > span_lo:
            j = span_lo + int(np.argmax(cached[span_lo:span_hi]))
            if cached[j] > best:
                best = cached[j]
                hit = (P.rep_x[j], y, cur[j], past[j])
        span_lo, span_hi = n_pieces, 0
        while bi < n and P.y0[bot_order[bi]] == y:
            r = bot_order[bi]
            lo, hi = P.lo[r], P.hi[r]
            cur[lo:hi] -= P.cw[r]
            past[lo:hi] -= P.pw[r]
            cached[lo:hi] = _scores(cur[lo:hi], past[lo:hi], alpha, wc, wp)
            if trace is not None:
                trace.edge(y, False, P.xs, cur, past, cached)
            span_lo, span_hi = min(span_lo, lo), max(span_hi, hi)
            bi += 1
        if span_hi > span_lo and s + 1 < stops.size:
            j = span_lo + int(np.argmax(cached[span_lo:span_hi]))
            if cached[j] > best:
                best = cached[j]
                hit = (P.rep_x[j], 0.5 * (y + stops[s + 1]), cur[j], past[j])
    x, y, c, p = hit
    return SweepHit(float(x), float(y), float(c), float(p), float(best))


@njit(cache=True)
def _sweep_kernel(x0, y0, x1, y1, cw, pw, bx0, by0, bx1, by1, alpha, wc, wp):
    """Compiled twin of :func:`_sweep_rows`; returns (x, y, cur, past, score).

    ``score`` is -1 when no rectangle touches the box.
    """
    n = x0.size
    cx0 = np.empty(n)
    cy0 = np.empty(n)
    cx1 = np.empty(n)
    cy1 = np.empty(n)
    ccw = np.empty(n)
    cpw = np.empty(n)
    m = 0
    for r in range(n):
        a = max(x0[r], bx0)
        b = min(x1[r], bx1)
        c = max(y0[r], by0)
        d = min(y1[r], by1)
        if a <= b and c <= d:
            cx0[m] = a
            cx1[m] = b
            cy0[m] = c
            cy1[m] = d
            ccw[m] = cw[r]
            cpw[m] = pw[r]
            m += 1
    if m == 0:
        return 0.0, 0.0, 0.0, 0.0, -1.0
    allx = np.empty(2 * m + 2)
    allx[:m] = cx0[:m]
    allx[m:2 * m] = cx1[:m]
    allx[2 * m] = bx0
    allx[2 * m + 1] = bx1
    xs = np.unique(allx)
    n_pieces = 2 * xs.size - 1
    lo = 2 * np.searchsorted(xs, cx0[:m])
    hi = 2 * np.searchsorted(xs, cx1[:m]) + 1
    top_order = np.argsort(-cy1[:m])
    bot_order = np.argsort(-cy0[:m])
    cur = np.zeros(n_pieces)
    past = np.zeros(n_pieces)
    a1 = 1.0 - alpha
    best = -1.0
    hj = 0
    hy = 0.0
    hc = 0.0
    hp = 0.0
    ti = 0
    bi = 0
    while ti < m or bi < m:
        y = -np.inf
        if ti < m:
            y = cy1[top_order[ti]]
        if bi < m and cy0[bot_order[bi]] > y:
            y = cy0[bot_order[bi]]
        slo = n_pieces
        shi = 0
        while ti < m and cy1[top_order[ti]] == y:
            r = top_order[ti]
            for j in range(lo[r], hi[r]):
                cur[j] += ccw[r]
                past[j] += cpw[r]
            slo = min(slo, lo[r])
            shi = max(shi, hi[r])
            ti += 1
        for j in range(slo, shi):
            fc = cur[j] / wc
            d = fc - past[j] / wp
            s = alpha * d + a1 * fc if d > 0.0 else a1 * fc
            if s > best:
                best = s
                hj = j
                hy = y
                hc = cur[j]
                hp = past[j]
        slo = n_pieces
        shi = 0
        while bi < m and cy0[bot_order[bi]] == y:
            r = bot_order[bi]
            for j in range(lo[r], hi[r]):
                cur[j] -= ccw[r]
                past[j] -= cpw[r]
            slo = min(slo, lo[r])
            shi = max(shi, hi[r])
            bi += 1
        if shi > slo and (ti < m or bi < m):
            ny = -np.inf
            if ti < m:
                ny = cy1[top_order[ti]]
            if bi < m and cy0[bot_order[bi]] > ny:
                ny = cy0[bot_order[bi]]
            for j in range(slo, shi):
                fc = cur[j] / wc
                d = fc - past[j] / wp
                s = alpha * d + a1 * fc if d > 0.0 else a1 * fc
                if s > best:
                    best = s
                    hj = j
                    hy = 0.5 * (y + ny)
                    hc = cur[j]
                    hp = past[j]
    if hj % 2 == 0:
        hx = xs[hj // 2]
    else:
        hx = 0.5 * (xs[hj // 2] + xs[hj // 2 + 1])
    return hx, hy, hc, hp, best


def sweep_items(items: Sequence[Item], box: Box, alpha: float, wc: float, wp: float,
                trace: Optional[SweepTrace] = None, compiled: bool = True) -> Optional[SweepHit]:
    """Best point of ``box`` under the closed rectangles ``items``.

    Returns ``None`` when no rectangle touches the box.  Ties go to the first
    maximal piece in sweep order: top to bottom, and left to right among the
    pieces updated at one stop.  ``compiled=False`` (or a trace) runs the
    numpy edge-by-edge version, which gives identical answers.
    """
    if trace is not None or not compiled:
        P = _prepare(items, box)
        if P is None:
            return None
        return _sweep_rows(P, alpha, wc, wp, trace)
    if not items:
        return None
    arr = np.asarray(items, dtype=np.float64)
    return sweep_arrays(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], arr[:, 5],
                        box, alpha, wc, wp)


def sweep_arrays(x0: np.ndarray, y0: np.ndarray, x1: np.ndarray, y1: np.ndarray,
                 cw: np.ndarray, pw: np.ndarray, box: Box, alpha: float, wc: float, wp: float
                 ) -> Optional[SweepHit]:
    """Compiled sweep over column arrays (the detectors' hot path)."""
    x, y, c, p, s = _sweep_kernel(x0, y0, x1, y1, cw, pw, box.x_min, box.y_min,
                                  box.x_max, box.y_max, alpha, wc, wp)
    if s < 0.0:
        return None
    return SweepHit(x, y, c, p, s)


def warm_up() -> None:
    """Compile (or load from cache) the sweep kernel so timing excludes it."""
    one = np.ones(1)
    _sweep_kernel(0 * one, 0 * one, one, one, one, 0 * one, 0.0, 0.0, 1.0, 1.0, 0.5, 1.0, 1.0)


def _items_at(rects: Iterable[RectObject], q: Query, now: float) -> list[Item]:
    items = []
    for g in rects:
        win = window_of(g.t_c, now, q)
        if win == "current":
            items.append((g.x, g.y, g.x1, g.y1, g.w, 0.0))
        elif win == "past":
            items.append((g.x, g.y, g.x1, g.y1, 0.0, g.w))
    return items


def search_box(q: Query, box: Optional[Box], rects: Sequence[RectObject]) -> Optional[Box]:
    """Intersect ``box`` (or the rectangles' hull) with the query's valid domain."""
    if box is None:
        if not rects:
            return None
        box = Box(min(g.x for g in rects), min(g.y for g in rects),
                  max(g.x1 for g in rects), max(g.y1 for g in rects))
    dom = q.domain
    if dom is None:
        return box
    out = Box(max(box.x_min, dom.x_min), max(box.y_min, dom.y_min),
              min(box.x_max, dom.x_max), min(box.y_max, dom.y_max))
    if out.x_min > out.x_max or out.y_min > out.y_max:
        return None
    return out


def sweep_best_point(rects: Sequence[RectObject], q: Query, box: Optional[Box], now: float
                     ) -> Optional[tuple[tuple[float, float], ScorePair, float]]:
    """Best point among ``rects`` at time ``now``, restricted to ``box``.

    Window membership comes from each rectangle's creation time; rectangles
    outside both windows are ignored.  ``box=None`` searches the whole plane
    (clamped to the valid domain when the query has an area).
    """
    sbox = search_box(q, box, rects)
    if sbox is None:
        return None
    hit = sweep_items(_items_at(rects, q, now), sbox, q.alpha, q.wc, q.wp)
    if hit is None:
        return None
    return (hit.x, hit.y), ScorePair(hit.cur / q.wc, hit.past / q.wp), hit.score


def point_score(px: float, py: float, rects: Iterable[RectObject], q: Query, now: float) -> ScorePair:
    cur = past = 0.0
    for g in rects:
        if g.covers(px, py):
            win = window_of(g.t_c, now, q)
            if win == "current":
                cur += g.w
            elif win == "past":
                past += g.w
    return ScorePair(cur / q.wc, past / q.wp)


def interval_count(items: Sequence[Item], box: Box) -> int:
    """Number of open intervals the vertical edges cut the sweep line into."""
    P = _prepare(items, box)
    return 0 if P is None else P.xs.size - 1
