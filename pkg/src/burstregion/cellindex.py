"""Exact continuous detector: a grid of a x b cells searched lazily.

Each cell keeps the rectangles touching it, a static bound (current weight
touching the cell), a dynamic bound (last swept maximum plus the largest
possible gain since), and a cached best point.  After an event only the
touched cells change; cells are then popped by bound until the top one
holds a best point known to be exact.
"""

from __future__ import annotations

import heapq
import math
from typing import Iterable, Optional

import numpy as np

from .model import TOL, Box, BurstResult, Query, RectObject, empty_result, point_result
from .sweepline import sweep_arrays
from .window import EXPIRED, GROWN, NEW, Event

INF = float("inf")
BOUND_MODES = ("both", "static", "none")
BOUND_PAD = 1e-9


def score_gain(dc: float, dp: float, q: Query) -> float:
    """Largest burst-score change a point can see when (dc, dp) raw weight
    is added to its current / past sums."""
    fc = dc / q.wc
    d = fc - dp / q.wp
    return q.alpha * (d if d > 0.0 else 0.0) + (1.0 - q.alpha) * fc


def padded(bound: float) -> float:
    """Heap key of an unsearched cell.

    Bounds are sums of rounded increments and can land an ulp below the
    maximum they cover.  The pad makes a cell that may tie the best known
    score get searched, so ties resolve by cell id alone.
    """
    return bound + BOUND_PAD * (1.0 + bound)


def keeps_candidate(covers: bool, dc: float, dp: float, d_before: float, gain: float) -> bool:
    """Whether a cell's exact best point stays exact after a (dc, dp) change.

    A covering change that can only raise scores keeps it when the point's
    current score already exceeded its past score, because the point then
    gains the full amount any point can gain.  A change that cannot raise
    any score keeps it when it misses the point.  Everything else is
    treated as unknown.
    """
    if covers:
        return dc >= 0.0 and dp <= 0.0 and d_before > TOL
    return gain <= 0.0


class Grid:
    """Cell geometry shared by the exact detectors."""

    def __init__(self, q: Query):
        self.q = q
        self.ox, self.oy = q.anchor
        self.dom = q.domain

    def bounds(self, i: int, j: int) -> Box:
        b, a = self.q.width, self.q.height
        return Box(self.ox + i * b, self.oy + j * a, self.ox + (i + 1) * b, self.oy + (j + 1) * a)

    def search_box(self, i: int, j: int) -> Optional[Box]:
        c = self.bounds(i, j)
        d = self.dom
        if d is None:
            return c
        out = Box(max(c.x_min, d.x_min), max(c.y_min, d.y_min),
                  min(c.x_max, d.x_max), min(c.y_max, d.y_max))
        if out.x_min > out.x_max or out.y_min > out.y_max:
            return None
        return out

    def cells_of(self, g: RectObject) -> list[tuple[int, int]]:
        """Cells whose closed bounds meet the rectangle's closed extent.

        Four for generic placement; up to nine when the rectangle's corners
        sit on grid lines.  Cells wholly outside the valid domain are skipped.
        """
        b, a = self.q.width, self.q.height
        ox, oy = self.ox, self.oy
        ui = math.floor((g.x - ox) / b)
        uj = math.floor((g.y - oy) / a)
        cols = [i for i in range(ui - 2, ui + 3)
                if ox + i * b <= g.x1 and ox + (i + 1) * b >= g.x]
        rows = [j for j in range(uj - 2, uj + 3)
                if oy + j * a <= g.y1 and oy + (j + 1) * a >= g.y]
        out = []
        for i in cols:
            for j in rows:
                if self.dom is None or self.search_box(i, j) is not None:
                    out.append((i, j))
        return out


def sweep_rects(rects: Iterable[RectObject], current: set, box: Box, q: Query):
    rs = list(rects)
    if not rs:
        return None
    cols = np.array([(g.x, g.y, g.x1, g.y1, g.w if g.id in current else 0.0,
                      0.0 if g.id in current else g.w) for g in rs]).T.copy()
    return sweep_arrays(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5],
                        box, q.alpha, q.wc, q.wp)


class Cell:
    __slots__ = ("key", "box", "rects", "cur_sum", "ud", "cand", "valid", "fresh", "version")

    def __init__(self, key: tuple[int, int], box: Box):
        self.key = key
        self.box = box
        self.rects: dict[int, RectObject] = {}
        self.cur_sum = 0.0  # raw current-window weight touching the cell
        self.ud = INF
        self.cand: Optional[tuple[float, float, float, float]] = None  # x, y, cur, past
        self.valid = False
        # cand is what a sweep of the current rectangles would return
        self.fresh = False
        self.version = 0


class CellDetector:
    """Exact best region after every event.

    ``bound_mode``: ``"both"`` keys cells by min(static, dynamic) bound,
    ``"static"`` by the static bound only, ``"none"`` re-sweeps every touched
    cell on every event (the baseline).  ``candidate_shortcuts=False``
    invalidates the cached point of every touched cell.
    """

    def __init__(self, query: Query, bound_mode: str = "both", candidate_shortcuts: bool = True):
        if bound_mode not in BOUND_MODES:
            raise ValueError(f"bound_mode must be one of {BOUND_MODES}")
        self.q = query
        self.grid = Grid(query)
        self.bound_mode = bound_mode
        self.shortcuts = candidate_shortcuts
        self.cells: dict[tuple[int, int], Cell] = {}
        self.current: set[int] = set()
        self._cells_of: dict[int, list[tuple[int, int]]] = {}
        self._heap: list = []
        self._stamp = 0
        self.events = 0
        self.sweeps = 0
        self.triggered = 0

    # -- bounds ---------------------------------------------------------
    def static_bound(self, cell: Cell) -> float:
        return cell.cur_sum / self.q.wc

    def bound(self, cell: Cell) -> float:
        us = cell.cur_sum / self.q.wc
        if self.bound_mode == "both":
            return us if us < cell.ud else cell.ud
        return us

    def _key(self, cell: Cell) -> float:
        if cell.valid:
            _, _, c, p = cell.cand
            fc = c / self.q.wc
            d = fc - p / self.q.wp
            return self.q.alpha * (d if d > 0.0 else 0.0) + (1.0 - self.q.alpha) * fc
        return padded(self.bound(cell))

    def _push(self, cell: Cell) -> None:
        # stamps are detector-wide so a recreated cell never matches old entries
        self._stamp += 1
        cell.version = self._stamp
        i, j = cell.key
        heapq.heappush(self._heap, (-self._key(cell), i, j, cell.version))

    def _compact(self) -> None:
        self._heap = [(-self._key(c), c.key[0], c.key[1], c.version) for c in self.cells.values()]
        heapq.heapify(self._heap)

    # -- per-cell search -----------------------------------------------
    def _sweep(self, cell: Cell) -> None:
        self.sweeps += 1
        hit = sweep_rects(cell.rects.values(), self.current, cell.box, self.q)
        if hit is None:
            cell.cand = (cell.box.x_min, cell.box.y_min, 0.0, 0.0)
            cell.ud = 0.0
        else:
            cell.cand = (hit.x, hit.y, hit.cur, hit.past)
            cell.ud = hit.score
        cell.valid = True
        cell.fresh = True

    def cell_max(self, key: tuple[int, int]) -> float:
        """Forced sweep of one cell, leaving its state untouched."""
        cell = self.cells[key]
        hit = sweep_rects(cell.rects.values(), self.current, cell.box, self.q)
        return 0.0 if hit is None else hit.score

    # -- event handling -------------------------------------------------
    def _apply(self, e: Event) -> list[Cell]:
        g = e.rect
        q = self.q
        kind = e.kind
        if kind is NEW:
            keys = self.grid.cells_of(g)
            self._cells_of[g.id] = keys
            self.current.add(g.id)
            dc, dp = g.w, 0.0
        elif kind is GROWN:
            keys = self._cells_of[g.id]
            self.current.discard(g.id)
            dc, dp = -g.w, g.w
        else:
            keys = self._cells_of.pop(g.id)
            dc, dp = 0.0, -g.w
        gain = score_gain(dc, dp, q)
        ud_gain = gain if gain > 0.0 else 0.0
        touched = []
        cells = self.cells
        for key in keys:
            cell = cells.get(key)
            if cell is None:
                cell = cells[key] = Cell(key, self.grid.search_box(*key))
            if kind is NEW:
                cell.rects[g.id] = g
            elif kind is EXPIRED:
                del cell.rects[g.id]
            cell.cur_sum += dc
            if not cell.rects:
                del cells[key]
                continue
            if cell.ud != INF:
                cell.ud += ud_gain
            if cell.cand is not None:
                px, py, c, p = cell.cand
                covers = g.x <= px <= g.x1 and g.y <= py <= g.y1
                if covers:
                    d_before = c / q.wc - p / q.wp
                    cell.cand = (px, py, c + dc, p + dp)
                if cell.valid:
                    if not (self.shortcuts and keeps_candidate(covers, dc, dp, d_before if covers else 0.0, gain)):
                        cell.valid = False
                    elif kind is not GROWN:
                        # still optimal, but a sweep of the new arrangement may pick another tied point
                        cell.fresh = False
            elif cell.valid:
                cell.valid = False
            touched.append(cell)
        return touched

    def update(self, e: Event) -> BurstResult:
        self.events += 1
        before = self.sweeps
        touched = self._apply(e)
        for cell in touched:
            if self.bound_mode == "none":
                self._sweep(cell)
            self._push(cell)
        result = self._search(e.due)
        if self.sweeps > before:
            self.triggered += 1
        if len(self._heap) > 4 * len(self.cells) + 1024:
            self._compact()
        return result

    def _search(self, t: float) -> BurstResult:
        heap = self._heap
        cells = self.cells
        while heap:
            _, i, j, ver = heap[0]
            cell = cells.get((i, j))
            if cell is None or cell.version != ver:
                heapq.heappop(heap)
                continue
            if cell.valid and cell.fresh:
                px, py, c, p = cell.cand
                return point_result(px, py, self._key(cell), self.q, t)
            heapq.heappop(heap)
            self._sweep(cell)
            self._push(cell)
        return empty_result(self.q, t)

    def run(self, events: Iterable[Event]) -> list[BurstResult]:
        return [self.update(e) for e in events]

    @property
    def trigger_ratio(self) -> float:
        return self.triggered / self.events if self.events else 0.0
