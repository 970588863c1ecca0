"""Top-k bursty regions.

The exact detector keeps one copy of the per-cell search state for every
rank.  A rectangle's level is the first rank whose point it covers (k when
it covers none, or only the last one); rank i searches the rectangles of
level >= i.  Moving a point changes levels, and each level change is fed
to the affected ranks as if the rectangle had arrived or left there, so
the usual bound and candidate bookkeeping applies unchanged.

The grid detectors return the k best cells of one grid, or greedily merge
the 4k best cells of each of the four grids into k non-overlapping ones.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional

from .approx import GridDetector, MultiGridDetector
from .cellindex import INF, Grid, keeps_candidate, padded, score_gain, sweep_rects
from .model import (TOL, Box, BurstResult, Query, RectObject, TopKResult, empty_result,
                    point_result)
from .window import EXPIRED, GROWN, NEW, Event


class LevelState:
    __slots__ = ("cur_sum", "ud", "cand", "valid", "fresh", "version")

    def __init__(self) -> None:
        self.cur_sum = 0.0
        self.ud = INF
        self.cand: Optional[tuple[float, float, float, float]] = None
        self.valid = False
        self.fresh = False
        self.version = 0

    def copy_from(self, o: "LevelState") -> None:
        self.cur_sum = o.cur_sum
        self.ud = o.ud
        self.cand = o.cand
        self.valid = o.valid
        self.fresh = o.fresh


class LeveledCell:
    __slots__ = ("key", "box", "rects", "levels")

    def __init__(self, key: tuple[int, int], box: Box, k: int):
        self.key = key
        self.box = box
        self.rects: dict[int, RectObject] = {}
        self.levels = [LevelState() for _ in range(k)]


class TopKCellDetector:
    """Exact top-k regions after every event.

    Ranks are 0-based internally (level ``k - 1`` means "visible to every
    rank").  ``share=True`` copies a sweep result to the higher ranks when
    every rectangle of the cell is visible to all of them.
    """

    def __init__(self, query: Query, k: Optional[int] = None, share: bool = True,
                 candidate_shortcuts: bool = True):
        k = query.k if k is None else k
        if int(k) != k or k < 1:
            raise ValueError(f"k must be a positive integer, got {k}")
        self.q = query
        self.k = int(k)
        self.share = share
        self.shortcuts = candidate_shortcuts
        self.grid = Grid(query)
        self.cells: dict[tuple[int, int], LeveledCell] = {}
        self.current: set[int] = set()
        self.level: dict[int, int] = {}
        self.members: list[set[int]] = [set() for _ in range(self.k)]
        self.points: list[Optional[tuple[float, float]]] = [None] * self.k
        self._point_cell: list[Optional[tuple[int, int]]] = [None] * self.k
        self._cells_of: dict[int, list[tuple[int, int]]] = {}
        self._rects: dict[int, RectObject] = {}
        self._heaps: list[list] = [[] for _ in range(self.k)]
        self._stamp = 0
        self.events = 0
        self.sweeps = 0
        self.triggered = 0

    # -- per-level bookkeeping -----------------------------------------
    def _key(self, st: LevelState) -> float:
        if st.valid:
            _, _, c, p = st.cand
            fc = c / self.q.wc
            d = fc - p / self.q.wp
            return self.q.alpha * (d if d > 0.0 else 0.0) + (1.0 - self.q.alpha) * fc
        us = st.cur_sum / self.q.wc
        return padded(us if us < st.ud else st.ud)

    def _push(self, cell: LeveledCell, lv: int) -> None:
        st = cell.levels[lv]
        self._stamp += 1
        st.version = self._stamp
        i, j = cell.key
        heapq.heappush(self._heaps[lv], (-self._key(st), i, j, self._stamp))

    def _change(self, cell: LeveledCell, lv: int, g: RectObject, dc: float, dp: float, gain: float,
                moves: bool = True) -> None:
        """Rectangle ``g`` adds raw (dc, dp) to what rank ``lv`` sees in ``cell``.

        ``moves`` is False when only the window of ``g`` changes, not
        whether rank ``lv`` sees it.
        """
        st = cell.levels[lv]
        st.cur_sum += dc
        if st.ud != INF and gain > 0.0:
            st.ud += gain
        if st.cand is not None:
            px, py, c, p = st.cand
            covers = g.x <= px <= g.x1 and g.y <= py <= g.y1
            d_before = 0.0
            if covers:
                d_before = c / self.q.wc - p / self.q.wp
                st.cand = (px, py, c + dc, p + dp)
            if st.valid:
                if not (self.shortcuts and keeps_candidate(covers, dc, dp, d_before, gain)):
                    st.valid = False
                elif moves:
                    st.fresh = False
        self._push(cell, lv)

    def _sums(self, g: RectObject, sign: float) -> tuple[float, float]:
        return (sign * g.w, 0.0) if g.id in self.current else (0.0, sign * g.w)

    def _set_level(self, g: RectObject, new: int) -> None:
        old = self.level[g.id]
        if new == old:
            return
        if old < self.k - 1:
            self.members[old].discard(g.id)
        if new < self.k - 1:
            self.members[new].add(g.id)
        self.level[g.id] = new
        if new < old:
            dc, dp = self._sums(g, -1.0)
            lvs = range(new + 1, old + 1)
        else:
            dc, dp = self._sums(g, 1.0)
            lvs = range(old + 1, new + 1)
        gain = score_gain(dc, dp, self.q)
        for key in self._cells_of[g.id]:
            cell = self.cells[key]
            for lv in lvs:
                self._change(cell, lv, g, dc, dp, gain)

    # -- event handling -------------------------------------------------
    def _apply(self, e: Event) -> None:
        g = e.rect
        kind = e.kind
        if kind is NEW:
            keys = self.grid.cells_of(g)
            self._cells_of[g.id] = keys
            self._rects[g.id] = g
            self.current.add(g.id)
            self.level[g.id] = self.k - 1
            dc, dp = g.w, 0.0
            top = self.k - 1
        elif kind is GROWN:
            keys = self._cells_of[g.id]
            self.current.discard(g.id)
            dc, dp = -g.w, g.w
            top = self.level[g.id]
        else:
            keys = self._cells_of.pop(g.id)
            del self._rects[g.id]
            top = self.level.pop(g.id)
            if top < self.k - 1:
                self.members[top].discard(g.id)
            dc, dp = 0.0, -g.w
        gain = score_gain(dc, dp, self.q)
        cells = self.cells
        for key in keys:
            cell = cells.get(key)
            if cell is None:
                cell = cells[key] = LeveledCell(key, self.grid.search_box(*key), self.k)
            if kind is NEW:
                cell.rects[g.id] = g
            elif kind is EXPIRED:
                del cell.rects[g.id]
                if not cell.rects:
                    del cells[key]
                    continue
            for lv in range(top + 1):
                self._change(cell, lv, g, dc, dp, gain, kind is not GROWN)

    def _sweep(self, cell: LeveledCell, lv: int) -> None:
        self.sweeps += 1
        level = self.level
        rects = [g for g in cell.rects.values() if level[g.id] >= lv]
        hit = sweep_rects(rects, self.current, cell.box, self.q)
        st = cell.levels[lv]
        if hit is None:
            st.cand = (cell.box.x_min, cell.box.y_min, 0.0, 0.0)
            st.ud = 0.0
        else:
            st.cand = (hit.x, hit.y, hit.cur, hit.past)
            st.ud = hit.score
        st.valid = True
        st.fresh = True
        self._push(cell, lv)
        if self.share and lv < self.k - 1 and all(level[gid] == self.k - 1 for gid in cell.rects):
            for up in range(lv + 1, self.k):
                cell.levels[up].copy_from(st)
                self._push(cell, up)

    def _search(self, lv: int) -> tuple[Optional[LeveledCell], float]:
        heap = self._heaps[lv]
        cells = self.cells
        while heap:
            _, i, j, ver = heap[0]
            cell = cells.get((i, j))
            if cell is None or cell.levels[lv].version != ver:
                heapq.heappop(heap)
                continue
            st = cell.levels[lv]
            if st.valid and st.fresh:
                return cell, self._key(st)
            heapq.heappop(heap)
            self._sweep(cell, lv)
        return None, 0.0

    def _fix_levels(self, lv: int, point: Optional[tuple[float, float]], cell: Optional[LeveledCell]) -> None:
        rects = self._rects
        for gid in list(self.members[lv]) if lv < self.k - 1 else ():
            g = rects[gid]
            if point is None or not g.covers(*point):
                self._set_level(g, self.k - 1)
        if point is None or lv == self.k - 1:
            return
        for g in list(cell.rects.values()):
            if self.level[g.id] > lv and g.covers(*point):
                self._set_level(g, lv)

    def update(self, e: Event) -> TopKResult:
        self.events += 1
        before = self.sweeps
        self._apply(e)
        out = []
        for lv in range(self.k):
            cell, score = self._search(lv)
            if cell is None or score <= TOL:
                self.points[lv] = None
                self._point_cell[lv] = None
                self._fix_levels(lv, None, None)
                out.append(empty_result(self.q, e.due, lv + 1))
                continue
            px, py, _, _ = cell.levels[lv].cand
            self.points[lv] = (px, py)
            self._point_cell[lv] = cell.key
            self._fix_levels(lv, (px, py), cell)
            out.append(point_result(px, py, score, self.q, e.due, lv + 1))
        if self.sweeps > before:
            self.triggered += 1
        for lv, heap in enumerate(self._heaps):
            if len(heap) > 4 * len(self.cells) + 1024:
                self._compact(lv)
        return TopKResult(e.due, out)

    def _compact(self, lv: int) -> None:
        heap = [(-self._key(c.levels[lv]), c.key[0], c.key[1], c.levels[lv].version)
                for c in self.cells.values()]
        heapq.heapify(heap)
        self._heaps[lv] = heap

    def run(self, events: Iterable[Event]) -> list[TopKResult]:
        return [self.update(e) for e in events]

    @property
    def trigger_ratio(self) -> float:
        return self.triggered / self.events if self.events else 0.0


def _pad(found: list[BurstResult], q: Query, k: int, t: float) -> TopKResult:
    out = list(found[:k])
    while len(out) < k:
        out.append(empty_result(q, t, len(out) + 1))
    return TopKResult(t, out)


class TopKGridDetector(GridDetector):
    """The k best cells of a single grid."""

    def __init__(self, query: Query, k: Optional[int] = None):
        super().__init__(query)
        self.k = query.k if k is None else k
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    def update(self, e: Event) -> TopKResult:
        self._apply(e)
        grid = self.grids[0]
        found = []
        for rank, (s, i, j) in enumerate(grid.top(self.k), 1):
            if s <= TOL:
                break
            found.append(BurstResult(grid.region(i, j), s, e.due, rank, None, True))
        return _pad(found, self.q, self.k, e.due)


class TopKMultiGridDetector(MultiGridDetector):
    """Top 4k cells of each grid merged greedily into k non-overlapping regions."""

    def __init__(self, query: Query, k: Optional[int] = None):
        super().__init__(query)
        self.k = query.k if k is None else k
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    def update(self, e: Event) -> TopKResult:
        self._apply(e)
        pool = []
        for gi, grid in enumerate(self.grids):
            for s, i, j in grid.top(4 * self.k):
                pool.append((-s, gi, i, j))
        pool.sort()
        found: list[BurstResult] = []
        for neg, gi, i, j in pool:
            s = -neg
            if s <= TOL or len(found) == self.k:
                break
            box = self.grids[gi].region(i, j)
            if any(box.overlaps_interior(r.region) for r in found):
                continue
            found.append(BurstResult(box, s, e.due, len(found) + 1, None, True))
        return _pad(found, self.q, self.k, e.due)
