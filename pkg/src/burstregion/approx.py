"""Grid approximations: every a x b grid cell is a candidate region.

Objects fall into exactly one cell per grid (half-open membership), so a
cell's burst score is a pair of running sums.  The single-grid detector
returns the best cell; the four-grid detector adds grids shifted by half a
cell in x, in y, and in both, and returns the best of the four answers.
Both are within a factor (1 - alpha) / 4 of the exact optimum.
"""

from __future__ import annotations

from collections import deque
from heapq import heapify, heappop, heappush, heapreplace
from math import floor
from typing import Iterable, Optional

from .model import TOL, Box, BurstResult, Query, RectObject, empty_result
from .window import EXPIRED, GROWN, NEW, Event

REBUILD_EVERY = 1 << 16


def _index(v: float, o: float, size: float, inv: float) -> int:
    """Cell index along one axis, consistent with the edges ``o + i * size``."""
    i = floor((v - o) * inv)
    if o + i * size > v:
        return i - 1
    if o + (i + 1) * size <= v:
        return i + 1
    return i


def grid_offsets(q: Query) -> list[tuple[float, float]]:
    """Offsets of the four grids: plain, half-width, half-height, both."""
    b, a = q.width, q.height
    return [(0.0, 0.0), (b / 2, 0.0), (0.0, a / 2), (b / 2, a / 2)]


class GridAggregate:
    """Per-cell raw current / past weight sums of one grid plus a lazy max-heap.

    ``cells`` maps ``(i, j)`` to ``[cur, past, count, stamp, key, score]``.
    Heap entries are ``(-key, i, j, stamp, (i, j))``; stamps are unique, so
    the trailing dict key never takes part in comparisons.
    Every cell has exactly one heap entry whose stamp matches; its key is an
    upper bound of the cell's score.  A cell is pushed again only when its
    score rises above that key, and a stale key is refreshed when it reaches
    the top.  A record is dropped when its last object expires, which also
    resets its sums to an exact zero.
    """

    def __init__(self, q: Query, dx: float = 0.0, dy: float = 0.0):
        self.q = q
        ox, oy = q.anchor
        self.ox = ox + dx
        self.oy = oy + dy
        self.dx, self.dy = dx, dy
        self.cells: dict[tuple[int, int], list] = {}
        self._heap: list = []
        self._stamp = 0
        self._ic = 1.0 / q.wc
        self._ip = 1.0 / q.wp
        self._b, self._a = q.width, q.height
        self._ib = 1.0 / q.width
        self._ia = 1.0 / q.height
        self._al = q.alpha
        self._bl = 1.0 - q.alpha

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return (_index(x, self.ox, self.q.width, self._ib), _index(y, self.oy, self.q.height, self._ia))

    def score(self, rec: list) -> float:
        fc = rec[0] * self._ic
        d = fc - rec[1] * self._ip
        return self._al * (d if d > 0.0 else 0.0) + self._bl * fc

    def apply(self, kind: int, x: float, y: float, w: float) -> None:
        key = self.cell_of(x, y)
        cells = self.cells
        if kind is NEW:
            rec = cells.get(key)
            if rec is None:
                rec = cells[key] = [w, 0.0, 1, 0, -1.0, 0.0]
            else:
                rec[0] += w
                rec[2] += 1
        elif kind is GROWN:
            rec = cells[key]
            c = rec[0] - w
            rec[0] = c if c > 0.0 else 0.0
            rec[1] += w
        else:
            rec = cells[key]
            if rec[2] == 1:
                del cells[key]
                return
            rec[2] -= 1
            p = rec[1] - w
            rec[1] = p if p > 0.0 else 0.0
        fc = rec[0] * self._ic
        d = fc - rec[1] * self._ip
        s = (self._al * d if d > 0.0 else 0.0) + self._bl * fc
        rec[5] = s
        if s > rec[4]:
            self._stamp = st = self._stamp + 1
            rec[3] = st
            rec[4] = s
            heap = self._heap
            heappush(heap, (-s, key[0], key[1], st, key))
            if len(heap) > 4 * len(cells) + 4096:
                self._reheap()

    def _reheap(self) -> None:
        heap = []
        for key, rec in self.cells.items():
            self._stamp += 1
            rec[3] = self._stamp
            rec[4] = rec[5]
            heap.append((-rec[5], key[0], key[1], self._stamp, key))
        heapify(heap)
        self._heap = heap

    def _settle(self) -> Optional[tuple]:
        """Make the heap top an exact entry and return it (None if empty)."""
        heap = self._heap
        cells = self.cells
        while heap:
            top = heap[0]
            rec = cells.get(top[4])
            if rec is None or rec[3] != top[3]:
                heappop(heap)
            elif rec[5] == -top[0]:
                return top
            else:
                self._stamp = st = self._stamp + 1
                rec[3] = st
                rec[4] = rec[5]
                heapreplace(heap, (-rec[5], top[1], top[2], st, top[4]))
        return None

    def best(self) -> Optional[tuple[float, int, int]]:
        """(score, i, j) of the max-score cell, or None when the grid is empty."""
        top = self._settle()
        if top is None:
            return None
        return -top[0], top[1], top[2]

    def top(self, m: int) -> list[tuple[float, int, int]]:
        """Up to ``m`` cells with the highest scores, best first."""
        out = []
        taken = []
        while len(out) < m:
            top = self._settle()
            if top is None:
                break
            taken.append(heappop(self._heap))
            out.append((-top[0], top[1], top[2]))
        for ent in taken:
            heappush(self._heap, ent)
        return out

    def rebuild(self, members: Iterable[tuple[float, float, float, bool]]) -> None:
        """Recount every cell from ``(x, y, w, is_current)`` tuples.

        Cancels the rounding drift of long runs of +/- updates.
        """
        cells: dict[tuple[int, int], list] = {}
        for x, y, w, cur in members:
            key = self.cell_of(x, y)
            rec = cells.get(key)
            if rec is None:
                rec = cells[key] = [0.0, 0.0, 0, 0, 0.0, 0.0]
            rec[0 if cur else 1] += w
            rec[2] += 1
        for rec in cells.values():
            rec[5] = self.score(rec)
        self.cells = cells
        self._reheap()

    def region(self, i: int, j: int) -> Box:
        """Cell as a region, slid inside the preferred area if it pokes out.

        Sliding never loses an object: the part of the cell inside the area
        stays inside the slid box.
        """
        b, a = self.q.width, self.q.height
        x0, x1 = self.ox + i * b, self.ox + (i + 1) * b
        y0, y1 = self.oy + j * a, self.oy + (j + 1) * a
        A = self.q.area
        if A is not None:
            if x0 < A.x_min or x1 > A.x_max:
                x0 = min(max(x0, A.x_min), A.x_max - b)
                x1 = x0 + b
            if y0 < A.y_min or y1 > A.y_max:
                y0 = min(max(y0, A.y_min), A.y_max - a)
                y1 = y0 + a
        return Box(x0, y0, x1, y1)


class GridDetector:
    """Single-grid approximation: the best cell after every event."""

    n_grids = 1

    def __init__(self, query: Query):
        self.q = query
        self.grids = [GridAggregate(query, dx, dy) for dx, dy in grid_offsets(query)[: self.n_grids]]
        # objects grow and leave in arrival order, so the live set is a FIFO
        # whose first ``n_grown`` entries are in the past window
        self.live: deque[RectObject] = deque()
        self.n_grown = 0
        # fast-path cell keys of current and past objects, same FIFO order
        self._cur_keys: deque = deque()
        self._past_keys: deque = deque()
        self.events = 0
        self._last: Optional[tuple] = None  # (gi, i, j, region) of the previous answer

    def _apply(self, e: Event) -> None:
        g = e.rect
        kind = e.kind
        if kind is NEW:
            self.live.append(g)
        elif kind is GROWN:
            self.n_grown += 1
        else:
            self.live.popleft()
            self.n_grown -= 1
        x, y, w = g.x, g.y, g.w
        for grid in self.grids:
            grid.apply(kind, x, y, w)
        self.events += 1
        if not self.events & (REBUILD_EVERY - 1):
            self.rebuild()

    def rebuild(self) -> None:
        """Recount every grid from the live objects."""
        ng = self.n_grown
        members = [(g.x, g.y, g.w, i >= ng) for i, g in enumerate(self.live)]
        for grid in self.grids:
            grid.rebuild(members)

    def update(self, e: Event) -> BurstResult:
        # single-grid fast path: GridAggregate.apply and _settle inlined
        g = e.rect
        kind = e.kind
        grid = self.grids[0]
        cells = grid.cells
        w = g.w
        if kind is NEW:
            # cell_of inlined
            x, y = g.x, g.y
            o, size = grid.ox, grid._b
            i = floor((x - o) * grid._ib)
            if o + i * size > x:
                i -= 1
            elif o + (i + 1) * size <= x:
                i += 1
            o, size = grid.oy, grid._a
            j = floor((y - o) * grid._ia)
            if o + j * size > y:
                j -= 1
            elif o + (j + 1) * size <= y:
                j += 1
            key = (i, j)
            self._cur_keys.append(key)
            self.live.append(g)
            rec = cells.get(key)
            if rec is None:
                rec = cells[key] = [w, 0.0, 1, 0, -1.0, 0.0]
            else:
                rec[0] += w
                rec[2] += 1
        elif kind is GROWN:
            key = self._cur_keys.popleft()
            self._past_keys.append(key)
            self.n_grown += 1
            rec = cells[key]
            c = rec[0] - w
            rec[0] = c if c > 0.0 else 0.0
            rec[1] += w
        else:
            key = self._past_keys.popleft()
            self.live.popleft()
            self.n_grown -= 1
            rec = cells[key]
            if rec[2] == 1:
                del cells[key]
                rec = None
            else:
                rec[2] -= 1
                p = rec[1] - w
                rec[1] = p if p > 0.0 else 0.0
        if rec is not None:
            fc = rec[0] * grid._ic
            d = fc - rec[1] * grid._ip
            sc = (grid._al * d if d > 0.0 else 0.0) + grid._bl * fc
            rec[5] = sc
            if sc > rec[4]:
                grid._stamp = st = grid._stamp + 1
                rec[3] = st
                rec[4] = sc
                heappush(grid._heap, (-sc, key[0], key[1], st, key))
                if len(grid._heap) > 4 * len(cells) + 4096:
                    grid._reheap()
        self.events += 1
        if not self.events & (REBUILD_EVERY - 1):
            self.rebuild()
            cells = grid.cells
        heap = grid._heap
        top = heap[0] if heap else None
        if top is not None:
            rec = cells.get(top[4])
            if rec is None or rec[3] != top[3] or rec[5] != -top[0]:
                top = grid._settle()
        else:
            top = grid._settle()
        if top is None or -top[0] <= TOL:
            return empty_result(self.q, e.due)
        last = self._last
        if last is not None and last[1] == top[1] and last[2] == top[2]:
            box = last[3]
        else:
            box = self._region(0, top[1], top[2])
        return BurstResult(box, -top[0], e.due, 1, None, True)

    def _region(self, gi: int, i: int, j: int) -> Box:
        last = self._last
        if last is not None and last[0] == gi and last[1] == i and last[2] == j:
            return last[3]
        box = self.grids[gi].region(i, j)
        self._last = (gi, i, j, box)
        return box

    def result(self, t: float) -> BurstResult:
        best = None
        for gi, grid in enumerate(self.grids):
            hit = grid.best()
            if hit is not None and (best is None or hit[0] > best[0]):
                best = (hit[0], gi, hit[1], hit[2])
        if best is None or best[0] <= TOL:
            return empty_result(self.q, t)
        s, gi, i, j = best
        return BurstResult(self._region(gi, i, j), s, t, 1, None, True)

    def run(self, events: Iterable[Event]) -> list[BurstResult]:
        return [self.update(e) for e in events]


class MultiGridDetector(GridDetector):
    """Four shifted grids; the best cell over all of them."""

    n_grids = 4

    def update(self, e: Event) -> BurstResult:
        self._apply(e)
        return self.result(e.due)
