"""Domain types, the burst score, and the point/rectangle duality.

Every detector in the package works in the *dual* space: an object at
``(x, y)`` becomes the closed rectangle ``[x, x + b] x [y, y + a]`` and a
point ``p`` covered by a set of rectangles stands for the region whose
top-right corner is ``p``.  The region then contains exactly the objects
whose rectangles cover ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

TOL = 1e-9


class SpatialObject(NamedTuple):
    id: int
    w: float
    x: float
    y: float
    t_c: float


class ScorePair(NamedTuple):
    """Window scores (weight per second) for the current and past windows."""

    f_c: float
    f_p: float


@dataclass(frozen=True, slots=True)
class Box:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def intersects(self, other: "Box") -> bool:
        """Closed intersection (touching boxes intersect)."""
        return (
            self.x_min <= other.x_max
            and other.x_min <= self.x_max
            and self.y_min <= other.y_max
            and other.y_min <= self.y_max
        )

    def overlaps_interior(self, other: "Box") -> bool:
        """True when the intersection has positive area."""
        return (
            self.x_min < other.x_max
            and other.x_min < self.x_max
            and self.y_min < other.y_max
            and other.y_min < self.y_max
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min


@dataclass(frozen=True)
class Query:
    """A continuous detection query.

    ``width`` (b) and ``height`` (a) give the region size.  ``past_window_len``
    defaults to ``window_len``; the approximation guarantee is only claimed
    for equal lengths.
    """

    width: float
    height: float
    window_len: float
    alpha: float = 0.5
    k: int = 1
    area: Optional[Box] = None
    past_window_len: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("region width and height must be positive")
        if not self.window_len > 0:
            raise ValueError("window_len must be positive")
        if self.past_window_len is not None and not self.past_window_len > 0:
            raise ValueError("past_window_len must be positive")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.area is not None:
            if self.area.width < self.width or self.area.height < self.height:
                raise ValueError("preferred area is smaller than the region size")

    @property
    def wc(self) -> float:
        return self.window_len

    @property
    def wp(self) -> float:
        return self.window_len if self.past_window_len is None else self.past_window_len

    @property
    def anchor(self) -> tuple[float, float]:
        """Origin of every grid used by the detectors."""
        if self.area is None:
            return 0.0, 0.0
        return self.area.x_min, self.area.y_min

    @property
    def domain(self) -> Optional[Box]:
        """Valid top-right corners, i.e. points whose region lies inside the area."""
        if self.area is None:
            return None
        A = self.area
        return Box(A.x_min + self.width, A.y_min + self.height, A.x_max, A.y_max)

    def grown_due(self, t_c: float) -> float:
        return t_c + self.wc

    def expired_due(self, t_c: float) -> float:
        return t_c + self.wc + self.wp


@dataclass(slots=True, eq=False)
class RectObject:
    """Closed rectangle ``[x, x1] x [y, y1]`` generated from one object."""

    id: int
    w: float
    x: float
    y: float
    x1: float
    y1: float
    t_c: float

    def covers(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x1 and self.y <= py <= self.y1


def burst_score(s: ScorePair, alpha: float) -> float:
    f_c, f_p = s
    return alpha * max(f_c - f_p, 0.0) + (1.0 - alpha) * f_c


def score_from_sums(cur: float, past: float, q: Query) -> float:
    """Burst score from raw weight sums in the two windows."""
    f_c = cur / q.wc
    d = f_c - past / q.wp
    return q.alpha * (d if d > 0.0 else 0.0) + (1.0 - q.alpha) * f_c


def window_score(weights: Sequence[float], window_len: float) -> float:
    if not window_len > 0:
        raise ValueError("window_len must be positive")
    return math.fsum(weights) / window_len


def window_of(t_c: float, now: float, q: Query) -> Optional[str]:
    """'current', 'past' or None for an object created at ``t_c``.

    Uses the same due-time arithmetic as the event scheduler so the two never
    disagree at a window boundary.
    """
    if t_c > now:
        return None
    if q.grown_due(t_c) > now:
        return "current"
    if q.expired_due(t_c) > now:
        return "past"
    return None


def to_rectangle(o: SpatialObject, q: Query) -> Optional[RectObject]:
    if q.area is not None and not q.area.contains(o.x, o.y):
        return None
    return RectObject(o.id, o.w, o.x, o.y, o.x + q.width, o.y + q.height, o.t_c)


def region_from_point(px: float, py: float, q: Query) -> Box:
    return Box(px - q.width, py - q.height, px, py)


@dataclass(slots=True)
class BurstResult:
    region: Box
    score: float
    t: float
    rank: int = 1
    point: Optional[tuple[float, float]] = None
    placed: bool = True


@dataclass(slots=True)
class TopKResult:
    t: float
    regions: list[BurstResult]

    @property
    def scores(self) -> list[float]:
        return [r.score for r in self.regions]


def sentinel_region(q: Query) -> Box:
    """Placement used for padded, score-0 entries."""
    ox, oy = q.anchor
    return Box(ox, oy, ox + q.width, oy + q.height)


def empty_result(q: Query, t: float, rank: int = 1) -> BurstResult:
    return BurstResult(sentinel_region(q), 0.0, t, rank, None, False)


def point_result(px: float, py: float, score: float, q: Query, t: float, rank: int = 1) -> BurstResult:
    if score <= TOL:
        return empty_result(q, t, rank)
    return BurstResult(region_from_point(px, py, q), score, t, rank, (px, py), True)
