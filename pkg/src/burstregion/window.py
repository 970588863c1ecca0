"""Turns the object stream into New / Grown / Expired events.

Objects arrive in creation-time order, so the due times of each event kind
are already sorted; three FIFO queues merged on ``(due, kind, seq)`` replace
a general priority queue.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Optional

from .model import Query, RectObject, SpatialObject, to_rectangle


class StreamOrderError(ValueError):
    """An object arrived with a creation time earlier than the clock."""


class EventKind(IntEnum):
    # values double as the same-instant processing rank
    EXPIRED = 0
    GROWN = 1
    NEW = 2


NEW = EventKind.NEW
GROWN = EventKind.GROWN
EXPIRED = EventKind.EXPIRED


@dataclass(slots=True, eq=False)
class Event:
    rect: RectObject
    kind: EventKind
    due: float
    seq: int

    def sort_key(self) -> tuple[float, int, int]:
        return (self.due, int(self.kind), self.seq)


class EventScheduler:
    def __init__(self, query: Query):
        self.query = query
        self.now = float("-inf")
        self.live: dict[int, RectObject] = {}
        self.current: set[int] = set()
        self.admitted = 0
        self._queues: tuple[deque, deque, deque] = (deque(), deque(), deque())

    def admit(self, o: SpatialObject) -> list[Event]:
        """Schedule the three lifecycle events of ``o``; returns them.

        Nothing is delivered here: the events come out of :meth:`advance`.
        """
        if o.t_c < self.now:
            raise StreamOrderError(
                f"object {o.id} created at {o.t_c} arrived after clock reached {self.now}"
            )
        g = to_rectangle(o, self.query)
        if g is None:
            return []
        q = self.query
        evs = [
            Event(g, EXPIRED, q.expired_due(o.t_c), o.id),
            Event(g, GROWN, q.grown_due(o.t_c), o.id),
            Event(g, NEW, o.t_c, o.id),
        ]
        for e in evs:
            self._queues[e.kind].append(e)
        self.admitted += 1
        return evs[::-1]

    def pending(self) -> int:
        return sum(len(d) for d in self._queues)

    def advance(self, to: float) -> list[Event]:
        if to < self.now:
            raise StreamOrderError(f"cannot move clock back from {self.now} to {to}")
        out: list[Event] = []
        qs = self._queues
        live = self.live
        current = self.current
        while True:
            best: Optional[Event] = None
            for d in qs:
                if d:
                    e = d[0]
                    if e.due <= to and (
                        best is None
                        or (e.due, e.kind, e.seq) < (best.due, best.kind, best.seq)
                    ):
                        best = e
            if best is None:
                break
            qs[best.kind].popleft()
            g = best.rect
            if best.kind is NEW:
                live[g.id] = g
                current.add(g.id)
            elif best.kind is GROWN:
                current.discard(g.id)
            else:
                del live[g.id]
            out.append(best)
        self.now = to
        return out

    def feed(self, o: SpatialObject) -> list[Event]:
        """Admit ``o`` and return every event due up to its creation time."""
        self.admit(o)
        return self.advance(o.t_c)


def iter_events(objects: Iterable[SpatialObject], query: Query, flush: bool = False) -> Iterator[Event]:
    """Replay a time-ordered object sequence as an ordered event stream."""
    sched = EventScheduler(query)
    for o in objects:
        yield from sched.feed(o)
    if flush:
        yield from sched.advance(float("inf"))


class LiveSet:
    """Window membership rebuilt one event at a time (used by the oracle side)."""

    def __init__(self) -> None:
        self.rects: dict[int, RectObject] = {}
        self.current: set[int] = set()

    def apply(self, e: Event) -> None:
        g = e.rect
        if e.kind is NEW:
            self.rects[g.id] = g
            self.current.add(g.id)
        elif e.kind is GROWN:
            self.current.discard(g.id)
        else:
            del self.rects[g.id]

    def __len__(self) -> int:
        return len(self.rects)
