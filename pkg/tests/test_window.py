import random
from collections import Counter

import pytest

from burstregion.model import Box, Query, SpatialObject, window_of
from burstregion.window import (EXPIRED, GROWN, NEW, EventScheduler, LiveSet, StreamOrderError,
                                iter_events)

from streams import random_objects

Q = Query(width=1, height=1, window_len=5)


def test_admit_schedules_three_events():
    s = EventScheduler(Q)
    evs = s.admit(SpatialObject(0, 1.0, 0.0, 0.0, 10.0))
    assert [(e.kind, e.due) for e in evs] == [(NEW, 10.0), (GROWN, 15.0), (EXPIRED, 20.0)]
    assert s.pending() == 3
    out = s.advance(20.0)
    assert [(e.kind, e.due) for e in out] == [(NEW, 10.0), (GROWN, 15.0), (EXPIRED, 20.0)]
    assert s.advance(20.0) == []


def test_outside_area_gives_no_events():
    q = Query(width=1, height=1, window_len=5, area=Box(0, 0, 2, 2))
    s = EventScheduler(q)
    assert s.admit(SpatialObject(0, 1.0, 3.0, 3.0, 1.0)) == []
    assert s.pending() == 0


def test_same_time_news_ordered_by_id():
    s = EventScheduler(Q)
    s.admit(SpatialObject(0, 1.0, 0, 0, 10.0))
    s.admit(SpatialObject(1, 1.0, 0, 0, 10.0))
    out = s.advance(10.0)
    assert [e.rect.id for e in out] == [0, 1]


def test_expiry_precedes_arrival_at_same_instant():
    s = EventScheduler(Q)
    s.feed(SpatialObject(0, 1.0, 0, 0, 0.0))
    out = s.feed(SpatialObject(1, 1.0, 0, 0, 10.0))
    assert [(e.rect.id, e.kind) for e in out] == [(0, GROWN), (0, EXPIRED), (1, NEW)]


def test_grown_precedes_new_at_same_instant():
    s = EventScheduler(Q)
    s.feed(SpatialObject(0, 1.0, 0, 0, 0.0))
    out = s.feed(SpatialObject(1, 1.0, 0, 0, 5.0))
    assert [(e.rect.id, e.kind) for e in out] == [(0, GROWN), (1, NEW)]


def test_out_of_order_rejected():
    s = EventScheduler(Q)
    s.feed(SpatialObject(0, 1.0, 0, 0, 10.0))
    with pytest.raises(StreamOrderError):
        s.admit(SpatialObject(1, 1.0, 0, 0, 9.0))
    with pytest.raises(StreamOrderError):
        s.advance(5.0)


def test_lifecycle_and_membership_against_recount():
    rng = random.Random(3)
    objs = random_objects(rng, 400, lattice=0.5)  # quarter-second timestamps collide often
    q = Query(width=1, height=1, window_len=3.0, past_window_len=2.0)
    s = EventScheduler(q)
    kinds: dict[int, list] = {}
    count = 0
    for o in objs:
        for e in s.feed(o):
            count += 1
            kinds.setdefault(e.rect.id, []).append((e.kind, e.due))
        now = s.now
        for g_id, g in s.live.items():
            assert window_of(g.t_c, now, q) == ("current" if g_id in s.current else "past")
        assert len(s.live) == sum(window_of(x.t_c, now, q) is not None for x in objs[: o.id + 1])
    for e in s.advance(float("inf")):
        count += 1
        kinds.setdefault(e.rect.id, []).append((e.kind, e.due))
    assert count == 3 * s.admitted == 3 * len(objs)
    for seq in kinds.values():
        assert [k for k, _ in seq] == [NEW, GROWN, EXPIRED]
        assert seq[0][1] <= seq[1][1] <= seq[2][1]


def test_global_order_is_sorted():
    rng = random.Random(9)
    objs = random_objects(rng, 300, lattice=0.5)
    evs = list(iter_events(objs, Q, flush=True))
    keys = [e.sort_key() for e in evs]
    assert keys == sorted(keys)
    c = Counter(e.kind for e in evs)
    assert c[NEW] == c[GROWN] == c[EXPIRED] == 300


def test_liveset_mirrors_scheduler():
    rng = random.Random(4)
    objs = random_objects(rng, 200)
    s = EventScheduler(Q)
    live = LiveSet()
    for o in objs:
        for e in s.feed(o):
            live.apply(e)
        assert live.rects.keys() == s.live.keys()
        assert live.current == s.current
