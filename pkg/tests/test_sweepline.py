import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from burstregion.model import Box, Query, RectObject, ScorePair, burst_score
from burstregion.oracle import Snapshot, brute_best
from burstregion.model import SpatialObject
from burstregion.sweepline import (SweepTrace, _scores, interval_count, point_score, sweep_best_point,
                                   sweep_items)

Q = Query(width=2.0, height=2.0, window_len=1.0, alpha=0.5)


def _rect(i, x, y, w, t_c, q=Q):
    return RectObject(i, w, x, y, x + q.width, y + q.height, t_c)


def figure4():
    """One past and two current rectangles; g3 highest, then g1, then g2.

    g1 (past) covers the left part of g3, g2 covers the left and middle
    parts.  The middle part is covered by g2 and g3 only, the left part by
    all three.
    """
    now = 1.5
    g1 = _rect(1, 0.5, 1.5, 1.0, 0.0)   # past window at t=1.5
    g2 = _rect(2, 1.0, 1.0, 1.0, 1.0)
    g3 = _rect(3, 2.0, 2.0, 2.0, 1.0)
    return [g1, g2, g3], now


def test_figure4_best_is_three():
    rects, now = figure4()
    (px, py), pair, score = sweep_best_point(rects, Q, None, now)
    assert score == pytest.approx(3.0, abs=1e-12)
    assert pair == ScorePair(3.0, 0.0)
    assert point_score(px, py, rects, Q, now) == pair


def test_figure4_triple_overlap_scores():
    rects, now = figure4()
    assert point_score(2.25, 2.5, rects, Q, now) == ScorePair(3.0, 1.0)
    # below g3's bottom edge only g1 and g2 remain: one current, one past
    assert burst_score(point_score(2.25, 1.75, rects, Q, now), 0.5) == pytest.approx(0.5)


def test_figure4_matches_oracle():
    rects, now = figure4()
    objs = [SpatialObject(g.id, g.w, g.x, g.y, g.t_c) for g in rects]
    assert brute_best(Snapshot.at(objs, now, Q), Q).score == pytest.approx(3.0)


def test_empty_and_single():
    assert sweep_best_point([], Q, None, 0.0) is None
    one = [_rect(0, 3.0, 4.0, 2.0, 0.0)]
    for alpha in (0.0, 0.5, 0.9):
        q = Query(2.0, 2.0, 1.0, alpha=alpha)
        (px, py), _, score = sweep_best_point(one, q, None, 0.5)
        assert score == pytest.approx(2.0)
        assert one[0].covers(px, py)


def test_closed_edges_count():
    g = _rect(0, 0.0, 0.0, 1.0, 0.0)
    assert point_score(2.0, 2.0, [g], Q, 0.0).f_c == 1.0
    assert point_score(2.0 + 1e-12, 2.0, [g], Q, 0.0).f_c == 0.0


def test_touching_rectangles_share_their_edge():
    # two rectangles meeting along x = 2 only; the line itself sees both
    a = _rect(0, 0.0, 0.0, 1.0, 0.0)
    b = _rect(1, 2.0, 0.0, 1.0, 0.0)
    (px, _), _, score = sweep_best_point([a, b], Q, None, 0.5)
    assert score == pytest.approx(2.0)
    assert px == 2.0


def test_corner_contact_found():
    a = _rect(0, 0.0, 0.0, 1.0, 0.0)
    b = _rect(1, 2.0, 2.0, 1.0, 0.0)
    (px, py), _, score = sweep_best_point([a, b], Q, None, 0.5)
    assert score == pytest.approx(2.0)
    assert (px, py) == (2.0, 2.0)


items_strategy = st.lists(
    st.tuples(
        st.integers(0, 24), st.integers(0, 24),     # lattice corner (quarter units)
        st.integers(1, 100), st.booleans(),
    ),
    min_size=0, max_size=40,
)


def _items(raw, b=2.0, a=2.0):
    out = []
    for x, y, w, cur in raw:
        x, y = x / 4, y / 4
        out.append((x, y, x + b, y + a, float(w) if cur else 0.0, 0.0 if cur else float(w)))
    return out


def _brute(items, box, alpha, wc, wp):
    xs = sorted({v for it in items for v in (it[0], it[2])} | {box.x_min, box.x_max})
    ys = sorted({v for it in items for v in (it[1], it[3])} | {box.y_min, box.y_max})
    xs = [v for v in xs if box.x_min <= v <= box.x_max]
    ys = [v for v in ys if box.y_min <= v <= box.y_max]
    cx = xs + [(u + v) / 2 for u, v in zip(xs, xs[1:])]
    cy = ys + [(u + v) / 2 for u, v in zip(ys, ys[1:])]
    best = 0.0
    for x in cx:
        for y in cy:
            c = sum(it[4] for it in items if it[0] <= x <= it[2] and it[1] <= y <= it[3])
            p = sum(it[5] for it in items if it[0] <= x <= it[2] and it[1] <= y <= it[3])
            best = max(best, float(_scores(np.array([c]), np.array([p]), alpha, wc, wp)[0]))
    return best


@given(items_strategy, st.sampled_from([0.1, 0.5, 0.9]),
       st.tuples(st.integers(0, 20), st.integers(0, 20), st.integers(1, 12), st.integers(1, 12)))
@settings(max_examples=150, deadline=None)
def test_sweep_matches_brute_force(raw, alpha, bx):
    items = _items(raw)
    box = Box(bx[0] / 4, bx[1] / 4, (bx[0] + bx[2]) / 4, (bx[1] + bx[3]) / 4)
    touching = [it for it in items if it[0] <= box.x_max and it[2] >= box.x_min
                and it[1] <= box.y_max and it[3] >= box.y_min]
    hit = sweep_items(touching, box, alpha, 3.0, 3.0)
    if not touching:
        assert hit is None
        return
    assert hit.score == pytest.approx(_brute(touching, box, alpha, 3.0, 3.0), abs=1e-9)
    assert box.contains(hit.x, hit.y)
    c = sum(it[4] for it in touching if it[0] <= hit.x <= it[2] and it[1] <= hit.y <= it[3])
    p = sum(it[5] for it in touching if it[0] <= hit.x <= it[2] and it[1] <= hit.y <= it[3])
    assert (c, p) == (hit.cur, hit.past)


@given(items_strategy, st.sampled_from([0.1, 0.5, 0.9]))
@settings(max_examples=100, deadline=None)
def test_compiled_and_reference_sweeps_agree(raw, alpha):
    items = _items(raw)
    box = Box(0.0, 0.0, 9.0, 9.0)
    a = sweep_items(items, box, alpha, 2.0, 5.0, compiled=True)
    b = sweep_items(items, box, alpha, 2.0, 5.0, compiled=False)
    assert a == b


class Checker(SweepTrace):
    def __init__(self, box, alpha, wc, wp):
        self.box, self.alpha, self.wc, self.wp = box, alpha, wc, wp
        self.calls = 0
        self.last = None

    def edge(self, y, is_top, xs, cur, past, cached):
        self.calls += 1
        assert xs[0] == self.box.x_min and xs[-1] == self.box.x_max
        assert np.diff(xs).sum() == pytest.approx(self.box.width)
        assert (np.diff(xs) > 0).all()
        assert (cur >= -1e-9).all() and (past >= -1e-9).all()
        np.testing.assert_allclose(cached, _scores(cur, past, self.alpha, self.wc, self.wp), atol=1e-12)
        self.last = (cur.copy(), past.copy())


@given(items_strategy, st.sampled_from([0.1, 0.5, 0.9]))
@settings(max_examples=100, deadline=None)
def test_sweep_invariants(raw, alpha):
    items = _items(raw)
    box = Box(1.0, 1.0, 6.0, 7.0)
    touching = [it for it in items if it[0] <= box.x_max and it[2] >= box.x_min
                and it[1] <= box.y_max and it[3] >= box.y_min]
    chk = Checker(box, alpha, 2.0, 2.0)
    hit = sweep_items(touching, box, alpha, 2.0, 2.0, trace=chk)
    assert chk.calls == 2 * len(touching)
    assert interval_count(touching, box) <= 2 * len(touching) + 1
    if touching:
        cur, past = chk.last  # every rectangle removed again
        assert np.abs(cur).max() < 1e-9 and np.abs(past).max() < 1e-9
        assert hit is not None


def test_ties_go_to_first_in_sweep_order():
    # two equal disjoint rectangles: the higher one is met first
    lo = (0.0, 0.0, 1.0, 1.0, 5.0, 0.0)
    hi = (3.0, 3.0, 4.0, 4.0, 5.0, 0.0)
    hit = sweep_items([lo, hi], Box(0, 0, 4, 4), 0.5, 1.0, 1.0)
    assert hit.y >= 3.0
