import pytest

from burstregion.bench import BenchReport, mean_ratio, run_bench, time_detector
from burstregion.engine import ALGOS, make_detector, replay
from burstregion.generate import default_query, default_workload, generate
from burstregion.model import Box, Query
from burstregion.window import iter_events

from streams import random_case


@pytest.fixture(scope="module")
def small():
    return generate(default_workload(1500, seed=2)), default_query()


def test_report_round_trip(small):
    objs, q = small
    rep = run_bench(objs, q, ["ccs", "gaps", "naive"], warmup=100, keep_scores=True)
    back = BenchReport.from_json(rep.to_json())
    assert back == rep
    assert rep.n_objects == 1500 and rep.n_events == len(list(iter_events(objs, q)))
    ccs = rep.by_algo("ccs")
    assert ccs.events == rep.n_events - 100
    assert len(ccs.scores) == rep.n_events
    assert ccs.trigger_ratio is not None and rep.by_algo("gaps").trigger_ratio is None
    assert ccs.mean_us > 0 and ccs.p99_us >= ccs.median_us
    # exact variants agree on every snapshot
    assert ccs.scores == rep.by_algo("naive").scores
    assert "ccs" in rep.table() and "naive" in rep.table()
    with pytest.raises(KeyError):
        rep.by_algo("mgaps")


def test_area_query_serialises(small):
    objs, _ = small
    rep = run_bench(objs[:200], Query(2, 2, 60, area=Box(0, 0, 50, 50)), ["gaps"])
    assert BenchReport.from_json(rep.to_json()).query["area"] == [0, 0, 50, 50]


def test_mean_ratio():
    assert mean_ratio([1, 2, 0], [2, 4, 0]) == pytest.approx(0.5)
    assert mean_ratio([], []) == 1.0


def test_every_algo_runs():
    q, objs = random_case(3, n=60, k=2)
    evs = list(iter_events(objs, q))
    for algo in ALGOS:
        st = time_detector(algo, evs, q)
        assert st.events == len(evs) and len(st.final_scores) == (1 if algo in ("ccs", "gaps", "mgaps", "naive") else 2)
    with pytest.raises(ValueError):
        make_detector("quick", q)


def test_replay_is_deterministic():
    q, objs = random_case(4, n=100)
    a = list(replay(objs, q, "mgaps"))
    b = list(replay(objs, q, "mgaps"))
    assert a == b


def test_interleaved_blocks_match_separate_runs(small):
    objs, q = small
    evs = list(iter_events(objs, q))
    rep = run_bench(objs, q, ["ccs", "mgaps"], warmup=50, keep_scores=True, block=37)
    for algo in ("ccs", "mgaps"):
        alone = time_detector(algo, evs, q, warmup=50, keep_scores=True)
        got = rep.by_algo(algo)
        assert got.scores == alone.scores and got.events == alone.events
        assert got.sweeps == alone.sweeps and got.final_scores == alone.final_scores
