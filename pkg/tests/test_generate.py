import io

import numpy as np
import pytest

from burstregion.generate import GenConfig, default_query, default_workload, generate, generate_arrays, hotspot_centers
from burstregion.stream import write_stream

# 0.99 quantile of chi-square with 99 degrees of freedom
CHI2_99_DF99 = 134.64161685578915


def _dump(gc):
    buf = io.StringIO()
    write_stream(generate(gc), buf)
    return buf.getvalue()


def test_fixed_seed_is_byte_identical():
    gc = default_workload(2000, seed=3)
    assert _dump(gc) == _dump(GenConfig.from_json(gc.to_json()))
    assert _dump(gc) != _dump(default_workload(2000, seed=4))


def test_no_skew_is_spatially_uniform():
    cols = generate_arrays(GenConfig(n=10_000, skew=0.0, seed=11))
    counts, _, _ = np.histogram2d(cols["x"], cols["y"], bins=10, range=[[0, 100], [0, 100]])
    expected = 10_000 / 100
    stat = float(((counts - expected) ** 2 / expected).sum())
    assert stat < CHI2_99_DF99


def test_skew_concentrates_mass():
    gc = GenConfig(n=10_000, skew=0.9, hotspots=2, hotspot_sigma=2.0, seed=1)
    cols = generate_arrays(gc)
    c = hotspot_centers(gc)
    d = np.min(np.hypot(cols["x"][:, None] - c[:, 0], cols["y"][:, None] - c[:, 1]), axis=1)
    assert (d < 6.0).mean() > 0.8


def test_rate_doubling_halves_span():
    a = generate_arrays(GenConfig(n=20_000, rate=3600.0, seed=5))["t"]
    b = generate_arrays(GenConfig(n=20_000, rate=7200.0, seed=5))["t"]
    assert b[-1] / a[-1] == pytest.approx(0.5, rel=0.03)


def test_bursts_raise_local_rate():
    gc = GenConfig(n=40_000, rate=36_000.0, hotspots=2, skew=0.5, seed=2,
                   burst_schedule=[(1000.0, 2000.0, 1, 5.0)])
    t = generate_arrays(gc)["t"]
    inside = ((t >= 1000) & (t < 2000)).sum() / 1000.0
    before = (t < 1000).sum() / 1000.0
    # background 5/s, hotspots 2.5/s each; the burst lifts hotspot 1 to 12.5/s
    assert before == pytest.approx(10.0, rel=0.1)
    assert inside == pytest.approx(20.0, rel=0.1)


def test_output_shape_and_ranges():
    cols = generate_arrays(default_workload(5000))
    t, w = cols["t"], cols["w"]
    assert t.size == 5000 and (np.diff(t) >= 0).all()
    assert w.min() >= 1 and w.max() <= 100 and (w == np.round(w)).all()
    assert cols["x"].min() >= 0 and cols["x"].max() <= 100


@pytest.mark.parametrize("kw", [
    dict(skew=1.5), dict(rate=0), dict(n=-1), dict(burst_schedule=[(5.0, 1.0, 0, 2.0)]),
    dict(hotspots=2, burst_schedule=[(0.0, 1.0, 3, 2.0)]),
])
def test_bad_configs(kw):
    with pytest.raises(ValueError):
        GenConfig(**kw)


def test_unknown_keys_rejected():
    with pytest.raises(ValueError):
        GenConfig.from_dict({"n": 5, "speed": 3})


def test_default_query():
    q = default_query(alpha=0.9, k=3)
    assert (q.width, q.height, q.window_len, q.alpha, q.k) == (2.0, 2.0, 60.0, 0.9, 3)
