"""Synthetic workloads: uniform background plus Gaussian hotspots.

Arrivals form a Poisson process whose rate is piecewise constant; burst
intervals multiply one hotspot's share of the rate.  Arrival times are
drawn by thinning a process at the peak rate, so bursts change both where
and how often objects appear.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .model import Query, SpatialObject


@dataclass
class GenConfig:
    n: int = 10_000
    rate: float = 36_000.0  # objects per hour
    hotspots: int = 5
    hotspot_sigma: float = 3.0
    skew: float = 0.7  # share of the base rate that goes to hotspots
    burst_schedule: list[tuple[float, float, int, float]] = field(default_factory=list)
    seed: int = 0
    extent: tuple[float, float, float, float] = (0.0, 0.0, 100.0, 100.0)
    w_min: int = 1
    w_max: int = 100
    t0: float = 0.0

    def __post_init__(self) -> None:
        self.burst_schedule = [tuple(b) for b in self.burst_schedule]
        self.extent = tuple(self.extent)
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if not 0.0 <= self.skew <= 1.0:
            raise ValueError("skew must lie in [0, 1]")
        if self.skew > 0 and self.hotspots < 1:
            raise ValueError("skew > 0 needs at least one hotspot")
        for t0, t1, h, mult in self.burst_schedule:
            if not (t1 > t0 and 0 <= h < max(self.hotspots, 1) and mult >= 0):
                raise ValueError(f"bad burst entry {(t0, t1, h, mult)}")

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown GenConfig keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _rates(gc: GenConfig, t: np.ndarray) -> np.ndarray:
    """Per-component rate (per second) at times ``t``; column 0 is background."""
    base = gc.rate / 3600.0
    H = gc.hotspots if gc.skew > 0 else 0
    out = np.empty((t.size, H + 1))
    out[:, 0] = base * (1.0 - gc.skew)
    if H:
        out[:, 1:] = base * gc.skew / H
        for t0, t1, h, mult in gc.burst_schedule:
            m = (t >= t0) & (t < t1)
            out[m, 1 + h] *= mult
    return out


def _peak_rate(gc: GenConfig) -> float:
    # evaluate at every schedule boundary; the rate is constant between them
    pts = [gc.t0] + [b[0] for b in gc.burst_schedule] + [b[1] for b in gc.burst_schedule]
    return float(_rates(gc, np.asarray(pts, dtype=float)).sum(axis=1).max())


def hotspot_centers(gc: GenConfig) -> np.ndarray:
    rng = np.random.default_rng([gc.seed, 1])
    x0, y0, x1, y1 = gc.extent
    c = rng.random((max(gc.hotspots, 0), 2))
    c[:, 0] = x0 + 0.1 * (x1 - x0) + 0.8 * (x1 - x0) * c[:, 0]
    c[:, 1] = y0 + 0.1 * (y1 - y0) + 0.8 * (y1 - y0) * c[:, 1]
    return c


def generate_arrays(gc: GenConfig) -> dict[str, np.ndarray]:
    """Columns ``t, x, y, w`` of the generated stream."""
    rng = np.random.default_rng(gc.seed)
    peak = _peak_rate(gc)
    centers = hotspot_centers(gc)
    x0, y0, x1, y1 = gc.extent
    ts, comps = [], []
    got = 0
    t = gc.t0
    while got < gc.n:
        m = max(1024, int(1.3 * (gc.n - got)))
        cand = t + np.cumsum(rng.exponential(1.0 / peak, m))
        t = float(cand[-1])
        lam = _rates(gc, cand)
        tot = lam.sum(axis=1)
        keep = rng.random(m) * peak < tot
        cand, lam, tot = cand[keep], lam[keep], tot[keep]
        u = rng.random(cand.size) * tot
        comp = (u[:, None] >= np.cumsum(lam, axis=1)).sum(axis=1)
        comp = np.minimum(comp, lam.shape[1] - 1)
        ts.append(cand)
        comps.append(comp)
        got += cand.size
    t = np.concatenate(ts)[: gc.n] if ts else np.empty(0)
    comp = np.concatenate(comps)[: gc.n] if comps else np.empty(0, dtype=int)
    n = t.size
    x = x0 + (x1 - x0) * rng.random(n)
    y = y0 + (y1 - y0) * rng.random(n)
    hot = comp > 0
    if hot.any():
        c = centers[comp[hot] - 1]
        pts = c + rng.normal(0.0, gc.hotspot_sigma, (int(hot.sum()), 2))
        x[hot] = np.clip(pts[:, 0], x0, x1)
        y[hot] = np.clip(pts[:, 1], y0, y1)
    w = rng.integers(gc.w_min, gc.w_max + 1, n).astype(float)
    return {"t": t, "x": x, "y": y, "w": w}


def generate(gc: GenConfig) -> list[SpatialObject]:
    cols = generate_arrays(gc)
    return [SpatialObject(i, w, x, y, t) for i, (t, x, y, w) in
            enumerate(zip(cols["t"].tolist(), cols["x"].tolist(), cols["y"].tolist(), cols["w"].tolist()))]


def default_workload(n: int = 10_000, seed: int = 7) -> GenConfig:
    """Skewed workload used by the bench defaults and the trend checks.

    Five hotspots take 70% of a 10 objects/second stream; two of them burst
    to four times their rate for half an hour each.
    """
    return GenConfig(
        n=n,
        rate=36_000.0,
        hotspots=5,
        hotspot_sigma=3.0,
        skew=0.7,
        burst_schedule=[(1800.0, 3600.0, 0, 4.0), (7200.0, 9000.0, 3, 4.0)],
        seed=seed,
    )


def default_query(alpha: float = 0.5, k: int = 1, area=None) -> Query:
    return Query(width=2.0, height=2.0, window_len=60.0, alpha=alpha, k=k, area=area)
