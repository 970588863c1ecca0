"""Exact detector versus the two grid approximations on one stream.

The grids never move their boxes. They only add up weights per cell, so
they are much faster. The price is a lower score whenever the burst
straddles cell borders. The run below measures both sides of that trade.
"""

from burstregion import default_query, default_workload, generate, run_bench
from burstregion.bench import mean_ratio

objs = generate(default_workload(20_000, seed=11))
q = default_query(alpha=0.5)
rep = run_bench(objs, q, ["ccs", "gaps", "mgaps"], warmup=2000, keep_scores=True)

print(rep.table())
opt = rep.by_algo("ccs").scores
for algo in ("gaps", "mgaps"):
    got = rep.by_algo(algo).scores
    worst = min((g / o for g, o in zip(got, opt) if o > 0), default=1.0)
    print(f"{algo:>5}: mean score/optimum {mean_ratio(got, opt):.3f}, worst {worst:.3f} "
          f"(guaranteed >= {(1 - q.alpha) / 4:.3f})")
