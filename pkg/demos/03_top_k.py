"""Three bursty regions at once.

Rank 2 is the best box over the objects that rank 1 does not cover, and
so on. Two ranks never count the same object. A quiet stream puts the
ranks on three different hotspots. While hotspot 0 bursts it is heavy
enough to fill several ranks with neighbouring boxes, each counting its
own objects, and the ranks spread out again as the other burst starts.
"""

from burstregion import GenConfig, Query, TopKCellDetector, generate, iter_events
from burstregion.generate import hotspot_centers

gc = GenConfig(n=6000, rate=36_000.0, hotspots=3, hotspot_sigma=1.5, skew=0.8, seed=21,
               burst_schedule=[(200.0, 600.0, 0, 3.0), (300.0, 600.0, 2, 2.0)])
q = Query(width=2.0, height=2.0, window_len=60.0, alpha=0.5, k=3)

print("hotspot centres:", ", ".join(f"({x:.1f}, {y:.1f})" for x, y in hotspot_centers(gc)))
det = TopKCellDetector(q)
tick = 120.0
for e in iter_events(generate(gc), q):
    res = det.update(e)
    if e.due >= tick:
        cells = [f"#{r.rank} {r.score:5.2f} @ ({r.region.x_min:5.1f}, {r.region.y_min:5.1f})" for r in res.regions]
        print(f"t={e.due:4.0f}  " + "   ".join(cells))
        tick += 120.0
