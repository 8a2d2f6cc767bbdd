"""The martingale random walk on a T-graph.

From a vertex in the interior of its segment, the walk jumps to the two
segment endpoints with rates reciprocal to the distances, which makes it a
martingale with no tuning.  This script checks the drift, looks at exit
angles from a ball, and estimates one rectangle-crossing probability.
"""

import numpy as np

from tgraphs import Twist, Window, build_tgraph, build_triangle
from tgraphs.hexlattice import DualVertex
from tgraphs.verify import window_covering
from tgraphs.walk import crossing_probability, exit_angle_histogram, jump_rates

shape = build_triangle(1 / 3, 1 / 3, 1 / 3)
t = build_tgraph(shape, Twist.from_angle(0.9), Window.centered(40))

rp = jump_rates(t, DualVertex(0, 0))
pv = t.position(DualVertex(0, 0))
drift = sum(r * (t.position(u) - pv) for u, r in (rp.up, rp.down))
print("jump rates at the origin:", round(rp.up[1], 3), round(rp.down[1], 3),
      "| rate-weighted drift:", abs(drift))

hist = exit_angle_histogram(t, DualVertex(0, 0), radius=10.0, trials=3000, seed=1)
print(f"exit angles from a radius-10 ball: min half-plane probability "
      f"{hist['min_halfplane_prob']:.3f} (eta=0.1)")

# crossing a 3:1 rectangle at scale delta = 0.1
delta = 0.1
win = window_covering(shape, -4, 4 / delta + 4, -4, 4 / delta + 4)
tc = build_tgraph(shape, Twist.from_angle(0.9), win)
est = crossing_probability(tc, 0.2 + 0.3j, delta, horizontal=True, reverse=False,
                           trials=800, seed=2, max_start_vertices=10)
pooled = sum(d["p"] for d in est.per_vertex) / est.start_count
print(f"crossing estimate (pooled over {est.start_count} start vertices): "
      f"{pooled:.4f}; worst vertex {est.worst_probability:.4f}")
