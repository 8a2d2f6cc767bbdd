"""Heights equal windings, exactly.

On a discrete domain cut from the T-graph, sample a wired spanning tree, map
it to a lozenge tiling, compute the height function with the geometric
reference flow, and compare height differences with the intrinsic winding of
tree branches: they agree to machine precision, pair by pair.
"""

import numpy as np

from tgraphs import Twist, Window, build_tgraph, build_triangle
from tgraphs.dimers import ReferenceFlow, verify_height_winding
from tgraphs.domains import (
    ContinuousDomain,
    DomainForest,
    boundary_height_profile,
    build_domain,
    domain_heights,
    domain_matching,
)
from tgraphs.ust import wilson_wired

shape = build_triangle(1 / 3, 1 / 3, 1 / 3)
t = build_tgraph(shape, Twist.from_angle(0.37), Window.centered(40))
u = ContinuousDomain.polygon([0j, 25, 25 + 25j, 25j], marked=0)
dd = build_domain(t, u, delta=1.0, corridor=2.0)
print(f"domain: loop {len(dd.loop)}, interior vertices {dd.wired.size}, "
      f"dimer region {len(dd.whites)} whites")

forest = wilson_wired(dd.wired, seed=5)
df = DomainForest(dd, forest)
matching, _ = domain_matching(t, df)
heights = domain_heights(t, df, matching, ReferenceFlow(t))

verts = sorted(heights.values)
rng = np.random.default_rng(1)
pairs = [(verts[int(a)], verts[int(b)])
         for a, b in rng.integers(0, len(verts), (200, 2))]
rep = verify_height_winding(t, df.successor, heights, pairs)
print(f"max |h(v') - h(v) - W/2pi| over 200 random pairs: "
      f"{rep['max_discrepancy']:.2e}")

profile = boundary_height_profile(t, dd)
worst = max(abs(profile[v] - (heights[v] - heights[dd.marked_face]))
            for v in dd.loop)
print(f"boundary heights from the path winding agree to {worst:.2e}; "
      f"max |boundary height| = {max(abs(x) for x in profile.values()):.3f}")
