"""Cut discrete domains for continuous shapes.

Trace a directed simple loop in a corridor around the shape's image, attach
an escape path, and read off the hexagonal-lattice domain whose tilings
correspond to wired spanning trees.  The loop tracks the boundary within the
corridor width; halving the scale roughly halves the distance.
"""

import os

from tgraphs import Twist, Window, build_tgraph, build_triangle
from tgraphs.domains import ContinuousDomain, build_domain, loop_hausdorff
from tgraphs.gibbs import random_twist
from tgraphs import svgout

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

shape = build_triangle(1 / 3, 1 / 3, 1 / 3)
side = 2.0
u = ContinuousDomain.polygon(
    [0j, side, side + 0.5j * side, 0.5 * side + 0.5j * side,
     0.5 * side + 1j * side, 1j * side], marked=0)   # an L-shape

for delta, eps in ((0.04, 0.2), (0.02, 0.1)):
    span = side / delta
    win = Window(int(-0.6 * span), int(1.7 * span), int(-0.6 * span), int(1.7 * span))
    t = build_tgraph(shape, random_twist(11, shape, win), win)
    dd = build_domain(t, u, delta=delta, corridor=eps)
    h = loop_hausdorff(t, dd.loop, u, delta)
    print(f"delta={delta}: loop {len(dd.loop)} vertices, Hausdorff distance "
          f"{h:.4f} (corridor {eps}), marked face adjacent: {dd.marked_adjacent}")
    if delta == 0.02:
        svgout.draw_domain(t, dd).write(os.path.join(OUT, "domain.svg"))
        print("wrote", os.path.join(OUT, "domain.svg"))
