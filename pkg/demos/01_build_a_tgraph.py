"""Build a T-graph and look at its geometry.

A slope (p_a, p_b, p_c) fixes a triangle with angles (pi p_a, pi p_b, pi p_c);
together with a unit twist lambda it defines a flow on the hexagonal lattice
whose dual primitive maps the triangular lattice onto a union of segments.
Black faces flatten onto segments, white faces stay similar to the triangle.
"""

import os

import numpy as np

from tgraphs import Twist, Window, build_tgraph, build_triangle, check_nondegenerate
from tgraphs.hexlattice import BLACK, DualVertex, HexVertex, white
from tgraphs.tgraph import linear_map
from tgraphs import svgout

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

shape = build_triangle(0.5, 0.3, 0.2)
twist = Twist.from_angle(0.71)
t = build_tgraph(shape, twist, Window.centered(20))

print("triangle sides:", shape.alpha, shape.beta, shape.gamma)
print("position of the base dual vertex:", t.position(DualVertex(0, 0)))

# positions stay within a bounded distance of the linear map
rad = 20
ms = np.arange(-rad, rad + 1)[:, None]
ns = np.arange(-rad, rad + 1)[None, :]
dev = np.abs(t.psi - linear_map(shape, ms, ns))
print(f"sup |position - linear part| over the window: {dev.max():.4f}")

# a segment and a face
seg = t.segment(HexVertex(0, 0, BLACK))
print("segment of b(0,0): corners", seg.corners, "interior:", seg.interior_vertex,
      f"length {seg.length:.3f}")
face = t.face(white(0, 0))
print("face of w(0,0) angles:", sorted(round(a, 4) for a in face.angles()),
      "(target:", sorted(round(np.pi * p, 4) for p in shape.slope), ")")

rep = check_nondegenerate(t)
print("non-degenerate:", rep.ok, "| segment lengths in", rep.segment_length_range)

svgout.draw_tgraph(t, faces=True).write(os.path.join(OUT, "tgraph.svg"))
print("wrote", os.path.join(OUT, "tgraph.svg"))
