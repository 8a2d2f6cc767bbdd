"""Minimal SVG writer for T-graphs, trees, loops and lozenge tilings.

Coordinate system: y axis points up (mathematical convention); one unit is
one unscaled segment-length scale.  Colors are fixed: tiles in three hues,
trees cyan, loops red.
"""

from __future__ import annotations

import math

from .hexlattice import (
    BLACK,
    NE_SW,
    NW_SE,
    VERTICAL,
    WHITE,
    DualVertex,
    HexVertex,
    ref_position,
    white_face,
)
from .tgraph import TGraph

TILE_COLORS = {VERTICAL: "#4878cf", NE_SW: "#6acc65", NW_SE: "#d65f5f"}
TREE_COLOR = "#00b5c8"
LOOP_COLOR = "#d62728"


class Drawing:
    def __init__(self):
        self.items: list[str] = []
        self.xmin = self.ymin = math.inf
        self.xmax = self.ymax = -math.inf

    def _track(self, xs, ys):
        self.xmin = min(self.xmin, min(xs))
        self.xmax = max(self.xmax, max(xs))
        self.ymin = min(self.ymin, min(ys))
        self.ymax = max(self.ymax, max(ys))

    def line(self, a: complex, b: complex, color="#333333", width=0.02):
        self._track((a.real, b.real), (a.imag, b.imag))
        self.items.append(
            f'<line x1="{a.real:.6f}" y1="{-a.imag:.6f}" x2="{b.real:.6f}" '
            f'y2="{-b.imag:.6f}" stroke="{color}" stroke-width="{width}" '
            f'stroke-linecap="round"/>')

    def polyline(self, pts, color="#333333", width=0.02, dashed=False):
        self._track([p.real for p in pts], [p.imag for p in pts])
        body = " ".join(f"{p.real:.6f},{-p.imag:.6f}" for p in pts)
        dash = f' stroke-dasharray="{4 * width:.4f} {3 * width:.4f}"' if dashed else ""
        self.items.append(
            f'<polyline points="{body}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" stroke-linecap="round"{dash}/>')

    def polygon(self, pts, fill, stroke="none", width=0.01, opacity=1.0):
        self._track([p.real for p in pts], [p.imag for p in pts])
        body = " ".join(f"{p.real:.6f},{-p.imag:.6f}" for p in pts)
        self.items.append(
            f'<polygon points="{body}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{width}" fill-opacity="{opacity}"/>')

    def circle(self, c: complex, r: float, fill="#000000"):
        self._track((c.real - r, c.real + r), (c.imag - r, c.imag + r))
        self.items.append(
            f'<circle cx="{c.real:.6f}" cy="{-c.imag:.6f}" r="{r:.6f}" fill="{fill}"/>')

    def to_svg(self, pad: float = 0.5) -> str:
        if not self.items:
            self.xmin = self.ymin = 0.0
            self.xmax = self.ymax = 1.0
        x0, y0 = self.xmin - pad, -(self.ymax + pad)
        w = self.xmax - self.xmin + 2 * pad
        h = self.ymax - self.ymin + 2 * pad
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'viewBox="{x0:.6f} {y0:.6f} {w:.6f} {h:.6f}" '
                f'width="{100 * w:.0f}" height="{100 * h:.0f}">')
        return "\n".join([head] + self.items + ["</svg>"])

    def write(self, path: str, pad: float = 0.5) -> None:
        with open(path, "w") as f:
            f.write(self.to_svg(pad))
            f.write("\n")


def draw_tgraph(t: TGraph, faces: bool = False) -> Drawing:
    """All segments of the window; optionally the white faces tinted."""
    d = Drawing()
    fw = t.face_window
    if faces:
        m0, m1, n0, n1 = t.window
        for m in range(m0, m1):
            for n in range(n0, n1):
                f = t.face(HexVertex(m, n, WHITE))
                d.polygon(f.positions, fill="#f2e8cf", opacity=0.6)
    for m in range(fw.m0, fw.m1 + 1):
        for n in range(fw.n0, fw.n1 + 1):
            s = t.segment(HexVertex(m, n, BLACK))
            ends = [t.position(e) for e in s.endpoints]
            d.line(ends[0], ends[1])
    return d


def draw_forest(t: TGraph, forest, drawing: Drawing | None = None) -> Drawing:
    d = drawing or draw_tgraph(t)
    dom = forest.domain
    for i, v in enumerate(dom.vertices):
        tgt = forest.successor_coords(v)
        d.line(t.position(v), t.position(tgt), color=TREE_COLOR, width=0.035)
    return d


def draw_domain(t: TGraph, dd, drawing: Drawing | None = None) -> Drawing:
    """Loop in red, escape dashed, removed vertex marked."""
    d = drawing or draw_tgraph(t)
    pts = [t.position(v) for v in dd.loop] + [t.position(dd.loop[0])]
    d.polyline(pts, color=LOOP_COLOR, width=0.05)
    d.polyline([t.position(v) for v in dd.escape], color=LOOP_COLOR, width=0.03,
               dashed=True)
    d.circle(t.position(dd.marked_face), 0.08, fill=LOOP_COLOR)
    rm = HexVertex(dd.removed_white[0], dd.removed_white[1], WHITE)
    corners = [t.position(c) for c in white_face(rm.m, rm.n)]
    d.circle(sum(corners) / 3.0, 0.06, fill="#000000")
    return d


def draw_tiling(matching, scale: float = 1.0) -> Drawing:
    """Lozenge tiling in the reference hexagonal embedding: each matched pair
    becomes the rhombus glued from the two triangles of its faces."""
    d = Drawing()
    for (m, n), b in sorted(matching.pairs.items()):
        w = HexVertex(m, n, WHITE)
        pw = ref_position(w) * scale
        pb = ref_position(b) * scale
        off = (m - b.m, n - b.n)
        cls = {(0, 0): VERTICAL, (0, -1): NE_SW, (1, -1): NW_SE}[off]
        # rhombus corners: the two hex vertices and the two shared-face corners
        mid = (pw + pb) / 2.0
        half = (pb - pw) / 2.0
        perp = 1j * half * math.sqrt(3.0)
        d.polygon([pw, mid + perp, pb, mid - perp], fill=TILE_COLORS[cls],
                  stroke="#ffffff", width=0.02 * scale)
    return d
