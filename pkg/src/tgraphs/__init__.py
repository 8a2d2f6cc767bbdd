"""T-graphs for the hexagonal-lattice dimer model.

Construct T-graphs at any slope, run the martingale random walk on them,
sample wired uniform spanning trees, map trees to lozenge tilings, and check
the exact height/winding and flow identities that tie these objects together.
"""

from .hexlattice import (
    BLACK,
    NE_SW,
    NW_SE,
    VERTICAL,
    WHITE,
    DualVertex,
    HexEdge,
    HexVertex,
    Window,
    black,
    dual_of_edge,
    face_boundary,
    hex_neighbors,
    white,
)
from .tgraph import (
    Twist,
    TriangleShape,
    TGraph,
    build_triangle,
    build_tgraph,
    check_nondegenerate,
    embed_hex,
    linear_map,
    translate_twist,
)

__all__ = [
    "BLACK", "WHITE", "VERTICAL", "NE_SW", "NW_SE",
    "DualVertex", "HexVertex", "HexEdge", "Window",
    "black", "white", "hex_neighbors", "face_boundary", "dual_of_edge",
    "TriangleShape", "Twist", "TGraph",
    "build_triangle", "build_tgraph", "check_nondegenerate",
    "embed_hex", "linear_map", "translate_twist",
]

__version__ = "0.1.0"
