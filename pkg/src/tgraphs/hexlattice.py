"""Combinatorics of the hexagonal lattice, its dual triangular lattice, and
edge/face duality.

Coordinates: every vertex of the hexagonal lattice carries a pair (m, n); for
each pair there are exactly two vertices, the white one on top of the black
one, joined by a vertical edge.  Vertices of the dual triangular lattice sit
at hexagon centres; the dual vertex (m, n) is the one just left of the
vertical edge (m, n).

Adjacency convention (fixed by requiring the twisted edge flow to have zero
circulation around every dual face *and* a bounded deviation from its linear
part; see tests):

    b(m, n) ~ w(m, n)        "vertical"
    b(m, n) ~ w(m, n-1)      "ne-sw"
    b(m, n) ~ w(m+1, n-1)    "nw-se"

Reference embedding used for orientation bookkeeping and rendering: unit edge
length, lattice translations e1 = (sqrt3, 0) and e2 = (sqrt3/2, 3/2).  In
units of (sqrt3/2, 1/2) all positions are integers, which gives exact
point-in-polygon tests.
"""

from __future__ import annotations

import math
from typing import Iterator, NamedTuple

from .errors import AdjacencyError

BLACK = "black"
WHITE = "white"

VERTICAL = "vertical"
NE_SW = "ne-sw"
NW_SE = "nw-se"
EDGE_CLASSES = (VERTICAL, NE_SW, NW_SE)

# Offset of the white endpoint relative to the black one, per class.
WHITE_OFFSET = {VERTICAL: (0, 0), NE_SW: (0, -1), NW_SE: (1, -1)}

SQRT3 = math.sqrt(3.0)


class HexVertex(NamedTuple):
    m: int
    n: int
    color: str


class DualVertex(NamedTuple):
    m: int
    n: int


class HexEdge(NamedTuple):
    """Edge of the hexagonal lattice, keyed by its black endpoint and class."""

    m: int
    n: int
    cls: str

    @property
    def black(self) -> HexVertex:
        return HexVertex(self.m, self.n, BLACK)

    @property
    def white(self) -> HexVertex:
        dm, dn = WHITE_OFFSET[self.cls]
        return HexVertex(self.m + dm, self.n + dn, WHITE)


class DualEdge(NamedTuple):
    """Directed dual edge with its crossed hexagonal edge.

    ``white_sign`` is +1 when traversing tail->head keeps the white endpoint
    of the crossed edge on the left.
    """

    tail: DualVertex
    head: DualVertex
    crossed: HexEdge
    white_sign: int


def black(m: int, n: int) -> HexVertex:
    return HexVertex(m, n, BLACK)


def white(m: int, n: int) -> HexVertex:
    return HexVertex(m, n, WHITE)


def hex_neighbors(v: HexVertex) -> list[HexVertex]:
    """The three neighbours of ``v``, all of the opposite colour."""
    m, n = v.m, v.n
    if v.color == BLACK:
        return [white(m, n), white(m, n - 1), white(m + 1, n - 1)]
    return [black(m, n), black(m, n + 1), black(m - 1, n + 1)]


def edge_between(w: HexVertex, b: HexVertex) -> HexEdge:
    """Canonical edge for an adjacent white/black pair."""
    if w.color == BLACK and b.color == WHITE:
        w, b = b, w
    if w.color != WHITE or b.color != BLACK:
        raise AdjacencyError(f"need one white and one black vertex, got {w}, {b}")
    off = (w.m - b.m, w.n - b.n)
    for cls, d in WHITE_OFFSET.items():
        if off == d:
            return HexEdge(b.m, b.n, cls)
    raise AdjacencyError(f"{w} and {b} are not adjacent")


def edges_at(v: HexVertex) -> list[HexEdge]:
    return [edge_between(v, u) if v.color == WHITE else edge_between(u, v)
            for u in hex_neighbors(v)]


def white_face(m: int, n: int) -> tuple[DualVertex, DualVertex, DualVertex]:
    """Dual-vertex corners of the triangular face containing w(m, n), in
    anticlockwise order."""
    return (DualVertex(m, n), DualVertex(m + 1, n), DualVertex(m, n + 1))


def black_face(m: int, n: int) -> tuple[DualVertex, DualVertex, DualVertex]:
    """Dual-vertex corners of the triangular face containing b(m, n), in
    anticlockwise order."""
    return (DualVertex(m, n), DualVertex(m + 1, n - 1), DualVertex(m + 1, n))


# Directed dual-edge catalogue.  Key: (dm, dn) = head - tail.  Value:
# (em, en, cls, white_sign) with the crossed edge key relative to the tail.
_DUAL_CATALOGUE = {
    (1, 0): (0, 0, VERTICAL, +1),
    (-1, 0): (-1, 0, VERTICAL, -1),
    (0, 1): (-1, 1, NW_SE, -1),
    (0, -1): (-1, 0, NW_SE, +1),
    (-1, 1): (-1, 1, NE_SW, +1),
    (1, -1): (0, 0, NE_SW, -1),
}


def dual_edge_info(tail: DualVertex, head: DualVertex) -> DualEdge:
    """Crossed hexagonal edge and side sign for a directed dual edge."""
    key = (head.m - tail.m, head.n - tail.n)
    try:
        em, en, cls, sign = _DUAL_CATALOGUE[key]
    except KeyError:
        raise AdjacencyError(f"{tail} and {head} are not dual neighbours") from None
    return DualEdge(tail, head, HexEdge(tail.m + em, tail.n + en, cls), sign)


def dual_of_edge(e: HexEdge, orientation: int = +1) -> DualEdge:
    """Directed dual edge crossing ``e``.

    ``orientation=+1`` is the white-to-black traversal of ``e``; the returned
    dual edge crosses it with the white vertex on the left.  ``-1`` reverses.
    """
    m, n = e.m, e.n
    if e.cls == VERTICAL:
        tail, head = DualVertex(m, n), DualVertex(m + 1, n)
    elif e.cls == NE_SW:
        tail, head = DualVertex(m + 1, n - 1), DualVertex(m, n)
    else:  # NW_SE
        tail, head = DualVertex(m + 1, n), DualVertex(m + 1, n - 1)
    if orientation < 0:
        tail, head = head, tail
    return dual_edge_info(tail, head)


def face_boundary(v: DualVertex, color: str) -> list[DualEdge]:
    """The three dual edges around the face of the black/white vertex at
    ``(v.m, v.n)``, in anticlockwise order."""
    corners = white_face(v.m, v.n) if color == WHITE else black_face(v.m, v.n)
    return [dual_edge_info(corners[i], corners[(i + 1) % 3]) for i in range(3)]


def dual_neighbors(v: DualVertex) -> list[DualVertex]:
    return [DualVertex(v.m + dm, v.n + dn) for dm, dn in _DUAL_CATALOGUE]


# ---------------------------------------------------------------------------
# Reference embedding (unit edge length).

_E1 = (SQRT3, 0.0)
_E2 = (SQRT3 / 2.0, 1.5)


def ref_position(v) -> complex:
    """Planar position of a vertex in the reference embedding."""
    if isinstance(v, DualVertex):
        x, y = _lattice_point(v.m, v.n)
        return complex(x - SQRT3 / 2.0, y + 0.5)
    if isinstance(v, HexVertex):
        x, y = _lattice_point(v.m, v.n)
        return complex(x, y + (1.0 if v.color == WHITE else 0.0))
    raise TypeError(f"unsupported vertex type: {type(v)!r}")


def _lattice_point(m: int, n: int) -> tuple[float, float]:
    return (m * _E1[0] + n * _E2[0], m * _E1[1] + n * _E2[1])


def int_position(v) -> tuple[int, int]:
    """Exact position in units of (sqrt3/2, 1/2); integer for every vertex."""
    if isinstance(v, DualVertex):
        return (2 * v.m + v.n - 1, 3 * v.n + 1)
    if isinstance(v, HexVertex):
        base = (2 * v.m + v.n, 3 * v.n)
        return (base[0], base[1] + (2 if v.color == WHITE else 0))
    raise TypeError(f"unsupported vertex type: {type(v)!r}")


# ---------------------------------------------------------------------------
# Windows.


class Window(NamedTuple):
    """Axis-aligned coordinate rectangle [m0, m1] x [n0, n1], inclusive."""

    m0: int
    m1: int
    n0: int
    n1: int

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m1 - self.m0 + 1, self.n1 - self.n0 + 1)

    def contains(self, m: int, n: int) -> bool:
        return self.m0 <= m <= self.m1 and self.n0 <= n <= self.n1

    def duals(self) -> Iterator[DualVertex]:
        for m in range(self.m0, self.m1 + 1):
            for n in range(self.n0, self.n1 + 1):
                yield DualVertex(m, n)

    def shrink(self, k: int) -> "Window":
        return Window(self.m0 + k, self.m1 - k, self.n0 + k, self.n1 - k)

    @classmethod
    def centered(cls, radius_m: int, radius_n: int | None = None) -> "Window":
        rn = radius_m if radius_n is None else radius_n
        return cls(-radius_m, radius_m, -rn, rn)
