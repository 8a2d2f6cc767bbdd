"""Discrete domains on a T-graph for a continuous target region.

Given a simple polygon U in lattice coordinates and a scale delta, trace a
directed simple loop of T-graph edges inside a corridor around the image of
the boundary of U under the linear map, pick a root near the marked boundary
point, erase the root's loop edge, attach an escape path to the window
boundary, and read off the hexagonal-lattice domain and the wired T-graph
domain whose spanning trees correspond to dimer configurations.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConnectivityError,
    ConsistencyError,
    GeometryError,
    ResolutionError,
    TopologyError,
    WindowError,
)
from .hexlattice import (
    BLACK,
    WHITE,
    DualVertex,
    HexVertex,
    dual_edge_info,
    int_position,
    white_face,
    black_face,
)
from .tgraph import TGraph, linear_map
from .ust import WiredDomain
from .walk import WalkArrays


@dataclass(frozen=True)
class ContinuousDomain:
    """Simple polygon in lattice coordinates (m + i*n), positively oriented,
    with a marked boundary point."""

    boundary: tuple[complex, ...]
    marked: complex

    @classmethod
    def polygon(cls, points: list[complex], marked: complex | None = None) -> "ContinuousDomain":
        pts = [complex(p) for p in points]
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        area2 = sum((a.real * b.imag - b.real * a.imag)
                    for a, b in zip(pts, pts[1:] + pts[:1]))
        if area2 == 0:
            raise GeometryError("degenerate polygon")
        if area2 < 0:
            pts = pts[::-1]
        if _self_intersects(pts):
            raise GeometryError("polygon boundary is not simple")
        if marked is None:
            marked = pts[0]
        return cls(tuple(pts), complex(marked))

    def diameter(self) -> float:
        pts = self.boundary
        return max(abs(a - b) for a in pts for b in pts)


def _self_intersects(pts: list[complex]) -> bool:
    n = len(pts)
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_cross(*segs[i], *segs[j]):
                return True
    return False


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        v = (q - p).conjugate() * (r - p)
        return v.imag
    d1, d2 = orient(c, d, a), orient(c, d, b)
    d3, d4 = orient(a, b, c), orient(a, b, d)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


# ---------------------------------------------------------------------------
# Exact point-in-polygon on the integer reference embedding.


def point_in_int_polygon(q: tuple[int, int], poly: list[tuple[int, int]]) -> bool:
    """Strict containment by exact crossing count; q must not lie on the
    boundary (guaranteed for hexagonal-lattice points against dual-edge
    polygons)."""
    x, y = q
    inside = False
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        if (y1 > y) != (y2 > y):
            # exact comparison of x with the intersection abscissa
            # x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            num = (x1 - x) * (y2 - y1) + (y - y1) * (x2 - x1)
            if (y2 - y1) > 0:
                if num > 0:
                    inside = not inside
            else:
                if num < 0:
                    inside = not inside
    return inside


def point_in_polygon(z: complex, poly: list[complex]) -> bool:
    """Float winding-number test (used for the independent geometric
    classification route)."""
    wind = 0.0
    n = len(poly)
    for k in range(n):
        a = poly[k] - z
        b = poly[(k + 1) % n] - z
        cross = a.real * b.imag - a.imag * b.real
        dot = a.real * b.real + a.imag * b.imag
        wind += math.atan2(cross, dot)
    return abs(wind) > math.pi


# ---------------------------------------------------------------------------
# Corridor-constrained loop tracing.


def _polyline_distances(points: np.ndarray, poly: list[complex]) -> np.ndarray:
    """Distance from each point to the closed polyline."""
    best = np.full(points.shape, np.inf)
    n = len(poly)
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        ab = b - a
        denom = abs(ab) ** 2
        if denom == 0:
            continue
        t = ((points - a) * np.conjugate(ab)).real / denom
        t = np.clip(t, 0.0, 1.0)
        best = np.minimum(best, np.abs(points - (a + t * ab)))
    return best


def _arc_points(poly: list[complex], spacing: float, start: complex) -> list[complex]:
    """Points along the closed polyline at the given spacing, starting from
    the vertex of the polyline closest to ``start``."""
    n = len(poly)
    # rotate so the closest projection to `start` comes first
    dists = []
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        ab = b - a
        t = 0.0 if ab == 0 else max(0.0, min(1.0, ((start - a).real * ab.real
                                                   + (start - a).imag * ab.imag) / abs(ab) ** 2))
        dists.append((abs(start - (a + t * ab)), k, t))
    _, k0, t0 = min(dists)
    pts = []
    total = sum(abs(poly[(k + 1) % n] - poly[k]) for k in range(n))
    steps = max(8, int(total / spacing))
    h = total / steps
    pos = poly[k0] + t0 * (poly[(k0 + 1) % n] - poly[k0])
    pts.append(pos)
    k, t = k0, t0
    travelled = 0.0
    while travelled + h < total:
        remaining = h
        while remaining > 0:
            a, b = poly[k], poly[(k + 1) % n]
            seg_len = abs(b - a)
            left = (1.0 - t) * seg_len
            if left > remaining:
                t += remaining / seg_len
                remaining = 0.0
            else:
                remaining -= left
                k = (k + 1) % n
                t = 0.0
        pts.append(poly[k] + t * (poly[(k + 1) % n] - poly[k]))
        travelled += h
    return pts


def trace_loop(t: TGraph, domain: ContinuousDomain, delta: float,
               corridor: float, clockwise: bool = False) -> list[DualVertex]:
    """Directed simple loop of T-graph edges inside the corridor of the
    scaled boundary image, winding once around the domain (positively by
    default)."""
    target = [linear_map(t.shape, z.real, z.imag) / delta for z in domain.boundary]
    width = corridor / delta
    wa = WalkArrays(t)
    dist = _polyline_distances(wa.pos, target)
    in_corridor = wa.valid & (dist <= width)
    if not in_corridor.any():
        raise ResolutionError("corridor contains no T-graph vertices")

    marked_img = linear_map(t.shape, domain.marked.real, domain.marked.imag) / delta
    seg_scale = t.mean_segment_length()
    spacing = max(0.7 * width, 2.0 * seg_scale)
    waypoints = _arc_points(target, spacing, marked_img)
    if clockwise:
        waypoints = [waypoints[0]] + waypoints[1:][::-1]

    corridor_idx = np.nonzero(in_corridor)[0]
    start_k = int(corridor_idx[np.argmin(np.abs(wa.pos[corridor_idx] - waypoints[0]))])

    def dijkstra(src: int, goal_test, a: complex, b: complex) -> list[int]:
        """Deterministic shortest directed path within the corridor, confined
        to an ellipse around the leg's endpoints (prevents shortcuts through
        the domain or the wrong way around)."""
        INF = math.inf
        # wide enough for detours at the graph's granularity, tight enough to
        # forbid going the wrong way around at macroscopic scales
        girth = max(2.2 * abs(b - a), abs(b - a) + 2.5 * width,
                    abs(b - a) + 7.0 * seg_scale)
        seen: dict[int, float] = {}
        prev: dict[int, int] = {}
        h = [(0.0, float(dist[src]), src)]
        seen[src] = 0.0
        while h:
            d0, _, k = heapq.heappop(h)
            if d0 > seen.get(k, INF):
                continue
            if goal_test(k) and k != src:
                path = [k]
                while path[-1] != src:
                    path.append(prev[path[-1]])
                return path[::-1]
            for nxt in (int(wa.tgt1[k]), int(wa.tgt2[k])):
                if not in_corridor[nxt]:
                    continue
                p = wa.pos[nxt]
                if abs(p - a) + abs(p - b) > girth:
                    continue
                nd = d0 + abs(p - wa.pos[k])
                if nd < seen.get(nxt, INF) - 1e-15:
                    seen[nxt] = nd
                    prev[nxt] = k
                    heapq.heappush(h, (nd, float(dist[nxt]), nxt))
        raise ResolutionError(
            "no directed path to the next waypoint; widen the corridor or "
            "decrease delta")

    walk = [start_k]
    r_goal = max(width / 4.0, 1.3 * seg_scale)
    for wp_i in range(1, len(waypoints) + 1):
        wp = waypoints[wp_i % len(waypoints)]
        if wp_i < len(waypoints):
            in_goal = np.abs(wa.pos - wp) <= r_goal

            def goal(k, in_goal=in_goal):
                return bool(in_goal[k])
        else:
            def goal(k):
                return k == start_k
        leg = dijkstra(walk[-1], goal, wa.pos[walk[-1]], wp)
        walk.extend(leg[1:])

    # Erase the walk's side loops but keep the revolution: pop a closed
    # sub-loop only when it does not wind around the domain; the sub-cycle
    # that winds once is the loop we want.
    centre = sum(target) / len(target)
    want = -1.0 if clockwise else 1.0

    def cycle_winding(idxs: list[int]) -> float:
        pts = [wa.pos[k] for k in idxs] + [wa.pos[idxs[0]]]
        tot = 0.0
        for a, b in zip(pts, pts[1:]):
            za, zb = a - centre, b - centre
            tot += math.atan2((za.conjugate() * zb).imag, (za.conjugate() * zb).real)
        return tot / (2.0 * math.pi)

    order: dict[int, int] = {}
    out: list[int] = []
    loop_idx: list[int] | None = None
    for k in walk:
        if k in order:
            cyc = out[order[k]:]
            w = cycle_winding(cyc)
            if abs(w - want) < 0.25:
                loop_idx = cyc
                break
            if abs(w) > 0.25:
                raise ResolutionError(
                    "walk closed a sub-loop with unexpected winding; widen the "
                    "corridor or decrease delta")
            for dropped in out[order[k] + 1:]:
                del order[dropped]
            del out[order[k] + 1:]
        else:
            order[k] = len(out)
            out.append(k)
    if loop_idx is None or len(loop_idx) < 3:
        raise ResolutionError("no simple cycle winding around the domain found")
    loop = [wa.coords(k) for k in loop_idx]

    _validate_loop(t, loop, target, width, clockwise=clockwise)
    return loop


def _validate_loop(t: TGraph, loop: list[DualVertex], target: list[complex],
                   width: float, clockwise: bool = False) -> None:
    pts = [t.position(v) for v in loop]
    if len(set(loop)) != len(loop):
        raise ConsistencyError("loop is not simple")
    for a, b in zip(loop, loop + [loop[0]]):
        if a == b:
            continue
        targets = [u for u, _ in t.out_edges(a)]
        if b not in targets:
            raise ConsistencyError(f"loop step {a}->{b} is not a directed T-edge")
    centre = sum(target) / len(target)
    wind = 0.0
    closed = pts + [pts[0]]
    for a, b in zip(closed, closed[1:]):
        za, zb = a - centre, b - centre
        wind += math.atan2((za.conjugate() * zb).imag, (za.conjugate() * zb).real)
    expected = -2 * math.pi if clockwise else 2 * math.pi
    if abs(wind - expected) > 1e-6:
        raise ResolutionError(
            f"loop winds {wind / (2 * math.pi):.2f} times around the domain; "
            f"expected exactly {'-1' if clockwise else '+1'}")


def loop_hausdorff(t: TGraph, loop: list[DualVertex],
                   domain: ContinuousDomain, delta: float) -> float:
    """Hausdorff distance between the traced loop and the scaled boundary
    image, in the scaled frame (multiply unscaled distances by delta)."""
    target = [linear_map(t.shape, z.real, z.imag) / delta for z in domain.boundary]
    pts = np.asarray([t.position(v) for v in loop])
    d1 = float(_polyline_distances(pts, target).max())
    total = sum(abs(b - a) for a, b in zip(target, target[1:] + target[:1]))
    samples = []
    n = len(target)
    step = total / max(64, 8 * len(pts))
    for k in range(n):
        a, b = target[k], target[(k + 1) % n]
        seg = abs(b - a)
        cnt = max(2, int(seg / step))
        for i in range(cnt):
            samples.append(a + (b - a) * i / cnt)
    samples = np.asarray(samples)
    loop_poly = [complex(p) for p in pts]
    d2 = float(_polyline_distances(samples, loop_poly).max())
    return delta * max(d1, d2)


# ---------------------------------------------------------------------------
# Escape path and assembly.


@dataclass
class DiscreteDomain:
    """Everything cut out of the T-graph for one continuous domain: the
    directed loop, the erased edge, the escape path, both hex vertex sets,
    and the wired walk domain."""

    delta: float
    loop: list[DualVertex]                 # loop[0] is the root
    escape: list[DualVertex]               # escape[0] == loop[0]
    erased_edge: tuple[DualVertex, DualVertex]
    marked_face: DualVertex
    removed_white: tuple[int, int]
    root_face: tuple[int, int]
    root_black: HexVertex
    u_whites: set[tuple[int, int]]         # whites strictly inside the loop
    u_blacks: set[tuple[int, int]]
    interior_duals: list[DualVertex]
    wired: WiredDomain
    path_successor: dict[DualVertex, DualVertex | None]
    marked_adjacent: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def whites(self) -> set[tuple[int, int]]:
        """White vertices of the dimer domain (after the removal)."""
        return self.u_whites - {self.removed_white}

    @property
    def blacks(self) -> set[tuple[int, int]]:
        return set(self.u_blacks)

    @property
    def boundary_faces(self) -> list[DualVertex]:
        return list(self.loop)

    def successor(self, v: DualVertex) -> DualVertex | None:
        return self.path_successor.get(v)


def _loop_int_polygon(loop: list[DualVertex]) -> list[tuple[int, int]]:
    return [int_position(v) for v in loop]


def build_escape(t: TGraph, loop: list[DualVertex], domain: ContinuousDomain,
                 delta: float) -> tuple[int, list[DualVertex]]:
    """Choose the loop root and trace the escape path to the window edge.

    The root's outgoing loop edge (the one later erased) must have its dual
    white face strictly inside the loop, and the root's other outgoing edge
    must leave the closed region; both hold for about half the loop vertices,
    so the search stays near the marked point.
    """
    poly = _loop_int_polygon(loop)
    loop_set = set(loop)
    marked_img = linear_map(t.shape, domain.marked.real, domain.marked.imag) / delta
    order = sorted(range(len(loop)), key=lambda k: abs(t.position(loop[k]) - marked_img))
    wa = WalkArrays(t)
    m0, m1, n0, n1 = t.window

    def at_rim(v: DualVertex) -> bool:
        return v.m <= m0 + 2 or v.m >= m1 - 2 or v.n <= n0 + 2 or v.n >= n1 - 2

    def strictly_outside(v: DualVertex) -> bool:
        return v not in loop_set and not point_in_int_polygon(int_position(v), poly)

    last_err = "no candidate roots"
    for k in order[: max(16, len(loop) // 4)]:
        z0 = loop[k]
        z1 = loop[(k + 1) % len(loop)]
        w_e = dual_edge_info(z0, z1).crossed.white
        if not point_in_int_polygon(int_position(w_e), poly):
            last_err = "erased edge's white face outside the loop"
            continue
        outs = [u for u, _ in t.out_edges(z0)]
        others = [u for u in outs if u != z1]
        if len(others) != 1:
            raise ConsistencyError(f"root {z0} has unexpected out-edges {outs}")
        z2 = others[0]
        if not strictly_outside(z2):
            last_err = "root's second edge does not leave the region"
            continue
        path = _escape_dijkstra(t, wa, z2, strictly_outside, at_rim)
        if path is not None:
            return k, [z0] + path
        last_err = "no escape route to the window edge"
    raise ResolutionError(f"could not build escape path: {last_err}")


def _escape_dijkstra(t: TGraph, wa: WalkArrays, src: DualVertex,
                     allowed, done) -> list[DualVertex] | None:
    src_k = wa.flat(src)
    seen: dict[int, float] = {src_k: 0.0}
    prev: dict[int, int] = {}
    h = [(0.0, src_k)]
    while h:
        d0, k = heapq.heappop(h)
        if d0 > seen.get(k, math.inf):
            continue
        v = wa.coords(k)
        if done(v):
            path = [k]
            while path[-1] != src_k:
                path.append(prev[path[-1]])
            return [wa.coords(q) for q in path[::-1]]
        if not wa.valid[k]:
            continue
        for nxt in (int(wa.tgt1[k]), int(wa.tgt2[k])):
            u = wa.coords(nxt)
            if not allowed(u):
                continue
            nd = d0 + abs(wa.pos[nxt] - wa.pos[k])
            if nd < seen.get(nxt, math.inf) - 1e-15:
                seen[nxt] = nd
                prev[nxt] = k
                heapq.heappush(h, (nd, nxt))
    return None


def assemble(t: TGraph, domain: ContinuousDomain, delta: float,
             loop: list[DualVertex], root_index: int,
             escape: list[DualVertex], corridor: float | None = None) -> DiscreteDomain:
    """Assemble the discrete domain from a traced loop and escape path."""
    loop = loop[root_index:] + loop[:root_index]
    z0, z1 = loop[0], loop[1]
    if escape[0] != z0:
        raise ConsistencyError("escape path must start at the loop root")
    poly = _loop_int_polygon(loop)
    loop_set = set(loop)

    # hexagonal vertices strictly inside the dual cycle
    ms = [v.m for v in loop]
    ns = [v.n for v in loop]
    u_whites: set[tuple[int, int]] = set()
    u_blacks: set[tuple[int, int]] = set()
    for m in range(min(ms) - 2, max(ms) + 3):
        for n in range(min(ns) - 2, max(ns) + 3):
            if point_in_int_polygon(int_position(HexVertex(m, n, WHITE)), poly):
                u_whites.add((m, n))
            if point_in_int_polygon(int_position(HexVertex(m, n, BLACK)), poly):
                u_blacks.add((m, n))

    e_dual = dual_edge_info(z0, z1)
    w_e, b_star = e_dual.crossed.white, e_dual.crossed.black
    w_in = (w_e.m, w_e.n) in u_whites
    b_in = (b_star.m, b_star.n) in u_blacks
    if w_in == b_in:
        raise TopologyError(
            "the erased edge's dual hex edge must have exactly one endpoint "
            f"inside the loop (white in: {w_in}, black in: {b_in})")
    if not w_in:
        raise TopologyError(
            "root selection violated: removed vertex would be black")

    # interior T-graph vertices: strictly inside, with all out-edges known
    interior: list[DualVertex] = []
    for m in range(min(ms), max(ms) + 1):
        for n in range(min(ns), max(ns) + 1):
            v = DualVertex(m, n)
            if v in loop_set:
                continue
            if point_in_int_polygon(int_position(v), poly):
                interior.append(v)
    wired = WiredDomain(t, interior)
    wired.check_root_reachable()
    for i, v in enumerate(wired.vertices):
        for u in wired.target_coords[i]:
            if u not in loop_set and u not in wired.index:
                raise ConsistencyError(
                    f"interior vertex {v} has an out-edge jumping past the loop to {u}")

    successor: dict[DualVertex, DualVertex | None] = {}
    for i in range(1, len(loop)):
        successor[loop[i]] = loop[(i + 1) % len(loop)]
    for a, b in zip(escape, escape[1:]):
        successor[a] = b
    successor[escape[-1]] = None
    for v in escape[1:]:
        if v in loop_set:
            raise ConsistencyError("escape path touches the loop after its start")

    hexagon = [HexVertex(z0.m, z0.n, BLACK), HexVertex(z0.m, z0.n, WHITE),
               HexVertex(z0.m - 1, z0.n + 1, BLACK), HexVertex(z0.m - 1, z0.n, WHITE),
               HexVertex(z0.m - 1, z0.n, BLACK), HexVertex(z0.m, z0.n - 1, WHITE)]
    removed = (w_e.m, w_e.n)
    marked_adjacent = any(
        ((h.m, h.n) in (u_whites if h.color == WHITE else u_blacks))
        and not (h.color == WHITE and (h.m, h.n) == removed)
        for h in hexagon)

    return DiscreteDomain(
        delta=delta,
        loop=loop,
        escape=escape,
        erased_edge=(z0, z1),
        marked_face=z0,
        removed_white=removed,
        root_face=removed,
        root_black=b_star,
        u_whites=u_whites,
        u_blacks=u_blacks,
        interior_duals=interior,
        wired=wired,
        path_successor=successor,
        marked_adjacent=marked_adjacent,
        diagnostics={"corridor": corridor},
    )


def build_domain(t: TGraph, domain: ContinuousDomain, delta: float,
                 corridor: float, clockwise: bool = False) -> DiscreteDomain:
    """Full pipeline: trace loop, choose root, build escape, assemble."""
    loop = trace_loop(t, domain, delta, corridor, clockwise=clockwise)
    root_index, escape = build_escape(t, loop, domain, delta)
    return assemble(t, domain, delta, loop, root_index, escape, corridor=corridor)


# ---------------------------------------------------------------------------
# Forests over an assembled domain.


class DomainForest:
    """Wired spanning forest of the interior plus the forced loop/escape
    path: the full out-edge structure needed by the dimer map."""

    def __init__(self, dd: DiscreteDomain, forest):
        if forest.domain is not dd.wired:
            raise ConsistencyError("forest was sampled on a different domain")
        self.dd = dd
        self.forest = forest

    def successor(self, v: DualVertex) -> DualVertex | None:
        i = self.dd.wired.index.get(v)
        if i is not None:
            return self.forest.successor_coords(v)
        if v in self.dd.path_successor:
            return self.dd.path_successor[v]
        raise ConnectivityError(f"{v} is neither interior nor on the forced path")

    def choices(self, t: TGraph):
        """(vertex, chosen, unchosen) for every vertex with a known out-edge;
        the root is skipped (its unchosen edge is the erased edge, handled as
        the dual root link)."""
        dd = self.dd
        out = []
        for i, v in enumerate(dd.wired.vertices):
            t0, t1 = dd.wired.target_coords[i]
            k = int(self.forest.choice[i])
            out.append((v, t0 if k == 0 else t1, t1 if k == 0 else t0))
        z0 = dd.loop[0]
        for v, nxt in dd.path_successor.items():
            if nxt is None or v == z0:
                continue
            targets = [u for u, _ in t.out_edges(v)]
            if nxt not in targets:
                raise ConsistencyError(f"forced step {v}->{nxt} is not a T-edge")
            other = targets[0] if targets[1] == nxt else targets[1]
            out.append((v, nxt, other))
        return out


def domain_matching(t: TGraph, df: DomainForest):
    """Matching of the dimer domain induced by the forest, via the dual
    forest oriented toward the erased edge's dual."""
    from .dimers import dual_forest_edges, orient_dual_forest

    dd = df.dd
    edges = dual_forest_edges(t, df.choices(t))
    odf = orient_dual_forest(edges, set(dd.u_whites), root_face=dd.root_face,
                             root_black=dd.root_black, strict=True)
    matching = odf.matching(exclude=dd.root_face)
    matching.check_perfect(dd.whites, dd.blacks)
    return matching, odf


def domain_heights(t: TGraph, df: DomainForest, matching, ref, verify: bool = False):
    """Heights on the domain's dual vertices (loop and interior), pinned at
    the marked boundary face.

    Uses the full-plane matching, i.e. the domain matching together with the
    pair carried by the erased edge, so that the integrand is divergence-free
    on the whole closed region.
    """
    from .dimers import Matching, height_from_flow

    dd = df.dd
    full = Matching(dict(matching.pairs))
    full.pairs[dd.root_face] = dd.root_black
    allowed = set(dd.interior_duals) | set(dd.loop)
    return height_from_flow(t, full, ref, dd.marked_face, set(dd.u_whites),
                            allowed=allowed, verify=verify)


def boundary_height_profile(t: TGraph, dd: DiscreteDomain) -> dict[DualVertex, float]:
    """Winding/2pi of the forced path between the marked face and each
    boundary face; equals h(face) - h(marked face) for any sampled matching."""
    from .dimers import _StubData, path_winding

    stubs = _StubData(t)
    out: dict[DualVertex, float] = {}
    for v in dd.boundary_faces:
        out[v] = path_winding(t, dd.successor, dd.marked_face, v, stubs) / (2.0 * math.pi)
    return out


def boundary_blacks(t: TGraph, dd: DiscreteDomain) -> set[tuple[int, int]]:
    """Blacks of the dimer domain whose segment's interior vertex lies on the
    loop rather than strictly inside (their segments share a stretch with
    the loop)."""
    out = set()
    for bmn in dd.blacks:
        v = t.segment(HexVertex(bmn[0], bmn[1], BLACK)).interior_vertex
        if v not in dd.wired.index:
            out.add(bmn)
    return out


def matching_weight_correction(t: TGraph, dd: DiscreteDomain, matching,
                               bblacks: set[tuple[int, int]] | None = None) -> float:
    """Boundary weight of a matching: the product of shared-segment lengths
    over the boundary blacks.

    The wired-tree measure maps to the dimer measure weighted by the shared
    lengths of the pairs at interior-vertex blacks; since the product over
    all pairs is configuration-independent (the length of a pair factors
    into a per-class constant and a per-white factor, and both are covered
    identically by every matching of the fixed region), multiplying each
    sampled matching's probability by this boundary product makes the law
    exactly uniform.
    """
    from .dimers import shared_segment_length

    if bblacks is None:
        bblacks = boundary_blacks(t, dd)
    w = 1.0
    for wmn, b in matching.pairs.items():
        if (b.m, b.n) in bblacks:
            w *= shared_segment_length(t, wmn, b)
    return w


def sample_domain_matchings(t: TGraph, dd: DiscreteDomain, n: int, seed: int,
                            uniform: bool = True):
    """Matching samples from the domain with importance weights.

    Each draw is a wired-tree sample mapped to its matching; with
    ``uniform=True`` the returned weights make the weighted empirical law the
    uniform dimer measure (self-normalized importance sampling), otherwise
    all weights are 1 (the raw tree-image law).
    """
    from .ust import wilson_wired

    bblacks = boundary_blacks(t, dd)
    out = []
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(n):
        f = wilson_wired(dd.wired, int(child.generate_state(1)[0]))
        df = DomainForest(dd, f)
        matching, _ = domain_matching(t, df)
        w = matching_weight_correction(t, dd, matching, bblacks) if uniform else 1.0
        out.append((matching, w, f))
    return out


# ---------------------------------------------------------------------------
# Independent vertex classification (segment/side route).


def classify_by_segments(t: TGraph, dd: DiscreteDomain) -> tuple[set, set]:
    """Re-derive the hex vertex sets from the T-graph geometry: whites by
    face-centroid containment in the loop polyline, blacks by the
    strictly-inside segment test or, for segments sharing a stretch with the
    loop, by the side of their single adjacent triangle."""
    loop_pts = [t.position(v) for v in dd.loop]
    loop_edges = set()
    for a, b in zip(dd.loop, dd.loop[1:] + dd.loop[:1]):
        loop_edges.add(frozenset((a, b)))

    whites: set[tuple[int, int]] = set()
    ms = [v.m for v in dd.loop]
    ns = [v.n for v in dd.loop]
    for m in range(min(ms) - 2, max(ms) + 3):
        for n in range(min(ns) - 2, max(ns) + 3):
            try:
                f = t.face(HexVertex(m, n, WHITE))
            except WindowError:
                continue
            if point_in_polygon(f.centroid, loop_pts):
                whites.add((m, n))

    blacks: set[tuple[int, int]] = set()
    for m in range(min(ms) - 2, max(ms) + 3):
        for n in range(min(ns) - 2, max(ns) + 3):
            try:
                seg = t.segment(HexVertex(m, n, BLACK))
            except WindowError:
                continue
            corners = seg.corners
            face_edges = [frozenset((corners[i], corners[(i + 1) % 3])) for i in range(3)]
            overlap = any(fe in loop_edges for fe in face_edges)
            if not overlap:
                ends = seg.endpoints
                pa, pb = t.position(ends[0]), t.position(ends[1])
                samples = [pa + (pb - pa) * s for s in (0.25, 0.5, 0.75)]
                if all(point_in_polygon(z, loop_pts) for z in samples):
                    blacks.add((m, n))
            else:
                # side with a single adjacent triangle = across the long edge
                far = dual_edge_info(seg.endpoints[0], seg.endpoints[1]).crossed.white
                if (far.m, far.n) in whites:
                    blacks.add((m, n))
    return whites, blacks
