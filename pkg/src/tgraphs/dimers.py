"""Tree-to-dimer correspondence and height machinery.

A spanning forest of a T-graph induces an oriented dual forest on the white
faces; each face's unique outgoing dual edge crosses one segment, matching
the face's white vertex to that segment's black vertex.  Heights are the
primitive of (matching flow - reference flow) rotated onto the dual lattice,
and height differences equal 1/2pi times the intrinsic winding of forest
paths (with perpendicular stubs at both ends).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConnectivityError,
    ConsistencyError,
    GeometryError,
    TopologyError,
)
from .hexlattice import (
    BLACK,
    NE_SW,
    NW_SE,
    VERTICAL,
    WHITE,
    WHITE_OFFSET,
    DualVertex,
    HexEdge,
    HexVertex,
    Window,
    black_face,
    dual_edge_info,
    dual_neighbors,
    hex_neighbors,
    white_face,
)
from .tgraph import TGraph

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Matchings.


@dataclass
class Matching:
    """Partial or perfect matching: white (m, n) -> black vertex."""

    pairs: dict[tuple[int, int], HexVertex]

    def black_of(self, m: int, n: int) -> HexVertex | None:
        return self.pairs.get((m, n))

    def contains_edge(self, e: HexEdge) -> bool:
        w = e.white
        return self.pairs.get((w.m, w.n)) == e.black

    def edge_class(self, m: int, n: int) -> str:
        b = self.pairs[(m, n)]
        off = (m - b.m, n - b.n)
        for cls, d in WHITE_OFFSET.items():
            if off == d:
                return cls
        raise ConsistencyError(f"matched pair w({m},{n})-{b} not adjacent")

    def as_edge_set(self) -> frozenset[HexEdge]:
        out = []
        for (m, n), b in self.pairs.items():
            w = HexVertex(m, n, WHITE)
            off = (m - b.m, n - b.n)
            cls = next(c for c, d in WHITE_OFFSET.items() if d == off)
            out.append(HexEdge(b.m, b.n, cls))
        return frozenset(out)

    def check_perfect(self, whites: set[tuple[int, int]],
                      blacks: set[tuple[int, int]]) -> None:
        """Every white in ``whites`` matched to an adjacent black in
        ``blacks``, each black covered exactly once."""
        used: set[tuple[int, int]] = set()
        for wmn in whites:
            b = self.pairs.get(wmn)
            if b is None:
                raise ConsistencyError(f"white {wmn} unmatched")
            if (b.m, b.n) not in blacks:
                raise ConsistencyError(f"white {wmn} matched outside region to {b}")
            if (b.m, b.n) in used:
                raise ConsistencyError(f"black {b} matched twice")
            w = HexVertex(wmn[0], wmn[1], WHITE)
            if b not in hex_neighbors(w):
                raise ConsistencyError(f"matched pair {w}-{b} not adjacent")
            used.add((b.m, b.n))
        if used != set(blacks):
            raise ConsistencyError(
                f"{len(blacks) - len(used)} black vertices uncovered")


# ---------------------------------------------------------------------------
# Reference and slope flows.


class SlopeFlow:
    """Reference flow constant on each edge class: p_a on vertical, p_b on
    ne-sw, p_c on nw-se edges; divergence +1/-1 automatically."""

    def __init__(self, p_a: float, p_b: float, p_c: float):
        if abs(p_a + p_b + p_c - 1.0) > 1e-12:
            raise GeometryError("slope flow weights must sum to 1")
        self.values = {VERTICAL: p_a, NE_SW: p_b, NW_SE: p_c}

    def edge(self, e: HexEdge) -> float:
        return self.values[e.cls]


class ReferenceFlow:
    """Geometric reference flow of a T-graph.

    For adjacent (w, b), the value is (theta_1 + theta_2)/2pi where theta_i
    is the angle at the i-th endpoint of the shared T-graph edge between the
    segment of b and the segment containing that endpoint in its interior,
    measured in the wedge pointing at the face of w (equivalently, its
    vertical opposite).  Divergence is +1 at every white and -1 at every
    black vertex.
    """

    def __init__(self, t: TGraph):
        self.t = t
        M, N = t.theta.shape
        psi = t.psi

        def shift(arr, dm, dn):
            out = np.full(arr.shape, np.nan, dtype=arr.dtype)
            src_i = slice(max(dm, 0), M + min(dm, 0))
            src_j = slice(max(dn, 0), N + min(dn, 0))
            dst_i = slice(max(-dm, 0), M + min(-dm, 0))
            dst_j = slice(max(-dn, 0), N + min(-dn, 0))
            out[dst_i, dst_j] = arr[src_i, src_j]
            return out

        psi_10 = shift(psi, 1, 0)
        psi_01 = shift(psi, 0, 1)
        centroid = (psi + psi_10 + psi_01) / 3.0

        vdir_00 = t.vertex_dir
        vdir_10 = shift(t.vertex_dir, 1, 0)
        vdir_01 = shift(t.vertex_dir, 0, 1)
        vpos = {(0, 0): psi, (1, 0): psi_10, (0, 1): psi_01}
        vdir = {(0, 0): vdir_00, (1, 0): vdir_10, (0, 1): vdir_01}
        cont_m = np.where(t.vertex_valid,
                          t.vertex_face_dm + np.arange(M)[:, None], np.nan)
        cont_n = np.where(t.vertex_valid,
                          t.vertex_face_dn + np.arange(N)[None, :], np.nan)
        vface = {(0, 0): (cont_m, cont_n),
                 (1, 0): (shift(cont_m, 1, 0), shift(cont_n, 1, 0)),
                 (0, 1): (shift(cont_m, 0, 1), shift(cont_n, 0, 1))}

        mm = np.arange(M)[:, None] + np.zeros((1, N), dtype=np.int64)
        nn = np.arange(N)[None, :] + np.zeros((M, 1), dtype=np.int64)

        def side_angle(endpoint, seg_dm, seg_dn):
            """theta at one endpoint of the side lying on segment
            (m + seg_dm, n + seg_dn), for the face of white (m, n)."""
            useg = shift(t.face_dir, seg_dm, seg_dn)
            a_seg = np.angle(useg)
            uv = vdir[endpoint]
            d = np.mod(np.angle(uv) - a_seg, math.pi)
            cdir = centroid - vpos[endpoint]
            c_rel = np.mod(np.angle(cdir) - a_seg, math.pi)
            # the wedge on the side away from the face: complement of the
            # wedge the face's centroid falls in
            theta = np.where(c_rel < d, math.pi - d, d)
            fm, fn = vface[endpoint]
            same = (fm == (mm + seg_dm)) & (fn == (nn + seg_dn))
            return np.where(same, 0.0, theta)

        # side on the segment of b(m, n): endpoints (m, n) and (m+1, n)
        phi_a = (side_angle((0, 0), 0, 0) + side_angle((1, 0), 0, 0)) / TWO_PI
        # side on the segment of b(m, n+1): endpoints (m+1, n) and (m, n+1)
        phi_b = (side_angle((1, 0), 0, 1) + side_angle((0, 1), 0, 1)) / TWO_PI
        # side on the segment of b(m-1, n+1): endpoints (m, n+1) and (m, n)
        phi_c = (side_angle((0, 1), -1, 1) + side_angle((0, 0), -1, 1)) / TWO_PI

        self.phi = {VERTICAL: phi_a, NE_SW: phi_b, NW_SE: phi_c}
        self.valid = (np.isfinite(phi_a) & np.isfinite(phi_b) & np.isfinite(phi_c))

    def at_white(self, m: int, n: int, cls: str) -> float:
        i, j = self.t.index(m, n)
        val = self.phi[cls][i, j]
        if not np.isfinite(val):
            raise GeometryError(f"reference flow unavailable at white ({m},{n})")
        return float(val)

    def edge(self, e: HexEdge) -> float:
        w = e.white
        return self.at_white(w.m, w.n, e.cls)

    def white_divergence(self) -> np.ndarray:
        return self.phi[VERTICAL] + self.phi[NE_SW] + self.phi[NW_SE]

    def black_divergence(self) -> np.ndarray:
        """Sum of phi(w b) over the three whites of each black (target 1)."""
        M, N = self.phi[VERTICAL].shape
        out = np.full((M, N), np.nan)
        a = self.phi[VERTICAL]
        b = self.phi[NE_SW]
        c = self.phi[NW_SE]
        # black (m, n): whites (m, n) [a], (m, n-1) [b], (m+1, n-1) [c]
        out[: M - 1, 1:] = a[: M - 1, 1:] + b[: M - 1, : N - 1] + c[1:, : N - 1]
        return out


def reference_flow(t: TGraph) -> ReferenceFlow:
    return ReferenceFlow(t)


def slope_flow(p_a: float, p_b: float, p_c: float) -> SlopeFlow:
    return SlopeFlow(p_a, p_b, p_c)


# ---------------------------------------------------------------------------
# Oriented dual forests and the matching map.


@dataclass
class DualForestEdge:
    face_a: tuple[int, int] | None   # white coords; None = outside/root side
    face_b: tuple[int, int] | None
    black: HexVertex                 # segment the edge crosses
    owner: DualVertex                # vertex whose unchosen out-edge this is


@dataclass
class OrientedDualForest:
    """Out-edge per interior face: (crossed black, next face or None)."""

    out: dict[tuple[int, int], tuple[HexVertex, tuple[int, int] | None]]
    root_face: tuple[int, int] | None  # only for wired-domain contexts

    def matching(self, exclude: tuple[int, int] | None = None) -> Matching:
        pairs: dict[tuple[int, int], HexVertex] = {}
        used: set[tuple[int, int]] = set()
        for face, (blk, _nxt) in self.out.items():
            if exclude is not None and face == exclude:
                continue
            key = (blk.m, blk.n)
            if key in used:
                raise ConsistencyError(f"black {blk} matched twice")
            used.add(key)
            pairs[face] = blk
        return Matching(pairs)


def dual_forest_edges(t: TGraph, choices) -> list[DualForestEdge]:
    """Dual edges of the non-tree T-graph edges.

    ``choices`` yields (v, chosen_target, other_target) for every vertex with
    a known out-edge; each contributes the dual edge crossing the unchosen
    half-segment, between the face sharing the short dual edge (v, other) and
    the face across the segment (sharing the long edge (other, chosen)).
    """
    edges = []
    for v, chosen, other in choices:
        near = dual_edge_info(v, other).crossed.white
        far = dual_edge_info(other, chosen).crossed.white
        blk = t.containing_segment(v)
        edges.append(DualForestEdge((near.m, near.n), (far.m, far.n), blk, v))
    return edges


def orient_dual_forest(edges: list[DualForestEdge],
                       interior: set[tuple[int, int]],
                       root_face: tuple[int, int] | None = None,
                       root_black: HexVertex | None = None,
                       strict: bool = False) -> OrientedDualForest:
    """Orient the dual forest toward the root.

    With ``root_face`` set, all faces point toward it (wired-domain case,
    where the root face carries the erased edge's dual toward the exterior).
    Otherwise every component is oriented toward its first contact with the
    glued outside region, BFS order, which realizes one admissible choice of
    end per component.  ``strict`` forbids inside/outside dual edges (their
    presence then indicates a broken domain decomposition).
    """
    adj: dict[tuple[int, int], list[tuple[tuple[int, int] | None, HexVertex]]] = {
        f: [] for f in interior}
    boundary_links: list[tuple[tuple[int, int], HexVertex]] = []
    for e in sorted(edges, key=lambda e: (e.face_a or (10**9, 0), e.face_b or (10**9, 0),
                                          (e.black.m, e.black.n))):
        a_in = e.face_a in interior
        b_in = e.face_b in interior
        if a_in and b_in:
            adj[e.face_a].append((e.face_b, e.black))
            adj[e.face_b].append((e.face_a, e.black))
        elif a_in or b_in:
            if strict:
                raise TopologyError(
                    f"dual edge {e} links inside and outside; decomposition broken")
            boundary_links.append((e.face_a if a_in else e.face_b, e.black))

    out: dict[tuple[int, int], tuple[HexVertex, tuple[int, int] | None]] = {}

    def flood(start: tuple[int, int]) -> None:
        queue: deque[tuple[int, int]] = deque([start])
        while queue:
            f = queue.popleft()
            for g, blk in adj[f]:
                if g not in out:
                    out[g] = (blk, f)
                    queue.append(g)

    if root_face is not None:
        if root_face not in interior:
            raise TopologyError(f"root face {root_face} is not interior")
        if root_black is None:
            raise TopologyError("root_black required with root_face")
        out[root_face] = (root_black, None)
        flood(root_face)
    else:
        # one exit per component: later links into an already-flooded
        # component stay unused
        for f, blk in boundary_links:
            if f not in out:
                out[f] = (blk, None)
                flood(f)
    missing = set(interior) - set(out)
    if missing:
        raise ConnectivityError(
            f"{len(missing)} faces unreachable in the dual forest, e.g. "
            f"{sorted(missing)[:5]}")
    return OrientedDualForest(out, root_face)


# offset of the crossed hex edge's white vertex relative to the tail of a
# directed dual edge, keyed by the step (dm, dn)
_NEAR_WHITE_OFFSET = {
    (1, 0): (0, 0), (-1, 0): (-1, 0),
    (0, 1): (0, 0), (0, -1): (0, -1),
    (-1, 1): (-1, 0), (1, -1): (0, -1),
}


def window_matching_arrays(t: TGraph, domain_mask: np.ndarray,
                           choice_grid: np.ndarray):
    """Vectorized tree-to-matching for a wired window.

    ``domain_mask`` marks the wired vertices on the T-graph grid and
    ``choice_grid`` their chosen out-edge index.  Returns (interior_face_mask,
    match_dm, match_dn) on the grid: for every interior white face (m, n) the
    offset of its matched black.
    """
    M, N = t.theta.shape
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")

    def off_to_near(dm, dn):
        out_m = np.zeros_like(dm)
        out_n = np.zeros_like(dn)
        for (sm, sn), (am, an) in _NEAR_WHITE_OFFSET.items():
            sel = (dm == sm) & (dn == sn)
            out_m[sel] = am
            out_n[sel] = an
        return out_m, out_n

    D = domain_mask
    k = np.where(D, choice_grid, 0).astype(np.int64)
    tg = t.vertex_targets  # (M, N, choice, (dm, dn))
    cdm = tg[ii, jj, k, 0]
    cdn = tg[ii, jj, k, 1]
    udm = tg[ii, jj, 1 - k, 0]
    udn = tg[ii, jj, 1 - k, 1]

    # near face: white of the dual edge (v -> unchosen target)
    nm_off, nn_off = off_to_near(udm, udn)
    near_i, near_j = ii + nm_off, jj + nn_off
    # far face: white of the dual edge (unchosen -> chosen), relative to the
    # unchosen endpoint
    fdm, fdn = cdm - udm, cdn - udn
    fm_off, fn_off = off_to_near(fdm, fdn)
    far_i, far_j = ii + udm + fm_off, jj + udn + fn_off
    # matched black: the containing segment of v
    blk_i = ii + t.vertex_face_dm.astype(np.int64)
    blk_j = jj + t.vertex_face_dn.astype(np.int64)

    # interior faces: corners and the interior vertices of the three adjacent
    # segments all belong to the domain
    Dp = np.zeros((M + 2, N + 2), dtype=bool)
    Dp[1:-1, 1:-1] = D

    def dshift(di, dj):
        return Dp[1 + di: M + 1 + di, 1 + dj: N + 1 + dj]

    # interior corner coordinates of black face (p, q), as grid offsets
    ic = t.face_interior.astype(np.int64)
    ic_i = np.where(ic == 0, ii, ii + 1)
    ic_j = np.where(ic == 0, jj, np.where(ic == 1, jj - 1, jj))
    ic_in = np.zeros((M, N), dtype=bool)
    ok = (ic >= 0) & (ic_i >= 0) & (ic_i < M) & (ic_j >= 0) & (ic_j < N)
    ic_in[ok] = D[ic_i[ok], ic_j[ok]]

    def icshift(di, dj):
        out = np.zeros((M, N), dtype=bool)
        src_i = slice(max(di, 0), M + min(di, 0))
        src_j = slice(max(dj, 0), N + min(dj, 0))
        dst_i = slice(max(-di, 0), M + min(-di, 0))
        dst_j = slice(max(-dj, 0), N + min(-dj, 0))
        out[dst_i, dst_j] = ic_in[src_i, src_j]
        return out

    interior = (D & dshift(1, 0) & dshift(0, 1)
                & ic_in & icshift(0, 1) & icshift(-1, 1))

    # dual-forest edges from domain vertices, as flat face ids (-1 off-grid)
    vi, vj = np.nonzero(D)

    def flat_ids(fi, fj):
        a, b = fi[vi, vj], fj[vi, vj]
        valid = (a >= 0) & (a < M) & (b >= 0) & (b < N)
        return np.where(valid, a * N + b, -1)

    ninf = flat_ids(near_i, near_j)
    finf = flat_ids(far_i, far_j)
    bim = blk_i[vi, vj]
    bjn = blk_j[vi, vj]
    IFlat = interior.ravel()

    def face_in(flat):
        out = np.zeros(flat.shape, dtype=bool)
        okk = flat >= 0
        out[okk] = IFlat[flat[okk]]
        return out

    a_in = face_in(ninf)
    b_in = face_in(finf)

    order = np.lexsort((bjn, bim, finf, ninf))
    match = np.full(M * N, -1, dtype=np.int64)  # flat black grid id per face

    from collections import deque

    boundary_links: list[tuple[int, int]] = []
    adj_src: list[int] = []
    adj_dst: list[int] = []
    adj_blk: list[int] = []
    for e in order:
        na, fa = int(ninf[e]), int(finf[e])
        blk = int(bim[e] * N + bjn[e])
        ain, bin_ = bool(a_in[e]), bool(b_in[e])
        if ain and bin_:
            adj_src.append(na), adj_dst.append(fa), adj_blk.append(blk)
            adj_src.append(fa), adj_dst.append(na), adj_blk.append(blk)
        elif ain or bin_:
            boundary_links.append((na if ain else fa, blk))
    if adj_src:
        src = np.asarray(adj_src)
        dst = np.asarray(adj_dst)
        blkl = np.asarray(adj_blk)
        o2 = np.argsort(src, kind="stable")
        src, dst, blkl = src[o2], dst[o2], blkl[o2]
        indptr = np.searchsorted(src, np.arange(M * N + 1))
    else:
        dst = blkl = np.zeros(0, dtype=np.int64)
        indptr = np.zeros(M * N + 1, dtype=np.int64)

    # One exit per dual component: flood each component完 from its first
    # boundary link before considering the next, so that every in-component
    # edge becomes someone's outgoing edge (a second exit would leave the
    # edge where two waves meet unused and its black unmatched).
    queue: deque[int] = deque()
    for f0, blk0 in boundary_links:
        if match[f0] >= 0:
            continue
        match[f0] = blk0
        queue.append(f0)
        while queue:
            f = queue.popleft()
            for pos in range(indptr[f], indptr[f + 1]):
                g = int(dst[pos])
                if match[g] < 0:
                    match[g] = int(blkl[pos])
                    queue.append(g)

    unreached = IFlat & (match < 0)
    if unreached.any():
        raise ConnectivityError(
            f"{int(unreached.sum())} faces unreachable in the dual forest")
    match_grid = match.reshape(M, N)
    match_dm = np.where(interior, match_grid // N - ii, 0)
    match_dn = np.where(interior, match_grid % N - jj, 0)
    return interior, match_dm, match_dn


def window_forest_choices(forest) -> list[tuple[DualVertex, DualVertex, DualVertex]]:
    """(vertex, chosen, unchosen) triples of a wired-window forest."""
    dom = forest.domain
    out = []
    for i, v in enumerate(dom.vertices):
        k = int(forest.choice[i])
        t0, t1 = dom.target_coords[i]
        out.append((v, (t0 if k == 0 else t1), (t1 if k == 0 else t0)))
    return out


def window_interior_faces(t: TGraph, domain) -> set[tuple[int, int]]:
    """Faces all of whose bounding half-segments have a known forest status:
    the three corners and the interior vertices of the three adjacent
    segments all belong to the domain."""
    inside = set(domain.index)
    faces: set[tuple[int, int]] = set()
    for (m, n) in inside:
        for (fm, fn) in ((m, n), (m - 1, n), (m, n - 1)):
            if (fm, fn) in faces:
                continue
            corners = white_face(fm, fn)
            if not all((c.m, c.n) in inside for c in corners):
                continue
            ok = True
            for blk in hex_neighbors(HexVertex(fm, fn, WHITE)):
                try:
                    seg = t.segment(blk)
                except Exception:
                    ok = False
                    break
                iv = seg.interior_vertex
                if (iv.m, iv.n) not in inside:
                    ok = False
                    break
            if ok:
                faces.add((fm, fn))
    return faces


def tree_to_matching_window(t: TGraph, forest) -> tuple[Matching, set[tuple[int, int]]]:
    """Matching of a wired-window forest, with each dual component oriented
    toward its first contact with the glued exterior.  Returns the matching
    on the interior faces and the interior-face set."""
    M, N = t.theta.shape
    dom = forest.domain
    dmask = np.zeros((M, N), dtype=bool)
    cgrid = np.zeros((M, N), dtype=np.int8)
    for idx, v in enumerate(dom.vertices):
        i, j = t.index(v.m, v.n)
        dmask[i, j] = True
        cgrid[i, j] = forest.choice[idx]
    interior, mdm, mdn = window_matching_arrays(t, dmask, cgrid)
    m0, n0 = t.window.m0, t.window.n0
    pairs = {}
    for i, j in zip(*np.nonzero(interior)):
        pairs[(m0 + i, n0 + j)] = HexVertex(m0 + i + int(mdm[i, j]),
                                            n0 + j + int(mdn[i, j]), BLACK)
    faces = {(m0 + i, n0 + j) for i, j in zip(*np.nonzero(interior))}
    return Matching(pairs), faces


# ---------------------------------------------------------------------------
# Heights.


@dataclass
class HeightFunction:
    values: dict[DualVertex, float]
    base: DualVertex

    def __getitem__(self, v: DualVertex) -> float:
        return self.values[v]

    def __contains__(self, v: DualVertex) -> bool:
        return v in self.values


def flow_primitive(t: TGraph, edge_value, base: DualVertex,
                   known_whites: set[tuple[int, int]],
                   allowed: set[DualVertex] | None = None,
                   verify: bool = False, tol: float = 1e-10) -> HeightFunction:
    """Primitive of an antisymmetric edge function rotated onto the dual
    lattice, pinned to 0 at ``base``.

    Integration uses only dual edges whose crossed hex edge has its white
    vertex in ``known_whites``; when ``allowed`` is given, it additionally
    stays inside that dual-vertex set (needed on domains whose complement
    contains vertices where the integrand is not divergence-free).
    """

    def usable(info) -> bool:
        w = info.crossed.white
        return (w.m, w.n) in known_whites

    # Crossing with the white vertex on the right is the positive gradient
    # direction; with this chirality the exact identity reads
    # h(v') - h(v) = +winding/2pi.
    def grad(info) -> float:
        return -info.white_sign * edge_value(info.crossed)

    values: dict[DualVertex, float] = {base: 0.0}
    queue: deque[DualVertex] = deque([base])
    while queue:
        x = queue.popleft()
        for y in dual_neighbors(x):
            if y in values or not t.window.contains(y.m, y.n):
                continue
            if allowed is not None and y not in allowed:
                continue
            info = dual_edge_info(x, y)
            if not usable(info):
                continue
            values[y] = values[x] + grad(info)
            queue.append(y)
    if base not in values:
        raise ConnectivityError("base vertex not in height region")
    if verify:
        worst = 0.0
        for x, hx in values.items():
            for y in dual_neighbors(x):
                if y not in values:
                    continue
                info = dual_edge_info(x, y)
                if usable(info):
                    worst = max(worst, abs(values[y] - hx - grad(info)))
        if worst > tol:
            raise ConsistencyError(
                f"height residual {worst:.3e} exceeds {tol:.1e}: "
                "the integrand has non-zero circulation")
    return HeightFunction(values, base)


def height_from_flow(t: TGraph, matching: Matching, ref, base: DualVertex,
                     known_whites: set[tuple[int, int]],
                     allowed: set[DualVertex] | None = None,
                     verify: bool = False, tol: float = 1e-10) -> HeightFunction:
    """Height function of a matching: primitive of (matching flow minus
    reference flow), pinned to 0 at ``base``."""

    def edge_value(e: HexEdge) -> float:
        phi_m = 1.0 if matching.contains_edge(e) else 0.0
        return phi_m - ref.edge(e)

    return flow_primitive(t, edge_value, base, known_whites, allowed=allowed,
                          verify=verify, tol=tol)


def window_heights(t: TGraph, forest, matching: Matching,
                   faces: set[tuple[int, int]], base: DualVertex,
                   margin: int = 3, verify: bool = False) -> HeightFunction:
    """Heights of a wired-window matching on the margin-shrunk window.

    The shrunk region keeps every enclosed hex vertex matched exactly once
    (whites by the matching, blacks through their interior vertex belonging
    to the wired domain), which makes the integrand divergence-free there.
    """
    dom = forest.domain
    ms = [v.m for v in dom.vertices]
    ns = [v.n for v in dom.vertices]
    safe = Window(min(ms) + margin, max(ms) - margin,
                  min(ns) + margin, max(ns) - margin)
    allowed = {v for v in dom.vertices if safe.contains(v.m, v.n)}
    known = {w for w in faces if safe.contains(*w)}
    ref = ReferenceFlow(t)
    return height_from_flow(t, matching, ref, base, known, allowed=allowed,
                            verify=verify)


# ---------------------------------------------------------------------------
# Tree paths and intrinsic winding.


@dataclass
class TreePath:
    vertices: list[DualVertex]
    points: list[complex]  # stub, psi(vertices...), stub


def incoming_side(t: TGraph, v: DualVertex) -> int:
    """Sign of the side of v's segment from which its two incoming T-graph
    edges arrive (+1 means the side of i * direction)."""
    i, j = t.index(v.m, v.n)
    role = int(t.vertex_role[i, j])
    if role < 0:
        raise GeometryError(f"no walk data at {v}")
    u = complex(t.vertex_dir[i, j])
    pv = t.position(v)
    cand = {0: (v.m, v.n), 1: (v.m - 1, v.n + 1), 2: (v.m - 1, v.n)}
    signs = []
    for r, (fm, fn) in cand.items():
        if r == role:
            continue
        fi, fj = t.index(fm, fn)
        idx = int(t.face_interior[fi, fj])
        corner = black_face(fm, fn)[idx]
        s = (u.conjugate() * (t.position(corner) - pv)).imag
        if abs(s) < 1e-12:
            raise GeometryError(f"degenerate incoming edge at {v}")
        signs.append(1 if s > 0 else -1)
    if signs[0] != signs[1]:
        raise GeometryError(f"incoming edges of {v} on both sides of its segment")
    return signs[0]


def tree_path(t: TGraph, successor, v: DualVertex, v2: DualVertex,
              stub_scale: float | None = None,
              max_len: int = 1_000_000) -> TreePath:
    """Unique forest path between v and v2, with the perpendicular stubs that
    enter the winding: the start stub on the side of the incoming edges, the
    end stub on the opposite side."""
    if stub_scale is None:
        stub_scale = 0.3 * t.mean_segment_length()
    if v == v2:
        verts = [v]
    else:
        anc: dict[DualVertex, int] = {v: 0}
        chain = [v]
        u = v
        while len(chain) < max_len:
            u = successor(u)
            if u is None:
                break
            chain.append(u)
            anc[u] = len(chain) - 1
            if u == v2:
                break
        chain2 = [v2]
        u = v2
        while u not in anc and len(chain2) < max_len:
            u = successor(u)
            if u is None:
                raise ConnectivityError(
                    f"{v} and {v2} meet only at the root; no forest path")
            chain2.append(u)
        join = anc[chain2[-1]]
        verts = chain[: join + 1] + list(reversed(chain2[:-1]))
    pts = [t.position(x) for x in verts]
    for a, b in zip(pts, pts[1:]):
        if a == b:
            raise GeometryError("zero-length step in tree path")
    s0 = incoming_side(t, verts[0])
    i0, j0 = t.index(verts[0].m, verts[0].n)
    u0 = complex(t.vertex_dir[i0, j0])
    s1 = incoming_side(t, verts[-1])
    i1, j1 = t.index(verts[-1].m, verts[-1].n)
    u1 = complex(t.vertex_dir[i1, j1])
    start_stub = pts[0] + 1j * s0 * u0 * stub_scale
    end_stub = pts[-1] - 1j * s1 * u1 * stub_scale
    return TreePath(verts, [start_stub] + pts + [end_stub])


def winding(points: list[complex]) -> float:
    """Sum of signed turning angles along a polyline, each in (-pi, pi)."""
    if len(points) < 3:
        return 0.0
    total = 0.0
    for k in range(1, len(points) - 1):
        d1 = points[k] - points[k - 1]
        d2 = points[k + 1] - points[k]
        if d1 == 0 or d2 == 0:
            raise GeometryError("zero-length polyline step")
        z = d2 / d1
        total += math.atan2(z.imag, z.real)
    return total


class _StubData:
    """Cached per-vertex stub geometry (segment direction, incoming side)."""

    def __init__(self, t: TGraph):
        self.t = t
        self.cache: dict[DualVertex, tuple[complex, int]] = {}

    def get(self, v: DualVertex) -> tuple[complex, int]:
        got = self.cache.get(v)
        if got is None:
            i, j = self.t.index(v.m, v.n)
            got = (complex(self.t.vertex_dir[i, j]), incoming_side(self.t, v))
            self.cache[v] = got
        return got


def edge_winding(t: TGraph, v: DualVertex, v2: DualVertex,
                 stubs: _StubData | None = None) -> float:
    """Intrinsic winding of the single forest edge v -> v2 with its two
    perpendicular stubs: the building block of path windings."""
    if stubs is None:
        stubs = _StubData(t)
    u1, s1 = stubs.get(v)
    u2, s2 = stubs.get(v2)
    d0 = -1j * s1 * u1
    d1 = t.position(v2) - t.position(v)
    d2 = -1j * s2 * u2
    z1 = d1 / d0
    z2 = d2 / d1
    return math.atan2(z1.imag, z1.real) + math.atan2(z2.imag, z2.real)


def path_winding(t: TGraph, successor, v: DualVertex, v2: DualVertex,
                 stubs: _StubData | None = None, max_len: int = 1_000_000) -> float:
    """Intrinsic winding of the forest path from v to v2, accumulated edge by
    edge so that additivity and antisymmetry hold exactly (the raw polyline
    turning can be off by full turns at junctions where a branch reverses)."""
    if stubs is None:
        stubs = _StubData(t)
    if v == v2:
        return 0.0
    anc: dict[DualVertex, float] = {v: 0.0}
    acc = 0.0
    u = v
    for _ in range(max_len):
        nxt = successor(u)
        if nxt is None:
            break
        acc += edge_winding(t, u, nxt, stubs)
        u = nxt
        anc[u] = acc
        if u == v2:
            return acc
    acc2 = 0.0
    u = v2
    for _ in range(max_len):
        if u in anc:
            return anc[u] - acc2
        nxt = successor(u)
        if nxt is None:
            raise ConnectivityError(f"{v} and {v2} meet only at the root; no forest path")
        acc2 += edge_winding(t, u, nxt, stubs)
        u = nxt
    raise ConnectivityError("path length cap exceeded")


def verify_height_winding(t: TGraph, successor, heights: HeightFunction,
                          pairs: list[tuple[DualVertex, DualVertex]],
                          stub_scale: float | None = None) -> dict:
    """Max discrepancy |h(v') - h(v) - W/2pi| over the given pairs."""
    worst = 0.0
    details = []
    stubs = _StubData(t)
    for v, v2 in pairs:
        w = path_winding(t, successor, v, v2, stubs)
        dh = heights[v2] - heights[v]
        disc = abs(dh - w / TWO_PI)
        details.append({"v": v, "v2": v2, "dh": dh, "winding": w, "disc": disc})
        worst = max(worst, disc)
    return {"max_discrepancy": worst, "pairs": details}


def shared_segment_length(t: TGraph, wmn: tuple[int, int], b: HexVertex) -> float:
    """Length of the common boundary of the face of white (m, n) and the
    segment of b in the T-graph; the weight the tree correspondence attaches
    to the matched pair."""
    wf = white_face(*wmn)
    bf = black_face(b.m, b.n)
    shared = [c for c in wf if c in bf]
    if len(shared) != 2:
        raise GeometryError(f"white {wmn} and {b} do not share a side")
    return abs(t.position(shared[0]) - t.position(shared[1]))


# ---------------------------------------------------------------------------
# Exact perfect-matching oracle for tiny regions.


def brute_force_matchings(whites: set[tuple[int, int]],
                          blacks: set[tuple[int, int]],
                          cap: int = 100_000) -> list[frozenset]:
    """All perfect matchings of the hex subgraph on the given vertices, each
    as a frozenset of ((wm, wn), (bm, bn)) pairs."""
    whites_left = sorted(whites)
    if len(whites_left) != len(blacks):
        return []
    nbrs = {}
    for wmn in whites_left:
        w = HexVertex(wmn[0], wmn[1], WHITE)
        nbrs[wmn] = [(b.m, b.n) for b in hex_neighbors(w) if (b.m, b.n) in blacks]
    out: list[frozenset] = []
    used: set[tuple[int, int]] = set()
    pairs: list[tuple] = []

    def rec():
        if len(out) > cap:
            raise ConsistencyError("matching enumeration cap exceeded")
        remaining = [wmn for wmn in whites_left if not any(p[0] == wmn for p in pairs)]
        if not remaining:
            out.append(frozenset(pairs))
            return
        # most constrained white first
        wmn = min(remaining, key=lambda x: sum(1 for b in nbrs[x] if b not in used))
        for b in nbrs[wmn]:
            if b in used:
                continue
            used.add(b)
            pairs.append((wmn, b))
            rec()
            pairs.pop()
            used.remove(b)

    rec()
    return out
