import math

import numpy as np
import pytest

from tgraphs import (
    Twist,
    Window,
    build_tgraph,
    build_triangle,
    check_nondegenerate,
    embed_hex,
    linear_map,
    translate_twist,
)
from tgraphs.errors import SlopeError
from tgraphs.hexlattice import (BLACK, WHITE, DualVertex, HexVertex,
                                face_boundary, hex_neighbors, white)
from tgraphs.tgraph import TGraph


def test_build_triangle_equilateral():
    sh = build_triangle(1 / 3, 1 / 3, 1 / 3)
    s = math.sin(math.pi / 3)
    for side in (sh.alpha, sh.beta, sh.gamma):
        assert abs(abs(side) - s) < 1e-12
    assert abs(sh.alpha + sh.beta + sh.gamma) < 1e-12


def test_build_triangle_right_angle():
    sh = build_triangle(0.5, 0.25, 0.25)
    # angle at A between AB and AC
    u = sh.B - sh.A
    v = sh.C - sh.A
    ang = abs(math.atan2((u.conjugate() * v).imag, (u.conjugate() * v).real))
    assert abs(ang - math.pi / 2) < 1e-9


def test_build_triangle_rejects_bad_slopes():
    with pytest.raises(SlopeError):
        build_triangle(0.5, 0.5, 0.1)
    with pytest.raises(SlopeError):
        build_triangle(1.0, -0.2, 0.2)


def test_flow_base_values():
    sh = build_triangle(1 / 3, 1 / 3, 1 / 3)
    t1 = build_tgraph(sh, Twist(1 + 0j), Window.centered(3), check=False)
    assert abs(t1.flow(white(0, 0), HexVertex(0, 0, BLACK)) - sh.alpha) < 1e-12
    ti = build_tgraph(sh, Twist(1j), Window.centered(3), check=False)
    assert abs(ti.flow(white(0, 0), HexVertex(0, 0, BLACK))) < 1e-12


def test_flow_antisymmetry_and_circulation(t_sc, rng):
    for _ in range(100):
        m, n = (int(x) for x in rng.integers(-25, 24, 2))
        w = white(m, n)
        for b in hex_neighbors(w):
            assert abs(t_sc.flow(w, b) + t_sc.flow(b, w)) < 1e-14
        for color in (WHITE, BLACK):
            s = sum(t_sc.dual_flow(de.tail, de.head)
                    for de in face_boundary(DualVertex(m, n), color))
            assert abs(s) < 1e-10


def test_positions_pinned_and_path_independent(t_eq, rng):
    assert abs(t_eq.position(DualVertex(0, 0))) < 1e-12
    # random cycles have zero net flow
    from tgraphs.hexlattice import dual_neighbors

    for _ in range(50):
        m, n = (int(x) for x in rng.integers(-20, 20, 2))
        v = DualVertex(m, n)
        walk = [v]
        for _ in range(12):
            nbrs = [u for u in dual_neighbors(walk[-1])
                    if t_eq.window.contains(u.m, u.n)]
            walk.append(nbrs[int(rng.integers(len(nbrs)))])
        total = sum(t_eq.dual_flow(a, b) for a, b in zip(walk, walk[1:]))
        assert abs(total - (t_eq.position(walk[-1]) - t_eq.position(walk[0]))) < 1e-12


def test_sup_deviation_from_linear_is_stable(scalene):
    tw = Twist.from_angle(0.71)
    sups = []
    for rad in (40, 80):
        t = build_tgraph(scalene, tw, Window.centered(rad), check=False)
        ms = np.arange(-rad, rad + 1)[:, None]
        ns = np.arange(-rad, rad + 1)[None, :]
        sups.append(float(np.abs(t.psi - linear_map(scalene, ms, ns)).max()))
    assert sups[1] < 1.05 * sups[0]


def test_translate_twist_identity_and_composition(scalene):
    tw = Twist.from_angle(0.3)
    assert translate_twist(tw, 0, 0, scalene).lam == tw.lam
    a = translate_twist(translate_twist(tw, 2, -1, scalene), -1, 3, scalene)
    b = translate_twist(tw, 1, 2, scalene)
    assert abs(a.lam - b.lam) < 1e-12 * max(1.0, abs(b.lam))


def test_translate_twist_rebuild_matches(scalene):
    tw = Twist.from_angle(0.3)
    m, n = 3, -2
    t = build_tgraph(scalene, tw, Window.centered(14), check=False)
    t2 = build_tgraph(scalene, translate_twist(tw, m, n, scalene),
                      Window.centered(10), check=False)
    base = t.position(DualVertex(m, n))
    for mm in range(-10, 11):
        for nn in range(-10, 11):
            a = t.position(DualVertex(m + mm, n + nn)) - base
            b = t2.position(DualVertex(mm, nn))
            assert abs(a - b) < 1e-8


def test_nondegeneracy_flags_crafted_twist(equilateral):
    # Re(1/lambda) = 0 collapses the face at the base coordinates
    t = TGraph(equilateral, Twist(1j), Window.centered(6))
    rep = check_nondegenerate(t)
    assert not rep.ok
    assert rep.degenerate_faces or rep.short_segments


def test_nondegeneracy_passes_generic(equilateral):
    t = build_tgraph(equilateral, Twist.from_angle(math.pi / 7), Window.centered(25),
                     check=False)
    assert check_nondegenerate(t).ok


def test_segments_and_vertex_structure(t_sc, rng):
    for _ in range(100):
        m, n = (int(x) for x in rng.integers(-25, 24, 2))
        seg = t_sc.segment(HexVertex(m, n, BLACK))
        ps = [t_sc.position(c) for c in seg.corners]
        u = ps[1] - ps[0]
        v = ps[2] - ps[0]
        cross = abs((u.conjugate() * v).imag) / (abs(u) * abs(v))
        assert cross < 1e-9
        # interior corner lies strictly between the endpoints
        offs = sorted(seg.offsets)
        assert offs[0] < seg.offsets[seg.interior_index] < offs[2]


def test_every_vertex_in_three_segments_one_interior(t_eq):
    assert (t_eq._vertex_conflicts[t_eq._inner_mask] == 1).all()


def test_embed_hex_noncrossing(equilateral):
    t = build_tgraph(equilateral, Twist.from_angle(0.9), Window.centered(8),
                     check=False)
    emb = embed_hex(t)
    # white position is the centroid, black the interior vertex
    w = white(0, 0)
    assert abs(emb[w] - t.face(w).centroid) < 1e-12
    b = HexVertex(0, 0, BLACK)
    assert abs(emb[b] - t.position(t.segment(b).interior_vertex)) < 1e-12
    edges = []
    for v, pos in emb.items():
        if v.color != WHITE:
            continue
        from tgraphs.hexlattice import hex_neighbors

        for u in hex_neighbors(v):
            if u in emb:
                edges.append((pos, emb[u]))

    def proper_cross(a, b, c, d):
        def orient(p, q, r):
            return ((q - p).conjugate() * (r - p)).imag
        return (orient(c, d, a) * orient(c, d, b) < 0
                and orient(a, b, c) * orient(a, b, d) < 0)

    crossings = 0
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            if proper_cross(*edges[i], *edges[j]):
                crossings += 1
    assert crossings == 0


def test_faces_cover_plane_point_location(t_eq, rng):
    # any point off the segments lies in exactly one face
    hits_expected = 0
    for _ in range(60):
        m, n = (int(x) for x in rng.integers(-15, 15, 2))
        base = t_eq.position(DualVertex(m, n))
        z = base + complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        containing = 0
        for dm in range(-4, 5):
            for dn in range(-4, 5):
                try:
                    f = t_eq.face(white(m + dm, n + dn))
                except Exception:
                    continue
                a, b, c = f.positions
                d1 = ((b - a).conjugate() * (z - a)).imag
                d2 = ((c - b).conjugate() * (z - b)).imag
                d3 = ((a - c).conjugate() * (z - c)).imag
                if (d1 > 1e-10 and d2 > 1e-10 and d3 > 1e-10):
                    containing += 1
        if containing:
            hits_expected += 1
            assert containing == 1
    assert hits_expected > 40  # most samples are strictly inside some face


def test_segment_intersections_only_at_endpoints(equilateral):
    t = build_tgraph(equilateral, Twist.from_angle(1.1), Window.centered(7),
                     check=False)
    fw = t.face_window
    segs = []
    for m in range(fw.m0, fw.m1 + 1):
        for n in range(fw.n0, fw.n1 + 1):
            s = t.segment(HexVertex(m, n, BLACK))
            ends = [t.position(e) for e in s.endpoints]
            segs.append(ends)

    def proper_cross(a, b, c, d):
        def orient(p, q, r):
            return ((q - p).conjugate() * (r - p)).imag
        return (orient(c, d, a) * orient(c, d, b) < -1e-12
                and orient(a, b, c) * orient(a, b, d) < -1e-12)

    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            assert not proper_cross(*segs[i], *segs[j])
