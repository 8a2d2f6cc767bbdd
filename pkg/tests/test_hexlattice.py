import numpy as np

from tgraphs.hexlattice import (
    BLACK,
    WHITE,
    DualVertex,
    HexVertex,
    black,
    black_face,
    dual_edge_info,
    dual_neighbors,
    dual_of_edge,
    edge_between,
    edges_at,
    face_boundary,
    hex_neighbors,
    int_position,
    ref_position,
    white,
    white_face,
)


def test_neighbor_tables():
    assert set(hex_neighbors(black(0, 0))) == {white(0, 0), white(0, -1), white(1, -1)}
    assert set(hex_neighbors(white(0, 0))) == {black(0, 0), black(0, 1), black(-1, 1)}
    # translation invariance
    assert set(hex_neighbors(white(5, -3))) == {black(5, -3), black(5, -2), black(4, -2)}


def test_bipartite_window_scan():
    for m in range(-4, 5):
        for n in range(-4, 5):
            for v in (black(m, n), white(m, n)):
                nbrs = hex_neighbors(v)
                assert len(nbrs) == 3
                assert all(u.color != v.color for u in nbrs)
                # symmetry of the adjacency relation
                for u in nbrs:
                    assert v in hex_neighbors(u)


def test_ref_embedding_edge_lengths():
    for v in (black(2, -1), white(0, 3)):
        p = ref_position(v)
        for u in hex_neighbors(v):
            assert abs(abs(ref_position(u) - p) - 1.0) < 1e-12


def test_dual_of_edge_involution_and_side():
    for m, n in ((0, 0), (2, -1), (-3, 4)):
        for e in edges_at(black(m, n)):
            de = dual_of_edge(e, +1)
            assert de.white_sign == +1
            back = dual_edge_info(de.head, de.tail)
            assert back.white_sign == -1
            assert back.crossed == de.crossed == e


def test_dual_of_edge_matches_reference_geometry():
    # crossing sign verified against the planar embedding
    def crosses(a, b, c, d):
        def orient(p, q, r):
            return ((q - p).conjugate() * (r - p)).imag
        return (orient(c, d, a) * orient(c, d, b) < 0
                and orient(a, b, c) * orient(a, b, d) < 0)

    for m in range(-2, 3):
        for n in range(-2, 3):
            v = DualVertex(m, n)
            for u in dual_neighbors(v):
                de = dual_edge_info(v, u)
                pv, pu = ref_position(v), ref_position(u)
                pw, pb = ref_position(de.crossed.white), ref_position(de.crossed.black)
                assert crosses(pv, pu, pw, pb)
                mid = (pw + pb) / 2
                det = ((pu - pv).conjugate() * (pw - mid)).imag
                assert (det > 0) == (de.white_sign > 0)


def test_face_boundary_closure_and_duality():
    for color in (WHITE, BLACK):
        edges = face_boundary(DualVertex(0, 0), color)
        assert len(edges) == 3
        for a, b in zip(edges, edges[1:] + edges[:1]):
            assert a.head == b.tail
        hexes = {e.crossed for e in edges}
        centre = HexVertex(0, 0, color)
        assert hexes == set(edges_at(centre))


def test_adjacent_faces_share_one_edge():
    wf = set(white_face(0, 0))
    bf = set(black_face(0, 0))
    both = face_boundary(DualVertex(0, 0), WHITE) + face_boundary(DualVertex(0, 0), BLACK)
    assert len({(e.tail, e.head) for e in both}) == 6
    assert len(wf & bf) == 2  # exactly one shared dual edge


def test_int_positions_exact():
    for v in (black(3, -2), white(-1, 5), DualVertex(2, 2)):
        ip = int_position(v)
        rp = ref_position(v)
        assert abs(ip[0] * np.sqrt(3) / 2 - rp.real) < 1e-9
        assert abs(ip[1] * 0.5 - rp.imag) < 1e-9
