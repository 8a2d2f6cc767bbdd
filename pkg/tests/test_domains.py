import math

import numpy as np
import pytest

from tgraphs import Twist, Window, build_tgraph, build_triangle
from tgraphs.errors import GeometryError
from tgraphs.hexlattice import DualVertex, WHITE
from tgraphs.tgraph import linear_map
from tgraphs.domains import (
    ContinuousDomain,
    DomainForest,
    boundary_blacks,
    boundary_height_profile,
    build_domain,
    build_escape,
    classify_by_segments,
    domain_heights,
    domain_matching,
    loop_hausdorff,
    matching_weight_correction,
    point_in_int_polygon,
    trace_loop,
)
from tgraphs.ust import wilson_wired
from tgraphs.dimers import ReferenceFlow, brute_force_matchings, verify_height_winding


@pytest.fixture(scope="module")
def medium_domain():
    sh = build_triangle(1 / 3, 1 / 3, 1 / 3)
    t = build_tgraph(sh, Twist.from_angle(0.37), Window.centered(40), check=False)
    u = ContinuousDomain.polygon([0j, 20 + 0j, 20 + 20j, 20j], marked=0)
    dd = build_domain(t, u, delta=1.0, corridor=2.0)
    return t, u, dd


def test_polygon_validation():
    with pytest.raises(GeometryError):
        ContinuousDomain.polygon([0j, 1 + 0j])
    with pytest.raises(GeometryError):
        ContinuousDomain.polygon([0j, 2 + 0j, 2j, 2 + 2j])  # bow tie


def test_loop_structure(medium_domain):
    t, u, dd = medium_domain
    loop = dd.loop
    assert len(set(loop)) == len(loop)
    for a, b in zip(loop, loop[1:] + loop[:1]):
        assert b in [x for x, _ in t.out_edges(a)]
    # winding +1 around the domain centre
    target = [linear_map(t.shape, z.real, z.imag) for z in u.boundary]
    c = sum(target) / len(target)
    pts = [t.position(v) for v in loop] + [t.position(loop[0])]
    wind = sum(math.atan2(((za.conjugate() * zb).imag), ((za.conjugate() * zb).real))
               for za, zb in zip([p - c for p in pts], [p - c for p in pts[1:]]))
    assert abs(wind - 2 * math.pi) < 1e-6


def test_hausdorff_within_corridor(medium_domain):
    t, u, dd = medium_domain
    assert loop_hausdorff(t, dd.loop, u, 1.0) <= 2.0


def test_escape_properties(medium_domain):
    t, u, dd = medium_domain
    assert dd.escape[0] == dd.loop[0]
    assert set(dd.escape[1:]).isdisjoint(set(dd.loop))
    # starts near the marked point's image
    start = t.position(dd.loop[0])
    assert abs(start - linear_map(t.shape, 0, 0)) <= 5 * 2.0
    # erased edge is the root's outgoing loop edge
    z0, z1 = dd.erased_edge
    assert z0 == dd.loop[0] and z1 == dd.loop[1]
    assert dd.path_successor[z0] == dd.escape[1]


def test_removed_vertex_is_white_and_unique(medium_domain):
    t, u, dd = medium_domain
    assert dd.removed_white in dd.u_whites
    assert dd.removed_white not in dd.whites
    assert len(dd.u_whites) == len(dd.u_blacks) + 1


def test_classification_cross_check(medium_domain):
    t, u, dd = medium_domain
    w2, b2 = classify_by_segments(t, dd)
    assert w2 == dd.u_whites
    assert b2 == dd.u_blacks


def test_point_in_int_polygon_basics():
    square = [(0, 0), (4, 0), (4, 4), (0, 4)]
    assert point_in_int_polygon((2, 2), square)
    assert not point_in_int_polygon((5, 2), square)
    assert not point_in_int_polygon((-1, -1), square)


def test_domain_pipeline_matching_and_heights(medium_domain):
    t, u, dd = medium_domain
    ref = ReferenceFlow(t)
    for s in range(3):
        f = wilson_wired(dd.wired, 50 + s)
        df = DomainForest(dd, f)
        matching, _ = domain_matching(t, df)  # check_perfect inside
        h = domain_heights(t, df, matching, ref, verify=True)
        assert abs(h[dd.marked_face]) < 1e-12
        # boundary faces all have heights
        assert all(v in h.values for v in dd.loop)


def test_boundary_profile_matches_heights(medium_domain):
    t, u, dd = medium_domain
    f = wilson_wired(dd.wired, 60)
    df = DomainForest(dd, f)
    matching, _ = domain_matching(t, df)
    h = domain_heights(t, df, matching, ReferenceFlow(t))
    prof = boundary_height_profile(t, dd)
    worst = max(abs(prof[v] - (h[v] - h[dd.marked_face])) for v in dd.loop)
    assert worst < 1e-9
    assert abs(prof[dd.marked_face]) < 1e-12


def test_height_winding_on_domain(medium_domain):
    t, u, dd = medium_domain
    f = wilson_wired(dd.wired, 70)
    df = DomainForest(dd, f)
    matching, _ = domain_matching(t, df)
    h = domain_heights(t, df, matching, ReferenceFlow(t))
    verts = sorted(h.values)
    rng = np.random.default_rng(8)
    pairs = [(verts[int(a)], verts[int(b)])
             for a, b in rng.integers(0, len(verts), (50, 2))]
    rep = verify_height_winding(t, df.successor, h, pairs)
    assert rep["max_discrepancy"] < 1e-9


def test_tiny_domain_uniform_pushforward():
    from tgraphs.verify import find_tiny_domains
    from tgraphs.ust import SpanningForest, enumerate_arborescences
    from collections import defaultdict

    t, dd = find_tiny_domains(count=1)[0]
    bb = boundary_blacks(t, dd)
    push = defaultdict(float)
    for cv, w in enumerate_arborescences(dd.wired):
        f = SpanningForest(dd.wired, np.asarray(cv, dtype=np.int8))
        mm, _ = domain_matching(t, DomainForest(dd, f))
        push[frozenset((k, (b.m, b.n)) for k, b in mm.pairs.items())] += \
            w * matching_weight_correction(t, dd, mm, bb)
    probs = np.asarray(list(push.values()))
    probs /= probs.sum()
    assert np.abs(probs - 1.0 / len(probs)).max() < 1e-9
    bf = brute_force_matchings(dd.whites, dd.blacks)
    assert {frozenset(m) for m in bf} == set(push)
