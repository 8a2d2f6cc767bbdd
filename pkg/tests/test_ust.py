import collections

import numpy as np
import pytest

from tgraphs import Window
from tgraphs.errors import SizeCapError
from tgraphs.hexlattice import DualVertex
from tgraphs.ust import (
    ROOT,
    SpanningForest,
    WiredDomain,
    enumerate_arborescences,
    extend_path_to_tree,
    wilson_wired,
)


def test_single_vertex_domain_matches_rates(t_eq):
    dom = WiredDomain(t_eq, [DualVertex(0, 0)])
    assert (dom.targets == ROOT).all()
    counts = [0, 0]
    for s in range(10_000):
        f = wilson_wired(dom, s)
        counts[int(f.choice[0])] += 1
    p0 = dom.rates[0, 0] / dom.rates[0].sum()
    assert abs(counts[0] / 10_000 - p0) < 0.02


def test_enumeration_single_vertex(t_eq):
    dom = WiredDomain(t_eq, [DualVertex(0, 0)])
    arbs = enumerate_arborescences(dom)
    assert len(arbs) == 2
    assert abs(sum(w for _, w in arbs) - 1.0) < 1e-12
    w0 = dom.rates[0, 0] / dom.rates[0].sum()
    got = {cv[0]: w for cv, w in arbs}
    assert abs(got[0] - w0) < 1e-12


def test_enumeration_size_cap(t_eq):
    verts = [v for v in Window.centered(3).duals()]
    dom = WiredDomain(t_eq, verts)
    with pytest.raises(SizeCapError):
        enumerate_arborescences(dom, cap=5)


def test_wilson_matches_enumeration_tv(t_eq):
    # small connected patch of vertices
    verts = [DualVertex(m, n) for m in range(0, 3) for n in range(0, 2)]
    dom = WiredDomain(t_eq, verts)
    dom.check_root_reachable()
    arbs = dict()
    for cv, w in enumerate_arborescences(dom):
        arbs[cv] = w
    counts = collections.Counter()
    n = 100_000
    rng = np.random.default_rng(11)
    for _ in range(n):
        f = wilson_wired(dom, int(rng.integers(2**62)))
        counts[tuple(int(c) for c in f.choice)] += 1
    assert set(counts) <= set(arbs)
    tv = 0.5 * sum(abs(counts.get(cv, 0) / n - w) for cv, w in arbs.items())
    assert tv < 0.02


def test_sampled_forests_are_valid(t_eq, rng):
    verts = [DualVertex(m, n) for m in range(-6, 7) for n in range(-6, 7)]
    dom = WiredDomain(t_eq, verts)
    for s in range(20):
        f = wilson_wired(dom, s)
        f.validate()  # acyclic, rooted
        # spanning: every vertex has a choice that leads to the root
        par = f.parent
        for i in range(dom.size):
            u, steps = i, 0
            while u != ROOT:
                u = par[u]
                steps += 1
                assert steps <= dom.size


def test_extend_path_reduces_to_wilson_when_empty(t_eq):
    verts = [DualVertex(m, n) for m in range(0, 4) for n in range(0, 4)]
    dom = WiredDomain(t_eq, verts)
    f1 = extend_path_to_tree(dom, [], seed=3)
    f2 = wilson_wired(dom, 3)
    assert (f1.choice == f2.choice).all()


def test_extend_path_forces_path_edges(t_eq):
    verts = [DualVertex(m, n) for m in range(0, 5) for n in range(0, 5)]
    dom = WiredDomain(t_eq, verts)
    # build a short directed path following actual out-edges until it exits
    path = [DualVertex(2, 2)]
    while True:
        outs = [u for u, _ in t_eq.out_edges(path[-1])]
        nxt = outs[0]
        path.append(nxt)
        if nxt not in dom.index:
            break
    f = extend_path_to_tree(dom, path, seed=4)
    for a, b in zip(path, path[1:]):
        if a in dom.index:
            assert f.successor_coords(a) == b


def test_root_reachability_error(t_sc):
    # a vertex set with no outgoing edges to the root cannot exist on a
    # T-graph window; instead check the reachability scan passes
    verts = [DualVertex(m, n) for m in range(-3, 4) for n in range(-3, 4)]
    dom = WiredDomain(t_sc, verts)
    dom.check_root_reachable()
