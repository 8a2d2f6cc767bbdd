"""Spanning forests on T-graphs.

A wired domain is a finite set of T-graph vertices, each keeping its two
outgoing edges; all targets outside the set are glued into a single root.
``wilson_wired`` samples the arborescence-toward-root measure weighted by
products of jump rates via loop-erased random walks;
``enumerate_arborescences`` is the exact oracle for tiny domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConnectivityError, GeometryError, SizeCapError
from .hexlattice import DualVertex, Window
from .tgraph import TGraph

ROOT = -1


class WiredDomain:
    """Finite wired piece of a T-graph.

    ``targets[i, k]`` is the internal index of the k-th out-neighbour of
    vertex i, or ROOT when that endpoint falls outside the domain.
    ``target_coords`` keeps the actual lattice coordinates either way.
    """

    def __init__(self, t: TGraph, vertices: list[DualVertex]):
        self.t = t
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise GeometryError("duplicate vertices in wired domain")
        n = len(self.vertices)
        mn = np.asarray([(v.m, v.n) for v in self.vertices], dtype=np.int64)
        if n:
            gi = mn[:, 0] - t.window.m0
            gj = mn[:, 1] - t.window.n0
            if not t.vertex_valid[gi, gj].all():
                bad = [self.vertices[i] for i in
                       np.nonzero(~t.vertex_valid[gi, gj])[0][:5]]
                raise GeometryError(f"vertices without walk data: {bad}")
            tdm = t.vertex_targets[gi, gj]          # (n, 2, 2)
            tmn = mn[:, None, :] + tdm
            with np.errstate(invalid="ignore"):
                self.rates = 1.0 / t.vertex_dist[gi, gj]
            M, N = t.theta.shape
            lookup = np.full(M * N, ROOT, dtype=np.int64)
            lookup[gi * N + gj] = np.arange(n)
            flat = (tmn[..., 0] - t.window.m0) * N + (tmn[..., 1] - t.window.n0)
            in_grid = ((tmn[..., 0] >= t.window.m0) & (tmn[..., 0] <= t.window.m1)
                       & (tmn[..., 1] >= t.window.n0) & (tmn[..., 1] <= t.window.n1))
            self.targets = np.where(in_grid, lookup[np.where(in_grid, flat, 0)], ROOT)
            self._target_mn = tmn
            self.target_coords = [
                (DualVertex(int(tmn[i, 0, 0]), int(tmn[i, 0, 1])),
                 DualVertex(int(tmn[i, 1, 0]), int(tmn[i, 1, 1])))
                for i in range(n)]
        else:
            self.rates = np.zeros((0, 2))
            self.targets = np.zeros((0, 2), dtype=np.int64)
            self.target_coords = []
        tot = self.rates.sum(axis=1)
        self.p0 = self.rates[:, 0] / np.where(tot > 0, tot, 1.0)

    @classmethod
    def from_window(cls, t: TGraph, window: Window) -> "WiredDomain":
        inner = t.interior_window
        verts = [v for v in window.duals() if inner.contains(v.m, v.n)]
        if len(verts) < len(list(window.duals())):
            raise GeometryError(f"window {window} exceeds walkable region {inner}")
        return cls(t, verts)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def check_root_reachable(self) -> None:
        """Reverse BFS from the root; every vertex must reach it."""
        n = self.size
        radj: list[list[int]] = [[] for _ in range(n)]
        seeds = []
        for i in range(n):
            for k in range(2):
                j = self.targets[i, k]
                if j == ROOT:
                    seeds.append(i)
                else:
                    radj[j].append(i)
        seen = np.zeros(n, dtype=bool)
        stack = list(dict.fromkeys(seeds))
        for i in stack:
            seen[i] = True
        while stack:
            i = stack.pop()
            for j in radj[i]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        if not seen.all():
            missing = [self.vertices[i] for i in np.nonzero(~seen)[0][:8]]
            raise ConnectivityError(f"root unreachable from {missing}")


@dataclass
class SpanningForest:
    """Out-edge choice per domain vertex; every chain ends at the root."""

    domain: WiredDomain
    choice: np.ndarray  # (n,) values in {0, 1}

    @property
    def parent(self) -> np.ndarray:
        n = self.domain.size
        return self.domain.targets[np.arange(n), self.choice]

    def successor(self, v: DualVertex) -> DualVertex | None:
        i = self.domain.index[v]
        k = int(self.choice[i])
        j = self.domain.targets[i, k]
        if j == ROOT:
            return None
        return self.domain.vertices[j]

    def successor_coords(self, v: DualVertex) -> DualVertex:
        """Actual coordinates of the chosen target (even when it is the root)."""
        i = self.domain.index[v]
        return self.domain.target_coords[i][int(self.choice[i])]

    def unchosen_coords(self, v: DualVertex) -> DualVertex:
        i = self.domain.index[v]
        return self.domain.target_coords[i][1 - int(self.choice[i])]

    def validate(self) -> None:
        """Acyclicity and rootedness: every parent chain reaches ROOT."""
        par = self.parent
        n = self.domain.size
        state = np.zeros(n, dtype=np.int8)  # 0 unknown, 1 ok
        for s in range(n):
            chain = []
            u = s
            while u != ROOT and state[u] == 0:
                chain.append(u)
                state[u] = 2
                u = par[u]
                if u != ROOT and state[u] == 2:
                    raise ConnectivityError("cycle in sampled forest")
            for c in chain:
                state[c] = 1

    def key(self) -> bytes:
        return self.choice.tobytes()


class _RandStream:
    """Buffered uniform variates for tight python loops."""

    def __init__(self, rng: np.random.Generator, block: int = 1 << 14):
        self.rng = rng
        self.block = block
        self.buf = rng.random(block)
        self.i = 0

    def next(self) -> float:
        if self.i >= self.buf.size:
            self.buf = self.rng.random(self.block)
            self.i = 0
        x = self.buf[self.i]
        self.i += 1
        return x


def wilson_wired(domain: WiredDomain, seed: int,
                 forced: dict[int, int] | None = None) -> SpanningForest:
    """Sample the rate-weighted arborescence toward the root.

    Loop-erased random walk with cycle popping: each unvisited vertex walks
    (re-randomizing its choice on every visit) until it hits the growing
    tree or the root, then its trajectory is retraced and frozen.

    ``forced`` optionally pins choices for some vertices (used to extend a
    fixed path into a tree); forced vertices are frozen before sampling.
    """
    rng = np.random.default_rng(seed)
    stream = _RandStream(rng)
    n = domain.size
    tgt = domain.targets
    p0 = domain.p0
    choice = np.zeros(n, dtype=np.int8)
    in_tree = np.zeros(n, dtype=bool)
    if forced:
        for i, k in forced.items():
            choice[i] = k
            in_tree[i] = True
    for s in range(n):
        if in_tree[s]:
            continue
        u = s
        while u != ROOT and not in_tree[u]:
            choice[u] = 0 if stream.next() < p0[u] else 1
            u = tgt[u, choice[u]]
        u = s
        while u != ROOT and not in_tree[u]:
            in_tree[u] = True
            u = tgt[u, choice[u]]
    forest = SpanningForest(domain, choice)
    forest.validate()
    return forest


def enumerate_arborescences(domain: WiredDomain,
                            cap: int = 20) -> list[tuple[tuple[int, ...], float]]:
    """All arborescences toward the root with their normalized weights.

    Weight of a choice vector is the product of chosen-edge rates; the list
    of (choice_vector, probability) covers exactly the valid (acyclic,
    rooted) configurations.
    """
    n = domain.size
    if n > cap:
        raise SizeCapError(f"domain has {n} vertices; enumeration capped at {cap}")
    tgt = domain.targets
    rates = domain.rates
    out: list[tuple[tuple[int, ...], float]] = []
    choice = np.zeros(n, dtype=np.int8)

    def creates_cycle(k: int) -> bool:
        # follow assigned parents from k; vertices > k are unassigned
        u = tgt[k, choice[k]]
        while u != ROOT and u <= k:
            if u == k:
                return True
            u = tgt[u, choice[u]]
        return False

    def rec(k: int, weight: float) -> None:
        if k == n:
            out.append((tuple(int(c) for c in choice), weight))
            return
        for c in (0, 1):
            choice[k] = c
            if not creates_cycle(k):
                rec(k + 1, weight * rates[k, c])
        choice[k] = 0

    rec(0, 1.0)
    if not out:
        raise ConnectivityError("no arborescence exists (root unreachable)")
    total = sum(w for _, w in out)
    return [(cv, w / total) for cv, w in out]


def extend_path_to_tree(domain: WiredDomain, path: list[DualVertex],
                        seed: int) -> SpanningForest:
    """Wired spanning forest containing the given directed simple path.

    Path vertices inside the domain are forced to follow the path (the final
    vertex, if interior, must have its successor outside the domain, i.e. at
    the root); everything else is Wilson-sampled conditionally.
    """
    forced: dict[int, int] = {}
    for a, b in zip(path, path[1:]):
        i = domain.index.get(a)
        if i is None:
            continue
        t0, t1 = domain.target_coords[i]
        if b == t0:
            forced[i] = 0
        elif b == t1:
            forced[i] = 1
        else:
            raise GeometryError(f"path step {a}->{b} is not a T-graph edge")
    if path:
        i = domain.index.get(path[-1])
        if i is not None:
            raise GeometryError("path must leave the domain at its final vertex")
    return wilson_wired(domain, seed, forced=forced)
