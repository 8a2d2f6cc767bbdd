"""Deterministic JSON serialization for the main artifacts.

All writers sort keys and render numbers with repr-precision so identical
inputs yield byte-identical files; volatile metadata (timestamps) goes into a
separate sidecar file.
"""

from __future__ import annotations

import json
import time
from typing import Any

from .hexlattice import BLACK, WHITE, DualVertex, HexVertex, Window
from .tgraph import TGraph, Twist, build_triangle


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _coerce(obj):
    if isinstance(obj, dict):
        return {k: _coerce(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_coerce(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_coerce(obj), sort_keys=True, indent=1)


def write_json(path: str, obj: Any) -> None:
    with open(path, "w") as f:
        f.write(dumps(obj))
        f.write("\n")


def write_sidecar(path: str, config: dict) -> None:
    meta = {"created_unix": time.time(), "config": config}
    with open(path, "w") as f:
        json.dump(meta, f, sort_keys=True, indent=1)
        f.write("\n")


def tgraph_to_dict(t: TGraph) -> dict:
    """Window, positions, segments, faces and rate-weighted directed edges."""
    m0, m1, n0, n1 = t.window
    verts = []
    for m in range(m0, m1 + 1):
        for n in range(n0, n1 + 1):
            verts.append({"m": m, "n": n, "pos": _c(t.position(DualVertex(m, n)))})
    segs = []
    fw = t.face_window
    for m in range(fw.m0, fw.m1 + 1):
        for n in range(fw.n0, fw.n1 + 1):
            s = t.segment(HexVertex(m, n, BLACK))
            segs.append({
                "black": [m, n],
                "corners": [[c.m, c.n] for c in s.corners],
                "interior_index": s.interior_index,
                "length": s.length,
            })
    faces = []
    for m in range(m0, m1):
        for n in range(n0, n1):
            faces.append({"white": [m, n],
                          "corners": [[c.m, c.n] for c in t.face(HexVertex(m, n, WHITE)).corners]})
    edges = []
    iw = t.interior_window
    for m in range(iw.m0, iw.m1 + 1):
        for n in range(iw.n0, iw.n1 + 1):
            for tgt, rate in t.out_edges(DualVertex(m, n)):
                edges.append({"from": [m, n], "to": [tgt.m, tgt.n], "rate": rate})
    return {
        "shape": {"p_a": t.shape.p_a, "p_b": t.shape.p_b, "p_c": t.shape.p_c,
                  "A": _c(t.shape.A), "B": _c(t.shape.B), "C": _c(t.shape.C)},
        "twist": _c(t.twist.lam),
        "window": list(t.window),
        "vertices": verts,
        "segments": segs,
        "faces": faces,
        "directed_edges": edges,
    }


def tgraph_from_dict(d: dict) -> TGraph:
    shape = build_triangle(d["shape"]["p_a"], d["shape"]["p_b"], d["shape"]["p_c"])
    tw = Twist(complex(d["twist"][0], d["twist"][1]))
    from .tgraph import build_tgraph

    return build_tgraph(shape, tw, Window(*d["window"]), check=False)


def forest_to_dict(forest) -> dict:
    """Vertex -> chosen parent dump of a wired spanning forest."""
    dom = forest.domain
    rows = []
    for i, v in enumerate(dom.vertices):
        tgt = forest.successor_coords(v)
        rows.append({"v": [v.m, v.n], "parent": [tgt.m, tgt.n],
                     "to_root": forest.successor(v) is None})
    return {"vertices": rows, "seeded": True}


def matching_to_dict(matching) -> dict:
    pairs = []
    for (m, n), b in sorted(matching.pairs.items()):
        pairs.append({"white": [m, n], "black": [b.m, b.n]})
    return {"pairs": pairs}


def heights_to_dict(h) -> dict:
    rows = [{"v": [v.m, v.n], "h": val} for v, val in sorted(h.values.items())]
    return {"base": [h.base.m, h.base.n], "values": rows}


def domain_to_dict(dd) -> dict:
    return {
        "delta": dd.delta,
        "loop": [[v.m, v.n] for v in dd.loop],
        "escape": [[v.m, v.n] for v in dd.escape],
        "erased_edge": [[dd.erased_edge[0].m, dd.erased_edge[0].n],
                        [dd.erased_edge[1].m, dd.erased_edge[1].n]],
        "marked_face": [dd.marked_face.m, dd.marked_face.n],
        "marked_adjacent": dd.marked_adjacent,
        "removed_white": list(dd.removed_white),
        "whites": sorted(list(w) for w in dd.whites),
        "blacks": sorted(list(b) for b in dd.blacks),
        "interior_vertices": [[v.m, v.n] for v in dd.interior_duals],
    }
