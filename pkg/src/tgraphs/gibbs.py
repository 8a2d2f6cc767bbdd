"""Statistical checks that the sampling pipeline realizes the ergodic Gibbs
measure at its slope: tile densities, conditional uniformity on small
patches, and boundedness of the gap between the two height references.

Full-plane samples are approximated by wired uniform spanning trees on a
window three times the observation region, with an independent uniform twist
per sample so that the ensemble is translation invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DegeneracyError
from .hexlattice import (
    BLACK,
    NE_SW,
    NW_SE,
    VERTICAL,
    WHITE,
    DualVertex,
    HexVertex,
    Window,
    hex_neighbors,
)
from .tgraph import TGraph, TriangleShape, Twist, build_tgraph
from .ust import WiredDomain, wilson_wired
from .dimers import (
    Matching,
    ReferenceFlow,
    SlopeFlow,
    flow_primitive,
    tree_to_matching_window,
)


def random_twist(seed: int, shape: TriangleShape | None = None,
                 window: Window | None = None, min_cos: float = 1e-6,
                 max_tries: int = 100) -> Twist:
    """Uniform twist on the unit circle, resampled until non-degenerate on
    the given window (no near-collapsed face: min |cos theta| >= min_cos)."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        tw = Twist.from_angle(float(rng.uniform(0.0, 2.0 * math.pi)))
        if shape is None or window is None:
            return tw
        az = math.atan2((shape.beta / shape.gamma).imag, (shape.beta / shape.gamma).real)
        ah = math.atan2((shape.beta / shape.alpha).imag, (shape.beta / shape.alpha).real)
        ms = np.arange(window.m0, window.m1 + 1)
        ns = np.arange(window.n0, window.n1 + 1)
        theta = tw.angle + az * ms[:, None] + ah * ns[None, :]
        if np.abs(np.cos(theta)).min() >= min_cos:
            return tw
    raise DegeneracyError(f"no non-degenerate twist found in {max_tries} draws")


@dataclass
class TileDensities:
    rho_a: float
    rho_b: float
    rho_c: float
    window: Window
    samples: int
    per_sample: list = field(default_factory=list)
    seed: int = 0
    counted: int = 0

    @property
    def rho(self) -> tuple[float, float, float]:
        return (self.rho_a, self.rho_b, self.rho_c)


def sample_tiling(shape: TriangleShape, window: Window, seed: int,
                  margin: int = 3, min_cos: float = 1e-6
                  ) -> tuple[TGraph, Matching, set]:
    """One full-pipeline sample: random twist, T-graph on a ``margin`` times
    larger window, wired spanning tree, matching.  Returns the T-graph, the
    matching, and the set of interior faces on which it is defined."""
    t, interior, mdm, mdn = _sample_arrays(shape, window, seed, margin, min_cos)
    m0, n0 = t.window.m0, t.window.n0
    pairs = {}
    for i, j in zip(*np.nonzero(interior)):
        pairs[(m0 + i, n0 + j)] = HexVertex(m0 + i + int(mdm[i, j]),
                                            n0 + j + int(mdn[i, j]), BLACK)
    faces = set(pairs)
    return t, Matching(pairs), faces


def _sample_arrays(shape: TriangleShape, window: Window, seed: int,
                   margin: int = 3, min_cos: float = 1e-6):
    from .dimers import window_matching_arrays

    wm, wn = window.shape
    big = Window(window.m0 - margin * wm // 2 - 3, window.m1 + margin * wm // 2 + 3,
                 window.n0 - margin * wn // 2 - 3, window.n1 + margin * wn // 2 + 3)
    ss = np.random.SeedSequence(seed)
    s_twist, s_tree = ss.spawn(2)
    tw = random_twist(int(s_twist.generate_state(1)[0]), shape, big, min_cos=min_cos)
    t = build_tgraph(shape, tw, big, check=False)
    dom = WiredDomain.from_window(t, big.shrink(1))
    forest = wilson_wired(dom, int(s_tree.generate_state(1)[0]))
    M, N = t.theta.shape
    dmask = np.zeros((M, N), dtype=bool)
    dmask[1:-1, 1:-1] = True
    cgrid = np.zeros((M, N), dtype=np.int8)
    cgrid[1:-1, 1:-1] = np.asarray(forest.choice).reshape(M - 2, N - 2)
    interior, mdm, mdn = window_matching_arrays(t, dmask, cgrid)
    return t, interior, mdm, mdn


def tile_densities(slope: tuple[float, float, float], window_size: int,
                   samples: int, seed: int, margin: int = 3) -> TileDensities:
    """Empirical lozenge-class frequencies in the central window, one wired
    sample per twist draw."""
    from .tgraph import build_triangle

    shape = build_triangle(*slope)
    half = window_size // 2
    window = Window.centered(half)
    counts = np.zeros(3)
    per_sample = []
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(samples):
        s = int(child.generate_state(1)[0])
        t, interior, mdm, mdn = _sample_arrays(shape, window, s, margin=margin)
        i0 = window.m0 - t.window.m0
        j0 = window.n0 - t.window.n0
        sl = (slice(i0, i0 + window.shape[0]), slice(j0, j0 + window.shape[1]))
        inw = interior[sl]
        dm, dn = mdm[sl], mdn[sl]
        # class from the white-minus-black offset: (0,0) vertical,
        # (0,1) ne-sw, (-1,1) nw-se  [offsets here are black-minus-white]
        local = np.array([
            float(np.sum(inw & (dm == 0) & (dn == 0))),
            float(np.sum(inw & (dm == 0) & (dn == 1))),
            float(np.sum(inw & (dm == -1) & (dn == 1))),
        ])
        if local.sum() != inw.sum():
            raise ConsistencyError("unclassifiable matched pair in central window")
        counts += local
        tot = local.sum()
        per_sample.append(tuple(local / tot) if tot else (0.0, 0.0, 0.0))
    total = counts.sum()
    rho = counts / total
    return TileDensities(float(rho[0]), float(rho[1]), float(rho[2]),
                         window, samples, per_sample, seed, int(total))


# ---------------------------------------------------------------------------
# Conditional uniformity on a single hexagon patch.


def hexagon_patch(d: DualVertex) -> list[HexVertex]:
    """The six hex vertices around the hexagonal face at dual vertex d,
    in cyclic order."""
    m, n = d.m, d.n
    return [HexVertex(m, n, BLACK), HexVertex(m, n, WHITE),
            HexVertex(m - 1, n + 1, BLACK), HexVertex(m - 1, n, WHITE),
            HexVertex(m - 1, n, BLACK), HexVertex(m, n - 1, WHITE)]


def gibbs_conditional_check(slope: tuple[float, float, float], window_size: int,
                            samples: int, seed: int,
                            patch_offsets: list[tuple[int, int]] | None = None) -> dict:
    """Bin samples by the matching state outside a hexagon patch; inside each
    populated bin the interior configuration must be uniform.

    For a single hexagon the only bin with two compatible states is the
    flippable one (no boundary dimer uses a patch vertex): its two
    alternating matchings must be 50/50.  Reports chi-square p-values per
    patch with a Bonferroni-corrected verdict and empirical effect sizes.
    """
    from .tgraph import build_triangle

    shape = build_triangle(*slope)
    window = Window.centered(window_size // 2)
    if patch_offsets is None:
        patch_offsets = [(0, 0)]
    bins: dict[tuple, dict[frozenset, int]] = {}
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(samples):
        s = int(child.generate_state(1)[0])
        _t, matching, interior = sample_tiling(shape, window, s, margin=2)
        for off in patch_offsets:
            patch = hexagon_patch(DualVertex(*off))
            pv = {(h.m, h.n, h.color) for h in patch}
            whites = [h for h in patch if h.color == WHITE]
            if any((w.m, w.n) not in matching.pairs for w in whites):
                continue
            inside: set = set()
            boundary: set = set()
            ok = True
            for h in patch:
                if h.color == WHITE:
                    b = matching.black_of(h.m, h.n)
                    key = ((h.m, h.n), (b.m, b.n))
                    if (b.m, b.n, BLACK) in pv:
                        inside.add(key)
                    else:
                        boundary.add(key)
                else:
                    # find the white matched to this black, if any
                    for w in hex_neighbors(h):
                        if matching.black_of(w.m, w.n) == h:
                            if (w.m, w.n, WHITE) not in pv:
                                boundary.add(((w.m, w.n), (h.m, h.n)))
            bkey = (off, frozenset(boundary))
            bins.setdefault(bkey, {}).setdefault(frozenset(inside), 0)
            bins[bkey][frozenset(inside)] += 1

    from scipy import stats

    results = []
    for bkey, states in bins.items():
        total = sum(states.values())
        k = len(states)
        if total < 20:
            continue
        counts = np.asarray(list(states.values()), dtype=float)
        if k == 1:
            results.append({"bin": bkey[1], "patch": bkey[0], "states": 1,
                            "total": total, "p_value": 1.0, "effect": 0.0})
            continue
        expected = total / k
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        p = float(stats.chi2.sf(chi2, k - 1))
        results.append({"bin": bkey[1], "patch": bkey[0], "states": k,
                        "total": total, "p_value": p,
                        "effect": float(np.abs(counts / total - 1.0 / k).max())})
    tested = [r for r in results if r["states"] > 1]
    alpha = 0.01
    bonferroni = alpha / max(1, len(tested))
    verdict = all(r["p_value"] >= bonferroni for r in tested)
    return {"bins": results, "tested_bins": len(tested), "uniform": verdict,
            "bonferroni_alpha": bonferroni, "samples": samples, "seed": seed,
            "inconclusive": len(tested) == 0}


# ---------------------------------------------------------------------------
# Height-reference gap.


def height_reference_gap(shape: TriangleShape, window_size: int, samples: int,
                         seed: int) -> dict:
    """Max over twists and vertices of |h_ref - h_slope| for the two height
    conventions pinned at the same base; the field is deterministic given
    the T-graph, so samples range over twist draws."""
    window = Window.centered(window_size // 2 + 3)
    sf = SlopeFlow(shape.p_a, shape.p_b, shape.p_c)
    worst = 0.0
    per_sample = []
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(samples):
        tw = random_twist(int(child.generate_state(1)[0]), shape, window)
        t = build_tgraph(shape, tw, window, check=False)
        ref = ReferenceFlow(t)
        whites = set()
        inner = window.shrink(3)
        for m in range(inner.m0, inner.m1 + 1):
            for n in range(inner.n0, inner.n1 + 1):
                i, j = t.index(m, n)
                if ref.valid[i, j]:
                    whites.add((m, n))
        gap = flow_primitive(t, lambda e: sf.edge(e) - ref.edge(e),
                             DualVertex(0, 0), whites)
        g = max(abs(x) for x in gap.values.values())
        per_sample.append(g)
        worst = max(worst, g)
    return {"max_gap": worst, "per_sample": per_sample,
            "window_size": window_size, "seed": seed}
