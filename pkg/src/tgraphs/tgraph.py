"""T-graph construction.

A triangle with angles (pi*p_a, pi*p_b, pi*p_c) and a unit twist define a
flow on the edges of the hexagonal lattice; its dual is a gradient flow on
the triangular lattice, and the primitive of that gradient maps the triangular
lattice onto a union of segments in the plane: the T-graph.  Black faces of
the dual flatten onto segments, white faces map to positively-oriented
similar copies of the triangle.

With ``theta(m, n) = arg(lam) + m*Arg(beta/gamma) + n*Arg(beta/alpha)`` and
``C(m, n) = cos(theta) * exp(i*theta)``, the flow out of the white vertex
(m, n) equals ``alpha*C``, ``beta*C`` or ``gamma*C`` on its vertical, ne-sw
and nw-se edge respectively.  This form is numerically stable on any window
(no large powers) and makes zero circulation around dual faces transparent:
(alpha+beta+gamma)*C = 0 around white faces, and the conjugate identity
handles black faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdjacencyError, DegeneracyError, SlopeError, WindowError
from .hexlattice import (
    BLACK,
    NE_SW,
    NW_SE,
    VERTICAL,
    WHITE,
    DualVertex,
    HexEdge,
    HexVertex,
    Window,
    black_face,
    dual_edge_info,
    white_face,
)

_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class TriangleShape:
    """Triangle with angles (pi*p_a, pi*p_b, pi*p_c), circumdiameter 1,
    vertex A at the origin and B on the positive real axis."""

    p_a: float
    p_b: float
    p_c: float
    A: complex
    B: complex
    C: complex

    @property
    def alpha(self) -> complex:
        return self.C - self.B

    @property
    def beta(self) -> complex:
        return self.A - self.C

    @property
    def gamma(self) -> complex:
        return self.B - self.A

    @property
    def slope(self) -> tuple[float, float, float]:
        return (self.p_a, self.p_b, self.p_c)

    @property
    def area(self) -> float:
        return 0.5 * abs((self.B - self.A).real * (self.C - self.A).imag
                         - (self.B - self.A).imag * (self.C - self.A).real)


def build_triangle(p_a: float, p_b: float, p_c: float) -> TriangleShape:
    """Triangle with the given angle fractions, normalized as above."""
    for p in (p_a, p_b, p_c):
        if not (0.0 < p < 1.0):
            raise SlopeError(f"angle fractions must lie in (0, 1), got {(p_a, p_b, p_c)}")
    if abs(p_a + p_b + p_c - 1.0) > _SLOPE_TOL:
        raise SlopeError(f"angle fractions must sum to 1, got sum {p_a + p_b + p_c!r}")
    # Law of sines with circumdiameter 1: the side opposite each vertex has
    # length sin of that vertex angle.
    a = complex(0.0)
    b = complex(math.sin(math.pi * p_c))
    c = math.sin(math.pi * p_b) * complex(math.cos(math.pi * p_a), math.sin(math.pi * p_a))
    shape = TriangleShape(p_a, p_b, p_c, a, b, c)
    assert abs(shape.alpha + shape.beta + shape.gamma) < 1e-12
    return shape


@dataclass(frozen=True)
class Twist:
    """Multiplicative twist of the edge flow; unit modulus for the canonical
    construction.  Translations multiply it by powers of beta/gamma and
    beta/alpha, which moves it off the unit circle for scalene triangles."""

    lam: complex

    @classmethod
    def from_angle(cls, angle: float) -> "Twist":
        return cls(complex(math.cos(angle), math.sin(angle)))

    @classmethod
    def from_turns(cls, turns: float) -> "Twist":
        return cls.from_angle(2.0 * math.pi * turns)

    @property
    def angle(self) -> float:
        return math.atan2(self.lam.imag, self.lam.real)

    @property
    def is_unit(self) -> bool:
        return abs(abs(self.lam) - 1.0) <= 1e-12


def linear_map(shape: TriangleShape, m, n):
    """Linear approximation of the dual-vertex positions: (alpha/2)m - (gamma/2)n.

    Accepts scalars or arrays; real-valued (m, n) interpolate off-lattice.
    """
    return (shape.alpha / 2.0) * np.asarray(m) - (shape.gamma / 2.0) * np.asarray(n)


def translate_twist(twist: Twist, m: int, n: int, shape: TriangleShape) -> Twist:
    """Twist of the same T-graph re-based at the dual vertex (m, n)."""
    zeta = shape.beta / shape.gamma
    eta = shape.beta / shape.alpha
    lam = twist.lam * zeta**m * eta**n
    if abs(abs(zeta) - 1.0) < 1e-12 and abs(abs(eta) - 1.0) < 1e-12:
        lam /= abs(lam)  # pure rotations: clean accumulated drift
    return Twist(lam)


@dataclass(frozen=True)
class Segment:
    """Image of a black face: a straight segment with one interior vertex."""

    black: HexVertex
    corners: tuple[DualVertex, DualVertex, DualVertex]
    offsets: tuple[float, float, float]  # signed positions along `direction`
    interior_index: int
    direction: complex

    @property
    def interior_vertex(self) -> DualVertex:
        return self.corners[self.interior_index]

    @property
    def endpoints(self) -> tuple[DualVertex, DualVertex]:
        return tuple(self.corners[i] for i in range(3) if i != self.interior_index)

    @property
    def length(self) -> float:
        return max(self.offsets) - min(self.offsets)


@dataclass(frozen=True)
class WhiteFace:
    white: HexVertex
    corners: tuple[DualVertex, DualVertex, DualVertex]
    positions: tuple[complex, complex, complex]

    @property
    def centroid(self) -> complex:
        return sum(self.positions) / 3.0

    def angles(self) -> tuple[float, float, float]:
        out = []
        for i in range(3):
            u = self.positions[(i + 1) % 3] - self.positions[i]
            v = self.positions[(i - 1) % 3] - self.positions[i]
            dot = (u.conjugate() * v).real
            crs = (u.conjugate() * v).imag
            out.append(abs(math.atan2(crs, dot)))
        return tuple(out)


class TGraph:
    """Array-backed T-graph over a coordinate window.

    The grid index (i, j) corresponds to lattice coordinates
    (window.m0 + i, window.n0 + j).  Positions are pinned so that the dual
    vertex (0, 0) sits at 0 regardless of the window.

    Immutable by convention after construction; safe to share across threads.
    """

    def __init__(self, shape: TriangleShape, twist: Twist, window: Window):
        self.shape = shape
        self.twist = twist
        self.window = window
        self._build()

    # -- construction ------------------------------------------------------

    def _build(self) -> None:
        sh = self.shape
        m0, m1, n0, n1 = self.window
        if m1 < m0 or n1 < n0:
            raise WindowError(f"empty window {self.window}")
        lam = self.twist.lam
        if lam == 0:
            raise DegeneracyError("zero twist")
        arg_l = math.atan2(lam.imag, lam.real)
        zeta = sh.beta / sh.gamma
        eta = sh.beta / sh.alpha
        az = math.atan2(zeta.imag, zeta.real)
        ah = math.atan2(eta.imag, eta.real)

        ms = np.arange(m0, m1 + 1)
        ns = np.arange(n0, n1 + 1)
        theta = arg_l + az * ms[:, None] + ah * ns[None, :]
        self.theta = theta
        self.cos = np.cos(theta)
        self.C = self.cos * np.exp(1j * theta)

        # Primitive of the dual flow, pinned to 0 at dual vertex (0, 0):
        # east step (m,n)->(m+1,n) adds alpha*C(m,n); north-east step
        # (m,n)->(m,n+1) adds -gamma*C(m,n).  The sums along axes are
        # geometric series with the closed form
        #   sum_{k=0}^{K-1} cos(x+kd) e^{i(x+kd)} = K/2 + e^{2ix}
        #       (e^{2idK}-1) / (2 (e^{2id}-1)),
        # valid for negative K as well; evaluating it pointwise keeps the
        # position error window-independent (~1e-15) instead of accumulating.
        psi = (sh.alpha * _cis_cos_sum(arg_l, az, ms)[:, None]
               - sh.gamma * _cis_cos_sum(arg_l + az * ms[:, None], ah, ns[None, :]))
        self.psi = psi

        # Black-face data. Face (p, q) has dual corners P0=(p,q),
        # P1=(p+1,q-1), P2=(p+1,q) at signed offsets (0, t1, t2) along the
        # unit direction exp(i*(arg(alpha) + theta(p, q))).
        t1 = np.full(theta.shape, np.nan)
        t2 = np.full(theta.shape, np.nan)
        t1[:, 1:] = -abs(sh.beta) * self.cos[:, :-1]
        t2[:, :] = abs(sh.alpha) * self.cos
        self.face_t1 = t1
        self.face_t2 = t2
        self.face_dir = np.exp(1j * (math.atan2(sh.alpha.imag, sh.alpha.real) + theta))
        self.face_valid = np.zeros(theta.shape, dtype=bool)
        self.face_valid[: theta.shape[0] - 1, 1:] = True

        with np.errstate(invalid="ignore"):
            med0 = t1 * t2 < 0.0
            med1 = (0.0 - t1) * (t2 - t1) < 0.0
            med2 = (0.0 - t2) * (t1 - t2) < 0.0
        interior = np.full(theta.shape, -1, dtype=np.int8)
        interior[med0] = 0
        interior[med1] = 1
        interior[med2] = 2
        self.face_interior = interior

        self._build_vertex_tables()

    def _build_vertex_tables(self) -> None:
        """Per-vertex walk structure on the margin-1 interior of the window."""
        M, N = self.theta.shape
        t1, t2 = self.face_t1, self.face_t2
        shp = (M, N)
        role = np.full(shp, -1, dtype=np.int8)       # corner role in containing face
        cont_dm = np.zeros(shp, dtype=np.int8)       # containing face offset
        cont_dn = np.zeros(shp, dtype=np.int8)
        off_self = np.full(shp, np.nan)              # own offset along the segment
        tgt = np.full(shp + (2, 2), 0, dtype=np.int32)  # two targets, (dm over grid)
        dist = np.full(shp + (2,), np.nan)

        ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
        inner = (ii >= 1) & (ii <= M - 2) & (jj >= 1) & (jj <= N - 2)

        def shifted(arr, dm, dn):
            # arr evaluated at grid point (i+dm, j+dn), NaN outside
            out = np.full(shp, np.nan, dtype=arr.dtype)
            src_i = slice(max(dm, 0), M + min(dm, 0))
            src_j = slice(max(dn, 0), N + min(dn, 0))
            dst_i = slice(max(-dm, 0), M + min(-dm, 0))
            dst_j = slice(max(-dn, 0), N + min(-dn, 0))
            out[dst_i, dst_j] = arr[src_i, src_j]
            return out

        t1_00, t2_00 = t1, t2                      # vertex as P0 of face (m, n)
        t1_m1p1 = shifted(t1, -1, +1)              # as P1 of face (m-1, n+1)
        t2_m1p1 = shifted(t2, -1, +1)
        t1_m10 = shifted(t1, -1, 0)                # as P2 of face (m-1, n)
        t2_m10 = shifted(t2, -1, 0)

        with np.errstate(invalid="ignore"):
            c0 = inner & (t1_00 * t2_00 < 0.0)
            c1 = inner & ((0.0 - t1_m1p1) * (t2_m1p1 - t1_m1p1) < 0.0)
            c2 = inner & ((0.0 - t2_m10) * (t1_m10 - t2_m10) < 0.0)

        role[c0], role[c1], role[c2] = 0, 1, 2
        cont_dm[c1] = -1
        cont_dn[c1] = +1
        cont_dm[c2] = -1

        off_self[c0] = 0.0
        off_self[c1] = t1_m1p1[c1]
        off_self[c2] = t2_m10[c2]

        # targets as grid offsets (dm, dn) and distances along the segment
        tgt[c0, 0] = np.array([1, -1])
        tgt[c0, 1] = np.array([1, 0])
        dist[c0, 0] = np.abs(t1_00[c0])
        dist[c0, 1] = np.abs(t2_00[c0])

        tgt[c1, 0] = np.array([-1, 1])
        tgt[c1, 1] = np.array([0, 1])
        dist[c1, 0] = np.abs(t1_m1p1[c1])
        dist[c1, 1] = np.abs(t2_m1p1[c1] - t1_m1p1[c1])

        tgt[c2, 0] = np.array([-1, 0])
        tgt[c2, 1] = np.array([0, -1])
        dist[c2, 0] = np.abs(t2_m10[c2])
        dist[c2, 1] = np.abs(t1_m10[c2] - t2_m10[c2])

        # direction of the containing segment, per vertex
        vdir = np.full(shp, np.nan, dtype=np.complex128)
        fdir = self.face_dir
        vdir[c0] = fdir[c0]
        vdir[c1] = shifted(fdir, -1, +1)[c1]
        vdir[c2] = shifted(fdir, -1, 0)[c2]

        self.vertex_role = role
        self.vertex_face_dm = cont_dm
        self.vertex_face_dn = cont_dn
        self.vertex_offset = off_self
        self.vertex_targets = tgt
        self.vertex_dist = dist
        self.vertex_dir = vdir
        self.vertex_valid = role >= 0
        self._vertex_conflicts = (c0.astype(int) + c1.astype(int) + c2.astype(int))
        self._inner_mask = inner

    # -- indexing helpers ---------------------------------------------------

    def index(self, m: int, n: int) -> tuple[int, int]:
        if not self.window.contains(m, n):
            raise WindowError(f"({m}, {n}) outside window {self.window}")
        return (m - self.window.m0, n - self.window.n0)

    def coords(self, i: int, j: int) -> DualVertex:
        return DualVertex(self.window.m0 + i, self.window.n0 + j)

    @property
    def interior_window(self) -> Window:
        """Window on which per-vertex walk data is available."""
        return self.window.shrink(1)

    @property
    def face_window(self) -> Window:
        m0, m1, n0, n1 = self.window
        return Window(m0, m1 - 1, n0 + 1, n1)

    # -- scalar accessors ----------------------------------------------------

    def position(self, v: DualVertex) -> complex:
        i, j = self.index(v.m, v.n)
        return complex(self.psi[i, j])

    def C_at(self, m: int, n: int) -> complex:
        i, j = self.index(m, n)
        return complex(self.C[i, j])

    def flow(self, w: HexVertex, b: HexVertex) -> complex:
        """Edge flow phi(w->b); antisymmetric under swapping the arguments."""
        sign = 1.0
        if w.color == BLACK and b.color == WHITE:
            w, b, sign = b, w, -1.0
        if w.color != WHITE or b.color != BLACK:
            raise AdjacencyError("flow needs one white and one black vertex")
        off = (w.m - b.m, w.n - b.n)
        coef = {(0, 0): self.shape.alpha, (0, -1): self.shape.beta,
                (1, -1): self.shape.gamma}.get(off)
        if coef is None:
            raise AdjacencyError(f"{w} and {b} are not adjacent")
        return sign * coef * self.C_at(w.m, w.n)

    def edge_flow(self, e: HexEdge) -> complex:
        """phi on the white-to-black orientation of ``e``."""
        return self.flow(e.white, e.black)

    def dual_flow(self, tail: DualVertex, head: DualVertex) -> complex:
        info = dual_edge_info(tail, head)
        return info.white_sign * self.edge_flow(info.crossed)

    def segment(self, b: HexVertex) -> Segment:
        if b.color != BLACK:
            raise AdjacencyError("segment() expects a black vertex")
        i, j = self.index(b.m, b.n)
        if not self.face_valid[i, j]:
            raise WindowError(f"black face {b} not fully inside window")
        offs = (0.0, float(self.face_t1[i, j]), float(self.face_t2[i, j]))
        return Segment(
            black=b,
            corners=black_face(b.m, b.n),
            offsets=offs,
            interior_index=int(self.face_interior[i, j]),
            direction=complex(self.face_dir[i, j]),
        )

    def face(self, w: HexVertex) -> WhiteFace:
        if w.color != WHITE:
            raise AdjacencyError("face() expects a white vertex")
        corners = white_face(w.m, w.n)
        pos = tuple(self.position(c) for c in corners)
        return WhiteFace(white=w, corners=corners, positions=pos)

    def containing_segment(self, v: DualVertex) -> HexVertex:
        """Black vertex of the unique segment containing ``v`` in its interior."""
        i, j = self.index(v.m, v.n)
        if not self.vertex_valid[i, j]:
            raise WindowError(f"walk data unavailable at {v} (window margin)")
        return HexVertex(v.m + int(self.vertex_face_dm[i, j]),
                         v.n + int(self.vertex_face_dn[i, j]), BLACK)

    def out_edges(self, v: DualVertex) -> list[tuple[DualVertex, float]]:
        """The two outgoing walk edges (target, rate) at ``v``."""
        i, j = self.index(v.m, v.n)
        if not self.vertex_valid[i, j]:
            raise WindowError(f"walk data unavailable at {v} (window margin)")
        out = []
        for k in range(2):
            dm, dn = self.vertex_targets[i, j, k]
            out.append((DualVertex(v.m + int(dm), v.n + int(dn)),
                        1.0 / float(self.vertex_dist[i, j, k])))
        return out

    def linear(self, m, n):
        return linear_map(self.shape, m, n)

    def mean_segment_length(self) -> float:
        t1 = self.face_t1[self.face_valid]
        t2 = self.face_t2[self.face_valid]
        z = np.zeros_like(t1)
        return float(np.mean(np.max([z, t1, t2], axis=0) - np.min([z, t1, t2], axis=0)))


def _cis_cos(theta: np.ndarray) -> np.ndarray:
    return np.cos(theta) * np.exp(1j * theta)


def _cis_cos_sum(x, d: float, K):
    """sum_{k=0}^{K-1} cos(x + k d) exp(i (x + k d)) for integer K (of either
    sign), in closed form."""
    x = np.asarray(x, dtype=float)
    K = np.asarray(K)
    den = np.exp(2j * d) - 1.0
    if abs(den) < 1e-9:
        # d ~ 0 mod pi: fall back to an explicit sum (tiny windows only)
        shape = np.broadcast_shapes(x.shape, K.shape)
        out = np.zeros(shape, dtype=np.complex128)
        xb = np.broadcast_to(x, shape)
        Kb = np.broadcast_to(K, shape)
        it = np.nditer(Kb, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            kk = int(Kb[idx])
            ks = np.arange(0, kk) if kk >= 0 else np.arange(kk, 0)
            s = _cis_cos(xb[idx] + d * ks).sum()
            out[idx] = s if kk >= 0 else -s
        return out
    return K / 2.0 + np.exp(2j * x) * (np.exp(2j * d * K) - 1.0) / (2.0 * den)


def build_tgraph(shape: TriangleShape, twist: Twist, window: Window,
                 check: bool = True, eps_deg: float = 1e-8) -> TGraph:
    """Build the T-graph over ``window``; optionally verify non-degeneracy."""
    t = TGraph(shape, twist, window)
    if check:
        rep = check_nondegenerate(t, eps_deg=eps_deg)
        if not rep.ok:
            raise DegeneracyError(
                f"degenerate twist {twist.lam!r}: {rep.summary()}",
                vertices=rep.degenerate_faces[:16] + rep.vertex_violations[:16],
            )
    return t


@dataclass
class NondegeneracyReport:
    min_face_area: float
    area_threshold: float
    degenerate_faces: list
    vertex_violations: list
    segment_length_range: tuple[float, float]
    short_segments: list
    mean_segment_length: float
    checked_vertices: int = 0
    checked_faces: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.degenerate_faces and not self.vertex_violations and not self.short_segments

    def summary(self) -> str:
        return (f"min white-face area {self.min_face_area:.3e} (threshold "
                f"{self.area_threshold:.3e}), {len(self.degenerate_faces)} degenerate faces, "
                f"{len(self.vertex_violations)} vertex violations, "
                f"{len(self.short_segments)} short segments, segment lengths in "
                f"{self.segment_length_range}")


def check_nondegenerate(t: TGraph, eps_deg: float = 1e-8) -> NondegeneracyReport:
    """Report-style non-degeneracy check.

    Verifies white-face areas, the every-vertex-in-exactly-three-segments
    property (one of them interior), and that segment lengths are bounded
    away from zero across the window.
    """
    lmean = t.mean_segment_length()
    area_thr = eps_deg * lmean * lmean

    # White-face areas scale with cos^2(theta).
    face_areas = t.cos**2 * t.shape.area
    m_ok, n_ok = t.theta.shape[0] - 1, t.theta.shape[1] - 1
    wmask = np.zeros_like(face_areas, dtype=bool)
    wmask[:m_ok, :n_ok] = True
    bad = wmask & (face_areas < area_thr)
    degenerate_faces = [t.coords(i, j) for i, j in zip(*np.nonzero(bad))]

    # Vertex structure: the three candidate faces must yield exactly one
    # interior role.
    conflicts = t._inner_mask & (t._vertex_conflicts != 1)
    vertex_violations = [t.coords(i, j) for i, j in zip(*np.nonzero(conflicts))]

    t1 = t.face_t1[t.face_valid]
    t2 = t.face_t2[t.face_valid]
    z = np.zeros_like(t1)
    lengths = np.max([z, t1, t2], axis=0) - np.min([z, t1, t2], axis=0)
    corner_gaps = np.min(np.abs([t1, t2, t1 - t2]), axis=0)
    short = t.face_valid.copy()
    short[t.face_valid] = (lengths < eps_deg * lmean) | (corner_gaps < eps_deg * lmean)
    short_segments = [t.coords(i, j) for i, j in zip(*np.nonzero(short))]

    return NondegeneracyReport(
        min_face_area=float(face_areas[wmask].min()) if wmask.any() else math.nan,
        area_threshold=area_thr,
        degenerate_faces=degenerate_faces,
        vertex_violations=vertex_violations,
        segment_length_range=(float(lengths.min()), float(lengths.max())),
        short_segments=short_segments,
        mean_segment_length=lmean,
        checked_vertices=int(t._inner_mask.sum()),
        checked_faces=int(t.face_valid.sum()),
    )


def embed_hex(t: TGraph) -> dict[HexVertex, complex]:
    """Proper embedding of the hexagonal lattice read off the T-graph: whites
    at face centroids, blacks at the interior vertex of their segment."""
    out: dict[HexVertex, complex] = {}
    m0, m1, n0, n1 = t.window
    for m in range(m0, m1):
        for n in range(n0, n1):
            w = HexVertex(m, n, WHITE)
            out[w] = t.face(w).centroid
    fw = t.face_window
    for m in range(fw.m0, fw.m1 + 1):
        for n in range(fw.n0, fw.n1 + 1):
            b = HexVertex(m, n, BLACK)
            seg = t.segment(b)
            out[b] = t.position(seg.interior_vertex)
    return out
