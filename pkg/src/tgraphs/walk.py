"""Continuous-time martingale random walk on a T-graph, plus the Monte Carlo
and linear-algebra verification suites built on it: ellipticity, exit angles,
uniform crossing, recurrence, and the conjugate Green function.

Hitting events are computed on the embedded jump chain (holding times do not
change hitting probabilities); continuous time is kept for the fixed-time
variance checks.  All samplers are reproducible from an integer seed and
vectorized over batches of walkers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .errors import GeometryError, NumericError, TruncationError, WindowError
from .hexlattice import DualVertex, HexVertex
from .tgraph import TGraph, translate_twist


@dataclass(frozen=True)
class RatePair:
    """Jump structure at a vertex: the two segment endpoints and their rates."""

    vertex: DualVertex
    up: tuple[DualVertex, float]
    down: tuple[DualVertex, float]

    @property
    def total_rate(self) -> float:
        return self.up[1] + self.down[1]


def jump_rates(t: TGraph, v: DualVertex) -> RatePair:
    """Rates 1/|v+- - v| toward the endpoints of the segment containing v."""
    (u1, r1), (u2, r2) = t.out_edges(v)
    return RatePair(vertex=v, up=(u1, r1), down=(u2, r2))


@dataclass
class WalkPath:
    times: np.ndarray
    vertices: list[DualVertex]
    seed: int


class WalkArrays:
    """Flat-array view of a T-graph for vectorized walking."""

    def __init__(self, t: TGraph):
        self.t = t
        M, N = t.theta.shape
        self.M, self.N = M, N
        valid = t.vertex_valid
        ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
        f1 = (ii + t.vertex_targets[..., 0, 0]) * N + (jj + t.vertex_targets[..., 0, 1])
        f2 = (ii + t.vertex_targets[..., 1, 0]) * N + (jj + t.vertex_targets[..., 1, 1])
        self.valid = valid.ravel()
        self.tgt1 = np.where(valid, f1, 0).ravel().astype(np.int64)
        self.tgt2 = np.where(valid, f2, 0).ravel().astype(np.int64)
        with np.errstate(invalid="ignore", divide="ignore"):
            r1 = 1.0 / t.vertex_dist[..., 0]
            r2 = 1.0 / t.vertex_dist[..., 1]
            self.rate1 = np.where(valid, r1, 0.0).ravel()
            self.rate2 = np.where(valid, r2, 0.0).ravel()
            self.total_rate = self.rate1 + self.rate2
            self.p1 = np.where(valid.ravel(), self.rate1 / np.where(
                self.total_rate > 0, self.total_rate, 1.0), 0.0)
        self.pos = t.psi.ravel()

    def flat(self, v: DualVertex) -> int:
        i, j = self.t.index(v.m, v.n)
        return i * self.N + j

    def coords(self, k: int) -> DualVertex:
        return self.t.coords(k // self.N, k % self.N)

    def step(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(states.size)
        return np.where(u < self.p1[states], self.tgt1[states], self.tgt2[states])

    def vertices_in_disk(self, center: complex, radius: float) -> np.ndarray:
        ok = self.valid & (np.abs(self.pos - center) <= radius)
        return np.nonzero(ok)[0]

    def vertices_in_rect(self, x0, x1, y0, y1) -> np.ndarray:
        p = self.pos
        ok = self.valid & (p.real >= x0) & (p.real <= x1) & (p.imag >= y0) & (p.imag <= y1)
        return np.nonzero(ok)[0]


def simulate(t: TGraph, v0: DualVertex, stop, seed: int,
             max_steps: int = 1_000_000) -> WalkPath:
    """Single continuous-time trajectory, stopped when ``stop(v, pos, t)`` is
    true.  Raises TruncationError (with the partial path) if the walk reaches
    a vertex without walk data before stopping."""
    rng = np.random.default_rng(seed)
    wa = WalkArrays(t)
    k = wa.flat(v0)
    times = [0.0]
    verts = [v0]
    now = 0.0
    for _ in range(max_steps):
        v = verts[-1]
        if stop(v, wa.pos[k], now):
            return WalkPath(np.asarray(times), verts, seed)
        if not wa.valid[k]:
            raise TruncationError(
                f"walk reached window margin at {v}",
                partial_path=WalkPath(np.asarray(times), verts, seed))
        now += rng.exponential(1.0 / wa.total_rate[k])
        k = int(wa.step(np.asarray([k]), rng)[0])
        verts.append(wa.coords(k))
        times.append(now)
    raise TruncationError("max_steps exceeded",
                          partial_path=WalkPath(np.asarray(times), verts, seed))


# ---------------------------------------------------------------------------
# Fixed-time variance (uniform ellipticity probe).


def variance_profile(t: TGraph, directions: np.ndarray, n_starts: int,
                     samples: int, seed: int, horizon: float = 1.0) -> dict:
    """Empirical var(X_horizon . n) over a grid of start vertices and unit
    directions; reports the min/max over both."""
    rng = np.random.default_rng(seed)
    wa = WalkArrays(t)
    inner = t.window.shrink(max(4, int(8 * horizon)))
    cand = [k for k in range(wa.pos.size) if wa.valid[k]
            and inner.contains(*wa.coords(k))]
    if not cand:
        raise WindowError("window too small for the requested horizon")
    starts = np.asarray(cand)[np.linspace(0, len(cand) - 1, n_starts).astype(int)]

    var = np.empty((len(starts), len(directions)))
    aborted = 0
    for si, s in enumerate(starts):
        states = np.full(samples, s, dtype=np.int64)
        clock = np.zeros(samples)
        active = np.arange(samples)
        frozen = np.empty(samples, dtype=np.int64)
        ok = np.ones(samples, dtype=bool)
        while active.size:
            st = states[active]
            dt = rng.exponential(1.0, active.size) / wa.total_rate[st]
            done = clock[active] + dt >= horizon
            frozen[active[done]] = st[done]
            clock[active] += dt
            keep = ~done
            nxt = wa.step(st[keep], rng)
            bad = ~wa.valid[nxt]
            if bad.any():
                # window truncation: abort those walkers, report separately
                idx = active[keep][bad]
                frozen[idx] = st[keep][bad]
                ok[idx] = False
                aborted += int(bad.sum())
                keep_idx = active[keep][~bad]
                states[keep_idx] = nxt[~bad]
                active = keep_idx
            else:
                states[active[keep]] = nxt
                active = active[keep]
        disp = wa.pos[frozen[ok]] - wa.pos[s]
        for di, d in enumerate(directions):
            proj = disp.real * d.real + disp.imag * d.imag
            var[si, di] = proj.var()
    return {
        "variances": var,
        "min": float(var.min()),
        "max": float(var.max()),
        "starts": [wa.coords(int(s)) for s in starts],
        "directions": directions,
        "aborted": aborted,
    }


def exact_time1_variance(t: TGraph, v: DualVertex, direction: complex,
                         radius: int = 14, horizon: float = 1.0) -> float:
    """Oracle: var(X_horizon . n) from the truncated generator's matrix
    exponential."""
    from scipy.linalg import expm

    wa = WalkArrays(t)
    center = t.position(v)
    keep = wa.vertices_in_disk(center, radius)
    if wa.flat(v) not in keep:
        raise WindowError("start vertex outside truncation disk")
    look = {int(k): i for i, k in enumerate(keep)}
    n = len(keep)
    Q = np.zeros((n, n))
    for i, k in enumerate(keep):
        for tgt, rate in ((wa.tgt1[k], wa.rate1[k]), (wa.tgt2[k], wa.rate2[k])):
            j = look.get(int(tgt))
            if j is None:
                continue  # truncation: mass reaching the rim is negligible
            Q[i, j] += rate
            Q[i, i] -= rate
    p = expm(Q * horizon)[look[wa.flat(v)]]
    proj = ((wa.pos[keep] - center).real * direction.real
            + (wa.pos[keep] - center).imag * direction.imag)
    mean = float(p @ proj)
    return float(p @ proj**2 - mean**2)


# ---------------------------------------------------------------------------
# Exit angles.


def exit_angle_histogram(t: TGraph, v: DualVertex, radius: float, trials: int,
                         seed: int, eta: float = 0.1, grid: int = 180,
                         max_steps: int = 2_000_000) -> dict:
    """Empirical law of Arg(X_tau - v) at the exit of B(v, radius); reports
    the minimum over a theta-grid of P[angle in [theta, theta + pi - eta]]."""
    rng = np.random.default_rng(seed)
    wa = WalkArrays(t)
    start = wa.flat(v)
    center = wa.pos[start]
    states = np.full(trials, start, dtype=np.int64)
    out_angle = np.full(trials, np.nan)
    active = np.arange(trials)
    aborted = 0
    for _ in range(max_steps):
        if not active.size:
            break
        states[active] = wa.step(states[active], rng)
        p = wa.pos[states[active]]
        done = np.abs(p - center) >= radius
        invalid = ~wa.valid[states[active]]
        aborted += int((invalid & ~done).sum())
        out_angle[active[done]] = np.angle(p[done] - center)
        active = active[~(done | invalid)]
    if active.size:
        raise TruncationError(f"{active.size} walkers did not exit in {max_steps} steps")
    angles = np.sort(out_angle[~np.isnan(out_angle)])
    thetas = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    width = math.pi - eta
    # cyclic sliding-window counts
    ext = np.concatenate([angles, angles + 2 * math.pi])
    lo = np.searchsorted(ext, thetas)
    hi = np.searchsorted(ext, thetas + width)
    probs = (hi - lo) / max(len(angles), 1)
    return {
        "angles": angles,
        "min_halfplane_prob": float(probs.min()),
        "argmin_theta": float(thetas[int(probs.argmin())]),
        "eta": eta,
        "aborted": aborted,
        "trials": trials,
    }


# ---------------------------------------------------------------------------
# Uniform crossing.


def _wilson_ci(successes: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    phat = successes / n
    den = 1.0 + z * z / n
    mid = (phat + z * z / (2 * n)) / den
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / den
    return (max(0.0, mid - half), min(1.0, mid + half))


@dataclass
class CrossingEstimate:
    worst_probability: float
    worst_ci: tuple[float, float]
    per_vertex: list
    trials_per_vertex: int
    aborted: int
    start_count: int
    config: dict = field(default_factory=dict)


def crossing_probability(t: TGraph, z: complex, delta: float, horizontal: bool,
                         reverse: bool, trials: int, seed: int,
                         max_start_vertices: int = 24,
                         max_steps: int = 5_000_000) -> CrossingEstimate:
    """Probability of crossing a 3:1 rectangle between its two quarter-radius
    balls before leaving the rectangle.

    Geometry lives in the scaled frame: the rectangle [0,3]x[0,1] (or its
    vertical transpose) translated by ``z``, with start/target balls of
    radius 1/4 centred at (1/2, 1/2) and (5/2, 1/2); the graph is the
    rescaling of ``t`` by ``delta``.  Start vertices are an even subsample of
    the graph vertices in the start ball, each walked ``trials`` times;
    reported is the worst per-vertex estimate.
    """
    wa = WalkArrays(t)
    s = 1.0 / delta  # scaled frame -> graph frame
    if horizontal:
        rect = ((z.real) * s, (z.real + 3.0) * s, (z.imag) * s, (z.imag + 1.0) * s)
        c1 = (z + complex(0.5, 0.5)) * s
        c2 = (z + complex(2.5, 0.5)) * s
    else:
        rect = ((z.real) * s, (z.real + 1.0) * s, (z.imag) * s, (z.imag + 3.0) * s)
        c1 = (z + complex(0.5, 0.5)) * s
        c2 = (z + complex(0.5, 2.5)) * s
    if reverse:
        c1, c2 = c2, c1
    r = 0.25 * s

    starts = wa.vertices_in_disk(c1, r)
    if starts.size == 0:
        raise WindowError("no T-graph vertices in the start ball")
    if starts.size > max_start_vertices:
        starts = starts[np.linspace(0, starts.size - 1, max_start_vertices).astype(int)]

    rng = np.random.default_rng(seed)
    n_start = starts.size
    states = np.repeat(starts, trials).astype(np.int64)
    owner = np.repeat(np.arange(n_start), trials)
    hits = np.zeros(n_start, dtype=np.int64)
    aborted = 0
    active = np.arange(states.size)
    for _ in range(max_steps):
        if not active.size:
            break
        states[active] = wa.step(states[active], rng)
        p = wa.pos[states[active]]
        hit = np.abs(p - c2) <= r
        out = ((p.real < rect[0]) | (p.real > rect[1])
               | (p.imag < rect[2]) | (p.imag > rect[3])) & ~hit
        invalid = ~wa.valid[states[active]] & ~hit & ~out
        aborted += int(invalid.sum())
        np.add.at(hits, owner[active[hit]], 1)
        active = active[~(hit | out | invalid)]
    if active.size:
        raise TruncationError(f"{active.size} crossing walkers unresolved")

    per_vertex = []
    for i, k in enumerate(starts):
        ci = _wilson_ci(int(hits[i]), trials)
        per_vertex.append({"vertex": wa.coords(int(k)), "p": hits[i] / trials, "ci": ci})
    worst = min(per_vertex, key=lambda d: d["p"])
    return CrossingEstimate(
        worst_probability=float(worst["p"]),
        worst_ci=worst["ci"],
        per_vertex=per_vertex,
        trials_per_vertex=trials,
        aborted=aborted,
        start_count=n_start,
        config={"z": z, "delta": delta, "horizontal": horizontal,
                "reverse": reverse, "seed": seed},
    )


# ---------------------------------------------------------------------------
# Recurrence.


def return_probability(t: TGraph, edge: tuple[DualVertex, DualVertex],
                       radii: list[float], trials: int, seed: int,
                       max_steps: int = 50_000_000) -> dict:
    """Per-radius estimates of P[reach distance R before revisiting the
    starting vertex], the walk started at the head of ``edge``.

    Returns the sequence p_hat(R) * log(R) whose stability expresses the
    logarithmic decay of escape probabilities.
    """
    wa = WalkArrays(t)
    tail, head = edge
    start = wa.flat(head)
    center = wa.pos[start]
    rmax = max(radii)
    rng = np.random.default_rng(seed)
    states = np.full(trials, start, dtype=np.int64)
    best = np.zeros(trials)  # max distance reached before first return
    active = np.arange(trials)
    aborted = 0
    steps = 0
    while active.size and steps < max_steps:
        steps += 1
        states[active] = wa.step(states[active], rng)
        p = wa.pos[states[active]]
        d = np.abs(p - center)
        np.maximum.at(best, active, d)
        returned = states[active] == start
        escaped = d >= rmax
        invalid = ~wa.valid[states[active]] & ~escaped
        aborted += int((invalid & ~returned).sum())
        active = active[~(returned | escaped | invalid)]
    if active.size:
        raise TruncationError(f"{active.size} recurrence walkers unresolved")
    out = []
    for R in radii:
        phat = float((best >= R).mean())
        out.append({"R": R, "p": phat, "p_log_R": phat * math.log(R),
                    "ci": _wilson_ci(int((best >= R).sum()), trials)})
    return {"per_radius": out, "aborted": aborted, "trials": trials,
            "edge": edge, "seed": seed}


# ---------------------------------------------------------------------------
# Conjugate Green function.


@dataclass(frozen=True)
class CutGreenSpec:
    """Cut data: a white face, a half-line from its interior to infinity, and
    the truncation radius of the solve.  ``gauge`` shifts the boundary
    pinning by a constant (the solution is defined up to one)."""

    white: HexVertex
    direction: float  # angle of the half line
    truncation_radius: float
    origin: complex | None = None  # defaults to the face centroid
    gauge: float = 0.0


@dataclass
class GreenSolution:
    values: dict[DualVertex, float]
    origin: complex
    direction: float
    residual: float
    interior: list[DualVertex]
    boundary: list[DualVertex]
    spec: CutGreenSpec
    kappa: float


def _arg_cut(z: np.ndarray, origin: complex, theta_d: float) -> np.ndarray:
    """Argument of z - origin with values in [theta_d, theta_d + 2*pi)."""
    a = np.angle(np.asarray(z) - origin)
    return theta_d + np.mod(a - theta_d, 2.0 * math.pi)


def _crossing_sign(p: np.ndarray, q: np.ndarray, origin: complex,
                   u: complex) -> np.ndarray:
    """+1 where segment p->q crosses the ray  origin + s*u (s>0) clockwise,
    -1 anticlockwise, 0 where it does not cross."""
    a = np.asarray(p) - origin
    b = np.asarray(q) - origin
    ca = u.real * a.imag - u.imag * a.real   # cross(u, a)
    cb = u.real * b.imag - u.imag * b.real
    crossing = ca * cb < 0
    # intersection parameter along the ray must be positive
    ab = b - a
    denom = u.real * ab.imag - u.imag * ab.real
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (a.real * ab.imag - a.imag * ab.real) / denom
    valid = crossing & (s > 0)
    return np.where(valid, np.where(cb < ca, 1.0, -1.0), 0.0)


def predicted_log_coefficient(t: TGraph, w: HexVertex) -> float:
    """Closed-form coefficient of log|z - w| in the conjugate Green function:
    Im/Re of the twist translated to the face's coordinates, over 2*pi.

    The sign matches the embedding chirality used throughout (the one whose
    positions track (alpha/2)m - (gamma/2)n), under which the cut function
    winds opposite to the printed formula's frame.
    """
    lam_w = translate_twist(t.twist, w.m, w.n, t.shape).lam
    if abs(lam_w.real) < 1e-12:
        raise GeometryError("degenerate face: Re of translated twist vanishes")
    return -(lam_w.imag / lam_w.real) / (2.0 * math.pi)


def solve_cut_green(t: TGraph, spec: CutGreenSpec) -> GreenSolution:
    """Discrete harmonic conjugate with a unit discontinuity across the cut.

    Solves, at every interior vertex x of the truncation disk,
        sum_y q_xy (f(y) - f(x)) = sum_y q_xy * sign(x->y crosses the cut),
    with f pinned to arg_cut/2pi on the disk boundary.  The crossing defect is
    rate-weighted so that f(X_t) minus the running signed crossing count is a
    martingale.
    """
    wa = WalkArrays(t)
    fw = t.face(spec.white)
    origin = spec.origin if spec.origin is not None else fw.centroid
    u = complex(math.cos(spec.direction), math.sin(spec.direction))

    keep = wa.vertices_in_disk(origin, spec.truncation_radius)
    if keep.size < 16:
        raise WindowError("truncation disk too small")
    min_ray_dist = _min_distance_to_ray(wa.pos[keep], origin, u)
    if min_ray_dist < 1e-9:
        raise GeometryError("cut passes through a T-graph vertex; nudge direction")

    in_set = np.zeros(wa.pos.size, dtype=bool)
    in_set[keep] = True
    interior_mask = in_set[wa.tgt1] & in_set[wa.tgt2] & in_set
    interior_mask &= wa.valid
    interior = np.nonzero(interior_mask)[0]
    boundary = keep[~interior_mask[keep]]

    idx = np.full(wa.pos.size, -1, dtype=np.int64)
    idx[interior] = np.arange(interior.size)
    theta_d = spec.direction
    f_bnd = _arg_cut(wa.pos[boundary], origin, theta_d) / (2 * math.pi) + spec.gauge
    bval = np.zeros(wa.pos.size)
    bval[boundary] = f_bnd

    rows, cols, vals = [], [], []
    rhs = np.zeros(interior.size)
    pos = wa.pos
    for tgt, rate in ((wa.tgt1, wa.rate1), (wa.tgt2, wa.rate2)):
        tt = tgt[interior]
        rr = rate[interior]
        sign = _crossing_sign(pos[interior], pos[tt], origin, u)
        rhs += rr * sign
        rows.extend(range(interior.size))
        cols.extend(range(interior.size))
        vals.extend(-rr)
        t_int = idx[tt] >= 0
        rows.extend(np.nonzero(t_int)[0])
        cols.extend(idx[tt[t_int]])
        vals.extend(rr[t_int])
        rhs[~t_int] -= rr[~t_int] * bval[tt[~t_int]]

    A = sparse.csr_matrix((vals, (rows, cols)), shape=(interior.size, interior.size))
    f_int = spsolve(A, rhs)
    res = float(np.abs(A @ f_int - rhs).max())
    if not np.isfinite(f_int).all():
        raise NumericError("cut Green solve produced non-finite values", residual=res)

    values: dict[DualVertex, float] = {}
    for k, val in zip(interior, f_int):
        values[wa.coords(int(k))] = float(val)
    for k in boundary:
        values[wa.coords(int(k))] = float(bval[k])
    return GreenSolution(
        values=values,
        origin=origin,
        direction=spec.direction,
        residual=res,
        interior=[wa.coords(int(k)) for k in interior],
        boundary=[wa.coords(int(k)) for k in boundary],
        spec=spec,
        kappa=predicted_log_coefficient(t, spec.white),
    )


def _min_distance_to_ray(pts: np.ndarray, origin: complex, u: complex) -> float:
    d = np.asarray(pts) - origin
    along = d.real * u.real + d.imag * u.imag
    perp = np.abs(d.real * u.imag - d.imag * u.real)
    on_ray = along > 0
    dist = np.where(on_ray, perp, np.abs(d))
    return float(dist.min()) if dist.size else math.inf


def harmonic_residual_off_cut(t: TGraph, sol: GreenSolution) -> float:
    """Max |sum_y q_xy (f(y)-f(x))| over interior vertices whose edges do not
    cross the cut."""
    u = complex(math.cos(sol.direction), math.sin(sol.direction))
    worst = 0.0
    for v in sol.interior:
        acc = 0.0
        crosses = False
        pv = t.position(v)
        for tgt, rate in t.out_edges(v):
            sgn = _crossing_sign(np.asarray([pv]), np.asarray([t.position(tgt)]),
                                 sol.origin, u)[0]
            if sgn != 0.0:
                crosses = True
                break
            acc += rate * (sol.values[tgt] - sol.values[v])
        if not crosses:
            worst = max(worst, abs(acc))
    return worst


def fit_log_coefficient(t: TGraph, sol: GreenSolution, r_min: float,
                        r_max: float) -> tuple[float, float]:
    """Least-squares fit of f - arg_cut/2pi against log r over a radial band;
    returns (coefficient, constant)."""
    pts, ys = [], []
    for v in sol.interior:
        z = t.position(v)
        r = abs(z - sol.origin)
        if r_min <= r <= r_max:
            pts.append(math.log(r))
            ys.append(sol.values[v]
                      - float(_arg_cut(np.asarray([z]), sol.origin, sol.direction)[0])
                      / (2 * math.pi))
    if len(pts) < 8:
        raise WindowError("too few vertices in the fit band")
    Amat = np.vstack([np.asarray(pts), np.ones(len(pts))]).T
    coef, const = np.linalg.lstsq(Amat, np.asarray(ys), rcond=None)[0]
    return float(coef), float(const)


def cut_jump_estimate(t: TGraph, sol: GreenSolution, r_min: float,
                      r_max: float) -> float:
    """Mean jump of f across the cut, over dual edges straddling it in the
    radial band; should be close to 1 away from the cut's origin."""
    u = complex(math.cos(sol.direction), math.sin(sol.direction))
    jumps = []
    for v in sol.interior:
        pv = t.position(v)
        for tgt, _ in t.out_edges(v):
            if tgt not in sol.values:
                continue
            pt = t.position(tgt)
            sgn = _crossing_sign(np.asarray([pv]), np.asarray([pt]), sol.origin, u)[0]
            if sgn == 0.0:
                continue
            r = abs(0.5 * (pv + pt) - sol.origin)
            if r_min <= r <= r_max:
                jumps.append(sgn * (sol.values[tgt] - sol.values[v]))
    if not jumps:
        raise WindowError("no cut-straddling edges in the band")
    return float(np.mean(jumps))
