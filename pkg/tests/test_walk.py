import math

import numpy as np
import pytest

from tgraphs import Twist, Window, build_tgraph
from tgraphs.hexlattice import DualVertex, HexVertex, WHITE
from tgraphs.walk import (
    CutGreenSpec,
    WalkArrays,
    crossing_probability,
    cut_jump_estimate,
    exact_time1_variance,
    exit_angle_histogram,
    fit_log_coefficient,
    harmonic_residual_off_cut,
    jump_rates,
    predicted_log_coefficient,
    return_probability,
    simulate,
    solve_cut_green,
    variance_profile,
)


def test_jump_rates_reciprocal_lengths_and_zero_drift(t_eq, rng):
    for _ in range(50):
        m, n = (int(x) for x in rng.integers(-25, 25, 2))
        v = DualVertex(m, n)
        rp = jump_rates(t_eq, v)
        pv = t_eq.position(v)
        drift = 0.0
        for tgt, rate in (rp.up, rp.down):
            d = t_eq.position(tgt) - pv
            assert abs(rate - 1.0 / abs(d)) < 1e-9 * rate
            drift += (d / abs(d))
        assert abs(drift) < 1e-12


def test_simulate_immediate_stop(t_eq):
    path = simulate(t_eq, DualVertex(0, 0), lambda v, p, tm: True, seed=1)
    assert len(path.vertices) == 1


def test_jump_frequencies_match_rates(t_eq):
    v = DualVertex(0, 0)
    wa = WalkArrays(t_eq)
    k = wa.flat(v)
    rng = np.random.default_rng(2)
    n = 100_000
    nxt = wa.step(np.full(n, k, dtype=np.int64), rng)
    f_up = float((nxt == wa.tgt1[k]).mean())
    assert abs(f_up - wa.p1[k]) < 0.01


def test_walk_is_martingale(t_eq):
    # mean exit position of a ball equals the start within 3 standard errors
    wa = WalkArrays(t_eq)
    k = wa.flat(DualVertex(0, 0))
    centre = wa.pos[k]
    rng = np.random.default_rng(3)
    trials = 10_000
    states = np.full(trials, k, dtype=np.int64)
    active = np.arange(trials)
    out = np.zeros(trials, dtype=np.int64)
    while active.size:
        states[active] = wa.step(states[active], rng)
        done = np.abs(wa.pos[states[active]] - centre) >= 1.0
        out[active[done]] = states[active[done]]
        active = active[~done]
    final = wa.pos[out]
    se = final.std() / math.sqrt(trials)
    assert abs(final.mean() - centre) < 3 * se


def test_variance_profile_bounds_and_symmetry(t_eq):
    dirs = np.exp(1j * np.linspace(0, np.pi, 4, endpoint=False))
    rep = variance_profile(t_eq, dirs, n_starts=6, samples=400, seed=4)
    assert rep["min"] > 0
    # antipodal directions give identical projections
    v = rep["variances"]
    rep2 = variance_profile(t_eq, -dirs, n_starts=6, samples=400, seed=4)
    assert np.allclose(v, rep2["variances"])


def test_variance_against_generator_oracle(equilateral):
    t = build_tgraph(equilateral, Twist.from_angle(0.9), Window.centered(40),
                     check=False)
    v = DualVertex(0, 0)
    direction = complex(1.0, 0.0)
    exact = exact_time1_variance(t, v, direction, radius=12)
    wa = WalkArrays(t)
    k = wa.flat(v)
    rng = np.random.default_rng(5)
    samples = 60_000
    states = np.full(samples, k, dtype=np.int64)
    clock = np.zeros(samples)
    act = np.arange(samples)
    frozen = np.empty(samples, dtype=np.int64)
    while act.size:
        st = states[act]
        dt = rng.exponential(1.0, act.size) / wa.total_rate[st]
        done = clock[act] + dt >= 1.0
        frozen[act[done]] = st[done]
        clock[act] += dt
        keep = ~done
        states[act[keep]] = wa.step(st[keep], rng)
        act = act[keep]
    proj = (wa.pos[frozen] - wa.pos[k]).real
    assert abs(proj.var() - exact) < 0.05 * exact


def test_exit_angles_halfplane_and_full_circle(t_eq):
    hist = exit_angle_histogram(t_eq, DualVertex(0, 0), radius=9.0, trials=4000,
                                seed=6)
    assert hist["min_halfplane_prob"] >= 0.02
    # the full circle has probability one by construction
    angles = hist["angles"]
    assert len(angles) == 4000 - hist["aborted"]


def test_crossing_translate_consistency(equilateral):
    from tgraphs.verify import window_covering

    delta = 0.1
    span = 4.0 / delta + 8
    win = window_covering(equilateral, -span * 0.1, span, -span * 0.1, span)
    t = build_tgraph(equilateral, Twist.from_angle(0.9), win, check=False)
    a = crossing_probability(t, 0.1 + 0.1j, delta, True, False, trials=4000,
                             seed=7, max_start_vertices=8)
    b = crossing_probability(t, 0.6 + 0.4j, delta, True, False, trials=4000,
                             seed=8, max_start_vertices=8)

    def pooled(est):
        hits = sum(d["p"] for d in est.per_vertex) * est.trials_per_vertex
        n = est.start_count * est.trials_per_vertex
        return hits / n, n

    pa, na = pooled(a)
    pb, nb = pooled(b)
    width = 3 * (math.sqrt(pa * (1 - pa) / na) + math.sqrt(pb * (1 - pb) / nb))
    assert abs(pa - pb) < 3 * max(width, 1e-3)


def test_return_probability_trivial_and_monotone(equilateral):
    from tgraphs.verify import window_covering

    win = window_covering(equilateral, -40, 40, -40, 40)
    t = build_tgraph(equilateral, Twist.from_angle(0.9), win, check=False)
    v0 = DualVertex(0, 0)
    tgt = t.out_edges(v0)[0][0]
    rep = return_probability(t, (v0, tgt), [0.1, 8.0, 32.0], trials=800, seed=9)
    ps = [r["p"] for r in rep["per_radius"]]
    assert ps[0] == 1.0  # radius below one segment length
    assert ps[0] >= ps[1] >= ps[2]


@pytest.fixture(scope="module")
def green_solution(equilateral):
    from tgraphs.verify import window_covering

    win = window_covering(equilateral, -42, 42, -42, 42)
    t = build_tgraph(equilateral, Twist.from_angle(0.9), win, check=False)
    w = HexVertex(0, 0, WHITE)
    spec = CutGreenSpec(white=w, direction=0.37, truncation_radius=36.0)
    return t, solve_cut_green(t, spec)


def test_green_harmonic_and_jump(green_solution):
    t, sol = green_solution
    assert harmonic_residual_off_cut(t, sol) < 1e-8
    jump = cut_jump_estimate(t, sol, 10.0, 25.0)
    assert abs(jump - 1.0) < 0.15


def test_green_gauge_shift(green_solution):
    import dataclasses

    t, sol = green_solution
    spec2 = dataclasses.replace(sol.spec, gauge=3.25)
    sol2 = solve_cut_green(t, spec2)
    # shifting the pinning constant shifts the whole solution by it
    diffs = [sol2.values[v] - sol.values[v] for v in sol.interior[:200]]
    assert max(abs(d - 3.25) for d in diffs) < 1e-9


def test_green_log_coefficient(green_solution):
    t, sol = green_solution
    coef, _ = fit_log_coefficient(t, sol, 8.0, 24.0)
    pred = predicted_log_coefficient(t, sol.spec.white)
    assert abs(coef - pred) < 0.10 * abs(pred)
