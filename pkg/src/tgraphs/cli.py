"""Command-line interface.

Subcommands: build, walk, cross, recur, green, sample, tile, domain, stats,
verify, render.  Every stochastic output is a pure function of (config,
seed); artifacts are deterministic JSON/CSV/SVG, with timestamps confined to
a ``.meta.json`` sidecar.  Slopes accept fractions ("1/3"); twists are given
as angles in turns.
"""

from __future__ import annotations

import os

# thread count for the numeric backend; must be set before numpy loads
_threads = os.environ.get("TGRAPHS_THREADS")
if _threads is not None:
    os.environ.setdefault("OMP_NUM_THREADS", _threads)
    os.environ.setdefault("OPENBLAS_NUM_THREADS", _threads)

import argparse
import csv
import sys
from fractions import Fraction

import numpy as np

from . import jsonio, svgout
from .errors import TGraphError
from .hexlattice import DualVertex, HexVertex, WHITE, Window
from .tgraph import Twist, build_tgraph, build_triangle, check_nondegenerate
from .ust import WiredDomain, wilson_wired
from .domains import (
    ContinuousDomain,
    DomainForest,
    build_domain,
    domain_heights,
    domain_matching,
)
from .gibbs import (
    gibbs_conditional_check,
    height_reference_gap,
    random_twist,
    sample_tiling,
    tile_densities,
)
from .walk import (
    CutGreenSpec,
    crossing_probability,
    exit_angle_histogram,
    fit_log_coefficient,
    harmonic_residual_off_cut,
    predicted_log_coefficient,
    return_probability,
    solve_cut_green,
)
from . import verify as verify_mod


def _frac(s: str) -> float:
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def _slope_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pa", type=_frac, default=_frac("1/3"),
                   help="vertical-class density (fraction ok, e.g. 1/3)")
    p.add_argument("--pb", type=_frac, default=_frac("1/3"))
    p.add_argument("--pc", type=_frac, default=_frac("1/3"))


def _twist_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda-turns", type=float, default=None,
                   help="twist angle in turns on the unit circle")
    g.add_argument("--random-lambda", action="store_true",
                   help="draw a non-degenerate twist from the seed")


def _resolve_twist(args, shape, window) -> Twist:
    if args.lambda_turns is not None:
        return Twist.from_turns(args.lambda_turns)
    return random_twist(args.seed, shape, window)


def _cfg(config: dict) -> dict:
    return {k: v for k, v in config.items() if not callable(v)}


def _write(path: str, obj, config: dict) -> None:
    jsonio.write_json(path, obj)
    jsonio.write_sidecar(path + ".meta.json", _cfg(config))
    print(f"wrote {path}")


def _write_csv(path: str, header: list[str], rows: list[list], config: dict) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    jsonio.write_sidecar(path + ".meta.json", _cfg(config))
    print(f"wrote {path}")


def cmd_build(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    win = Window.centered(args.window // 2)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=True)
    _write(args.out, jsonio.tgraph_to_dict(t), vars(args) | {"cmd": "build"})
    if args.svg:
        svgout.draw_tgraph(t, faces=args.faces).write(args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_walk(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    win = Window.centered(args.window // 2)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    hist = exit_angle_histogram(t, DualVertex(0, 0), args.radius, args.trials,
                                args.seed)
    rows = [[float(a)] for a in hist["angles"]]
    _write_csv(args.out, ["exit_angle"], rows, vars(args) | {"cmd": "walk"})
    print(f"min half-plane probability (eta={hist['eta']}): "
          f"{hist['min_halfplane_prob']:.4f}  trials={hist['trials']} "
          f"aborted={hist['aborted']} seed={args.seed}")
    if args.svg:
        from .walk import simulate

        path = simulate(t, DualVertex(0, 0),
                        lambda v, p, tm: abs(p) >= args.radius, seed=args.seed)
        d = svgout.draw_tgraph(t)
        d.polyline([t.position(v) for v in path.vertices],
                   color=svgout.TREE_COLOR, width=0.05)
        d.write(args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_cross(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    span = 4.0 / args.delta + 8
    win = verify_mod.window_covering(shape, -span * 0.1, span, -span * 0.1, span)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    est = crossing_probability(t, complex(args.zx, args.zy), args.delta,
                               not args.vertical, args.reverse, args.trials,
                               args.seed, max_start_vertices=args.max_starts)
    rows = [[str(d["vertex"].m) + ":" + str(d["vertex"].n), d["p"],
             d["ci"][0], d["ci"][1], est.trials_per_vertex, args.seed]
            for d in est.per_vertex]
    _write_csv(args.out, ["start_vertex", "estimate", "ci_lo", "ci_hi",
                          "trials", "seed"], rows, vars(args) | {"cmd": "cross"})
    print(f"worst-case estimate {est.worst_probability:.5f} "
          f"CI=({est.worst_ci[0]:.5f},{est.worst_ci[1]:.5f}) aborted={est.aborted}")
    return 0


def cmd_recur(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    rmax = max(args.radii)
    win = verify_mod.window_covering(shape, -1.15 * rmax, 1.15 * rmax,
                                     -1.15 * rmax, 1.15 * rmax)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    v0 = DualVertex(0, 0)
    tgt = t.out_edges(v0)[0][0]
    rep = return_probability(t, (v0, tgt), args.radii, args.trials, args.seed)
    rows = [[r["R"], r["p"], r["p_log_R"], r["ci"][0], r["ci"][1],
             args.trials, args.seed] for r in rep["per_radius"]]
    _write_csv(args.out, ["R", "p_escape", "p_log_R", "ci_lo", "ci_hi",
                          "trials", "seed"], rows, vars(args) | {"cmd": "recur"})
    for r in rep["per_radius"]:
        print(f"R={r['R']:g}: p={r['p']:.4f}  p*logR={r['p_log_R']:.4f}")
    return 0


def cmd_green(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    span = args.truncation + 10
    win = verify_mod.window_covering(shape, -span, span, -span, span)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    w = HexVertex(0, 0, WHITE)
    sol = solve_cut_green(t, CutGreenSpec(white=w, direction=args.direction,
                                          truncation_radius=args.truncation))
    res = harmonic_residual_off_cut(t, sol)
    coef, const = fit_log_coefficient(t, sol, args.fit_lo, args.fit_hi)
    pred = predicted_log_coefficient(t, w)
    rows = [[v.m, v.n, sol.values[v]] for v in sorted(sol.values)]
    _write_csv(args.out, ["m", "n", "value"], rows, vars(args) | {"cmd": "green"})
    print(f"harmonic residual off cut: {res:.2e}")
    print(f"log coefficient: fitted {coef:.6f}  closed-form {pred:.6f}  "
          f"rel err {abs(coef - pred) / abs(pred):.2%}")
    return 0


def cmd_sample(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    win = Window.centered(args.window // 2)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    dom = WiredDomain.from_window(t, win.shrink(1))
    forest = wilson_wired(dom, args.seed)
    _write(args.out, jsonio.forest_to_dict(forest), vars(args) | {"cmd": "sample"})
    if args.svg:
        svgout.draw_forest(t, forest).write(args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_tile(args) -> int:
    shape = build_triangle(args.pa, args.pb, args.pc)
    _t, matching, _faces = sample_tiling(shape, Window.centered(args.window // 2),
                                         args.seed, margin=args.margin)
    _write(args.out, jsonio.matching_to_dict(matching), vars(args) | {"cmd": "tile"})
    if args.svg:
        svgout.draw_tiling(matching).write(args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_domain(args) -> int:
    import json

    shape = build_triangle(args.pa, args.pb, args.pc)
    with open(args.shape) as f:
        poly = json.load(f)
    pts = [complex(p[0], p[1]) for p in poly["boundary"]]
    marked = complex(*poly.get("marked", poly["boundary"][0]))
    u = ContinuousDomain.polygon(pts, marked=marked)
    span = max(abs(z) for z in u.boundary) / args.delta
    win = Window(int(-0.7 * span) - 20, int(1.8 * span) + 20,
                 int(-0.7 * span) - 20, int(1.8 * span) + 20)
    tw = _resolve_twist(args, shape, win)
    t = build_tgraph(shape, tw, win, check=False)
    dd = build_domain(t, u, delta=args.delta, corridor=args.corridor)
    _write(args.out, jsonio.domain_to_dict(dd), vars(args) | {"cmd": "domain"})
    if args.svg:
        svgout.draw_domain(t, dd).write(args.svg)
        print(f"wrote {args.svg}")
    print(f"loop {len(dd.loop)} vertices; wired domain {dd.wired.size}; "
          f"dimer region {len(dd.whites)}+{len(dd.blacks)} vertices; "
          f"marked face adjacent: {dd.marked_adjacent}")
    return 0


def cmd_stats(args) -> int:
    slope = (args.pa, args.pb, args.pc)
    if args.which == "densities":
        td = tile_densities(slope, args.window, args.samples, args.seed)
        rows = [list(r) for r in td.per_sample]
        _write_csv(args.out, ["rho_a", "rho_b", "rho_c"], rows,
                   vars(args) | {"cmd": "stats"})
        print(f"densities: {td.rho_a:.4f} {td.rho_b:.4f} {td.rho_c:.4f} "
              f"(target {slope[0]:.4f} {slope[1]:.4f} {slope[2]:.4f}) "
              f"tiles={td.counted} seed={args.seed}")
    elif args.which == "gibbs":
        rep = gibbs_conditional_check(slope, args.window, args.samples, args.seed)
        rows = [[str(r["patch"]), r["states"], r["total"], r["p_value"], r["effect"]]
                for r in rep["bins"]]
        _write_csv(args.out, ["patch", "states", "total", "p_value", "effect"],
                   rows, vars(args) | {"cmd": "stats"})
        print(f"conditional-uniformity bins tested: {rep['tested_bins']}, "
              f"uniform: {rep['uniform']}, inconclusive: {rep['inconclusive']}")
    else:  # hgap
        shape = build_triangle(*slope)
        rep = height_reference_gap(shape, args.window, args.samples, args.seed)
        rows = [[g] for g in rep["per_sample"]]
        _write_csv(args.out, ["max_gap"], rows, vars(args) | {"cmd": "stats"})
        print(f"max |h_ref - h_slope| over {args.samples} twists: {rep['max_gap']:.4f}")
    return 0


def cmd_verify(args) -> int:
    names = list(verify_mod.SUITES) if args.suite == "all" else [args.suite]
    reports = []
    ok = True
    for name in names:
        rep = verify_mod.run_suite(name, seed=args.seed)
        reports.append(rep)
        ok &= rep["passed"]
        print(f"[{'PASS' if rep['passed'] else 'FAIL'}] {name} "
              f"({rep['runtime_s']}s)")
    if args.out:
        _write(args.out, reports, vars(args) | {"cmd": "verify"})
    return 0 if ok else 1


def cmd_render(args) -> int:
    import json

    with open(args.input) as f:
        blob = json.load(f)
    if "directed_edges" in blob:  # a T-graph dump
        t = jsonio.tgraph_from_dict(blob)
        svgout.draw_tgraph(t, faces=args.faces).write(args.out)
    elif "pairs" in blob:  # a matching dump
        from .dimers import Matching

        pairs = {tuple(r["white"]): HexVertex(r["black"][0], r["black"][1], "black")
                 for r in blob["pairs"]}
        svgout.draw_tiling(Matching(pairs)).write(args.out)
    else:
        raise TGraphError("unrecognized artifact; expected a T-graph or matching dump")
    print(f"wrote {args.out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tgraphs",
        description="T-graphs for the hexagonal dimer model: build, walk, "
                    "sample trees and tilings, construct domains, verify.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, window_default=40):
        _slope_args(sp)
        _twist_args(sp)
        sp.add_argument("--window", type=int, default=window_default,
                        help="coordinate window size")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("build", help="build a T-graph and dump JSON/SVG")
    common(sp)
    sp.add_argument("--out", default="tgraph.json")
    sp.add_argument("--svg", default=None)
    sp.add_argument("--faces", action="store_true", help="tint faces in the SVG")
    sp.set_defaults(fn=cmd_build)

    sp = sub.add_parser("walk", help="exit-angle histogram of the random walk")
    common(sp, window_default=80)
    sp.add_argument("--radius", type=float, default=10.0)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--out", default="walk.csv")
    sp.add_argument("--svg", default=None, help="draw one trajectory")
    sp.set_defaults(fn=cmd_walk)

    sp = sub.add_parser("cross", help="rectangle-crossing probability estimate")
    _slope_args(sp)
    _twist_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--zx", type=float, default=0.0)
    sp.add_argument("--zy", type=float, default=0.0)
    sp.add_argument("--vertical", action="store_true")
    sp.add_argument("--reverse", action="store_true")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--max-starts", type=int, default=24)
    sp.add_argument("--out", default="cross.csv")
    sp.set_defaults(fn=cmd_cross)

    sp = sub.add_parser("recur", help="escape-probability decay (recurrence)")
    _slope_args(sp)
    _twist_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--radii", type=float, nargs="+", default=[16.0, 64.0, 256.0])
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--out", default="recur.csv")
    sp.set_defaults(fn=cmd_recur)

    sp = sub.add_parser("green", help="conjugate Green function solve and fit")
    _slope_args(sp)
    _twist_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--truncation", type=float, default=90.0)
    sp.add_argument("--direction", type=float, default=0.37)
    sp.add_argument("--fit-lo", type=float, default=20.0)
    sp.add_argument("--fit-hi", type=float, default=60.0)
    sp.add_argument("--out", default="green.csv")
    sp.set_defaults(fn=cmd_green)

    sp = sub.add_parser("sample", help="wired uniform spanning tree sample")
    common(sp)
    sp.add_argument("--out", default="forest.json")
    sp.add_argument("--svg", default=None)
    sp.set_defaults(fn=cmd_sample)

    sp = sub.add_parser("tile", help="lozenge tiling sample (full pipeline)")
    common(sp, window_default=30)
    sp.add_argument("--margin", type=int, default=3)
    sp.add_argument("--out", default="tiling.json")
    sp.add_argument("--svg", default=None)
    sp.set_defaults(fn=cmd_tile)

    sp = sub.add_parser("domain", help="discrete domain from a polygon")
    _slope_args(sp)
    _twist_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shape", required=True,
                    help='JSON file: {"boundary": [[x,y],...], "marked": [x,y]}')
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--corridor", type=float, default=0.25)
    sp.add_argument("--out", default="domain.json")
    sp.add_argument("--svg", default=None)
    sp.set_defaults(fn=cmd_domain)

    sp = sub.add_parser("stats", help="Gibbs-measure statistics")
    sp.add_argument("which", choices=["densities", "gibbs", "hgap"])
    _slope_args(sp)
    sp.add_argument("--window", type=int, default=60)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="stats.csv")
    sp.set_defaults(fn=cmd_stats)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", default="all",
                    choices=["all"] + list(verify_mod.SUITES))
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("render", help="render a JSON artifact to SVG")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", default="out.svg")
    sp.add_argument("--faces", action="store_true")
    sp.set_defaults(fn=cmd_render)

    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "pa"):
        for p in (args.pa, args.pb, args.pc):
            if not (0.0 < p < 1.0):
                parser.error(f"slope components must lie in (0, 1), got {p}")
        if abs(args.pa + args.pb + args.pc - 1.0) > 1e-9:
            parser.error("slope components must sum to 1")
    try:
        return args.fn(args)
    except TGraphError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
