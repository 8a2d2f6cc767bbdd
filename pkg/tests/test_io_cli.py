import json
import os

import pytest

from tgraphs import Twist, Window, build_tgraph, build_triangle
from tgraphs import cli, jsonio, svgout


def run_cli(args, tmp_path):
    cwd = os.getcwd()
    os.chdir(tmp_path)
    try:
        return cli.main(args)
    finally:
        os.chdir(cwd)


def test_build_artifacts_deterministic(tmp_path):
    args = ["build", "--pa", "1/3", "--pb", "1/3", "--pc", "1/3",
            "--lambda-turns", "0.3", "--window", "16", "--out", "a.json",
            "--svg", "a.svg"]
    assert run_cli(args, tmp_path) == 0
    assert run_cli(["build", "--pa", "1/3", "--pb", "1/3", "--pc", "1/3",
                    "--lambda-turns", "0.3", "--window", "16",
                    "--out", "b.json"], tmp_path) == 0
    a = (tmp_path / "a.json").read_bytes()
    b = (tmp_path / "b.json").read_bytes()
    assert a == b
    assert (tmp_path / "a.svg").exists()
    assert (tmp_path / "a.json.meta.json").exists()


def test_tgraph_json_round_trip(tmp_path):
    sh = build_triangle(0.5, 0.3, 0.2)
    t = build_tgraph(sh, Twist.from_turns(0.11), Window.centered(6), check=False)
    blob = jsonio.tgraph_to_dict(t)
    t2 = jsonio.tgraph_from_dict(blob)
    blob2 = jsonio.tgraph_to_dict(t2)
    assert jsonio.dumps(blob) == jsonio.dumps(blob2)


def test_tile_and_render(tmp_path):
    rc = run_cli(["tile", "--window", "10", "--seed", "4",
                  "--out", "tiling.json", "--svg", "tiling.svg"], tmp_path)
    assert rc == 0
    rc = run_cli(["render", "--input", "tiling.json", "--out", "t2.svg"], tmp_path)
    assert rc == 0
    svg = (tmp_path / "t2.svg").read_text()
    assert svg.startswith("<svg") and "polygon" in svg


def test_sample_forest_cli(tmp_path):
    rc = run_cli(["sample", "--window", "12", "--seed", "2",
                  "--out", "forest.json", "--svg", "forest.svg"], tmp_path)
    assert rc == 0
    blob = json.loads((tmp_path / "forest.json").read_text())
    assert blob["vertices"]


def test_domain_cli(tmp_path):
    (tmp_path / "poly.json").write_text(
        json.dumps({"boundary": [[0, 0], [8, 0], [8, 8], [0, 8]],
                    "marked": [0, 0]}))
    rc = run_cli(["domain", "--shape", "poly.json", "--delta", "0.25",
                  "--corridor", "0.5", "--seed", "3", "--out", "dom.json",
                  "--svg", "dom.svg"], tmp_path)
    assert rc == 0
    blob = json.loads((tmp_path / "dom.json").read_text())
    assert blob["loop"] and blob["whites"] and blob["interior_vertices"]


def test_stats_densities_cli(tmp_path):
    rc = run_cli(["stats", "densities", "--window", "16", "--samples", "2",
                  "--seed", "1", "--out", "d.csv"], tmp_path)
    assert rc == 0
    lines = (tmp_path / "d.csv").read_text().strip().splitlines()
    assert lines[0] == "rho_a,rho_b,rho_c"
    assert len(lines) == 3


def test_verify_cli_single_suite(tmp_path):
    rc = run_cli(["verify", "--suite", "martingale", "--out", "rep.json"],
                 tmp_path)
    assert rc == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep[0]["passed"]


def test_cli_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["build", "--pa", "zap"])
    assert exc.value.code == 2


def test_svg_writer_tracks_bounds(tmp_path):
    d = svgout.Drawing()
    d.line(0, 1 + 1j)
    d.circle(0.5 + 0.5j, 0.1)
    out = d.to_svg()
    assert "line" in out and "circle" in out
