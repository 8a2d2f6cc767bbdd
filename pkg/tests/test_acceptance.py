"""Acceptance suite: every verification criterion at its stated tolerance.

Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -s``
to see them.  The same suites back the ``tgraphs verify`` CLI.
"""

import pytest

from tgraphs import verify


def _run(name, **kwargs):
    rep = verify.run_suite(name, **kwargs)
    status = "PASS" if rep["passed"] else "FAIL"
    detail = {k: v for k, v in rep.items()
              if k not in ("name", "passed") and not isinstance(v, (list, dict))}
    print(f"[{status}] {name}: {detail}")
    return rep


def test_01_geometry_suite():
    rep = _run("geometry")
    assert rep["passed"], rep


def test_02_martingale():
    rep = _run("martingale")
    assert rep["passed"], rep
    assert rep["max_drift"] < 1e-12


def test_03_reference_flow_divergence():
    rep = _run("reference-flow")
    assert rep["passed"], rep
    assert rep["max_white_divergence_error"] < 1e-10
    assert rep["max_black_divergence_error"] < 1e-10


def test_04_height_winding_exactness():
    rep = _run("height-winding")
    assert rep["passed"], rep
    assert rep["max_discrepancy"] < 1e-9


def test_05_uniform_dimer_pushforward():
    rep = _run("pushforward")
    assert rep["passed"], rep
    assert rep["max_probability_deviation"] < 1e-9
    assert rep["max_tv"] < 0.02
    assert len(rep["domains"]) >= 3


def test_06_uniform_crossing():
    rep = _run("crossing")
    assert rep["passed"], rep
    assert rep["worst"]["pooled_ci"][0] > 0.0


def test_07_recurrence():
    rep = _run("recurrence")
    assert rep["passed"], rep
    assert rep["factor"] <= 2.0


def test_08_conjugate_green_function():
    rep = _run("green")
    assert rep["passed"], rep
    assert rep["harmonic_residual"] < 1e-8
    assert rep["relative_error"] < 0.10


def test_09_domain_construction():
    rep = _run("domains")
    assert rep["passed"], rep
    for row in rep["domains"]:
        assert row["halving_ok"]
        assert row["classification_exact"]
        assert row["profile_vs_heights"] < 1e-9
        assert row["profile_growth"] < 0.20


def test_10_tile_densities():
    rep = _run("densities")
    assert rep["passed"], rep
    for row in rep["rows"]:
        assert row["max_err"] < 0.02


def test_11_reference_gap_boundedness():
    rep = _run("reference-gap")
    assert rep["passed"], rep


def test_12_determinism():
    rep = _run("determinism")
    assert rep["passed"], rep
