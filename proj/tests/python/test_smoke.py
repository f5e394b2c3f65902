import math

import pytest

import rbdpint


def test_helpers():
    assert rbdpint.parse_h("2^-5") == 1 / 32
    assert rbdpint.format_sci3(0.0154) == "1.54e-2"
    assert "example1" in rbdpint.problems()
    with pytest.raises(rbdpint.ConfigurationError):
        rbdpint.parse_h("0.3")


def test_solve_small_cell():
    r = rbdpint.solve(example="1", h="2^-3", gamma=1e-2)
    assert r["converged"]
    assert r["dof"] == 2 * 49 * 8
    assert len(r["y"]) == 49 * 8 and len(r["p"]) == 49 * 8
    assert r["residual_history"][0] == 1.0
    assert r["residual_history"][-1] <= 1e-6
    assert r["epsilon"] == pytest.approx(1 / 16)
    assert 0 < r["e_h"] < 1


def test_conjugacy_flag_does_not_change_iterations():
    a = rbdpint.solve(example="2", h="2^-3", gamma=1e-4, inner="mg")
    b = rbdpint.solve(example="2", h="2^-3", gamma=1e-4, inner="mg", conjugacy=False)
    assert a["iterations"] == b["iterations"]
    assert math.isclose(a["e_h"], b["e_h"], rel_tol=1e-8)


def test_dst_rejected_for_variable_coefficient():
    with pytest.raises(rbdpint.ConfigurationError):
        rbdpint.solve(example="2", h="2^-3", inner="dst")
    assert issubclass(rbdpint.ConfigurationError, rbdpint.RbdError)


def test_run_experiment_table():
    rows, csv = rbdpint.run_experiment({"h": ["2^-3", "2^-4"]}, gamma=[1e-6, 1])
    assert [(r["gamma"], r["h"]) for r in rows] == [(1e-6, 0.125), (1e-6, 0.0625), (1, 0.125), (1, 0.0625)]
    lines = csv.strip().split("\n")
    assert lines[0] == "gamma,h,dof,iter,cpu_s,e_h,e_h_raw"
    assert len(lines) == 5


def test_validate_quick():
    report = rbdpint.validate(quick=True)
    assert report["passed"]
    assert report["failures"] == 0
    assert report["total"] == len(report["checks"]) > 0
