"""One test per acceptance criterion, each at its stated tolerance and time limit.

Every test prints a single PASS/FAIL line; the same lines are repeated in the
terminal summary under "acceptance criteria".
"""
import math

import pytest

from sbsqbm.fock import TruncationBudget, occupation
from sbsqbm.indicators import alpha
from sbsqbm.validation import _fock_points, run_check

from conftest import ACCEPTANCE_LINES


def _run(label, name, limit, **kwargs):
    result = run_check(name, **kwargs)
    timely = result.runtime < limit
    ok = result.passed and timely
    line = (f"{'PASS' if ok else 'FAIL'} [{label}] {name}: measured={result.measured:.4g} "
            f"tolerance={result.tolerance:.3g} runtime={result.runtime:.2f}s (limit {limit:g}s)")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return result, timely


def test_1_closed_form_vs_quadrature():
    result, timely = _run("1", "closed_form_vs_quadrature", 10, tolerance=1e-7)
    assert result.detail["samples"] == 50
    assert result.passed, result.detail
    assert timely


def test_2_fock_oracle():
    dims = []
    for params, osc, T, t in _fock_points():
        nbar = occupation(osc.omega, T, params)
        dims.append(TruncationBudget(1e-10).dimension(nbar, 4 * abs(alpha(t, osc, params)) ** 2))
    result, timely = _run("2", "fock_oracle", 60, tolerance=1e-6, fock_budget=1e-10)
    assert result.detail["gamma_tolerance"] == 1e-6
    assert result.detail["overlap_tolerance"] == pytest.approx(1e-5)
    assert max(dims) <= 400
    assert result.passed, result.detail
    assert timely


def test_3_short_time_gaussian_decay():
    result, timely = _run("3", "short_time_gaussian", 30, tolerance=0.05)
    assert set(result.detail) == {"LowT_f0", "HighT_Gamma", "HighT_B"}
    assert result.passed, result.detail
    assert timely


def test_4_temperature_scaling():
    result, timely = _run("4", "temperature_scaling", 60, tolerance=0.1)
    assert result.passed, result.detail
    assert timely


def test_5_long_time_plateau():
    result, timely = _run("5", "long_time_plateau", 30, tolerance=0.02)
    assert result.passed, result.detail
    assert timely


def test_6_sbs_formation_bound():
    result, timely = _run("6", "sbs_bound", 120)
    assert result.detail["above"]["verdict"] == "PASS"
    assert result.passed, result.detail
    assert timely


def test_7_lln_convergence():
    result, timely = _run("7", "lln_convergence", 60)
    assert result.detail["seeds"] == 50
    assert result.passed, result.detail
    assert timely


def test_8_special_functions():
    result, timely = _run("8", "special_functions", 10, tolerance=1e-13)
    assert result.detail["points"] == 1000
    assert result.passed, result.detail
    assert timely


def test_9_overlap_short_time_resolution():
    result, timely = _run("9", "hight_b_short_time_resolution", 60, tolerance=0.01)
    detail = result.detail
    assert {"fit", "fit_stderr", "resolution"} <= set(detail)
    assert math.isfinite(detail["fit"]) and detail["fit_stderr"] >= 0
    line = f"      resolution: {detail['resolution']}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, detail
    assert timely
