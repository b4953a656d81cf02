import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbsqbm.errors import ParameterError
from sbsqbm.special import ci, si
from sbsqbm.validation import (CHECKS, CheckResult, fit_t2_coefficient, loglog_slope,
                               run_check, series_oracle)


def test_fit_recovers_quadratic_and_quartic():
    t = np.geomspace(1e-3, 1e-1, 30)
    c2, err = fit_t2_coefficient(t, 3.0 * t**2 - 7.0 * t**4)
    assert c2 == pytest.approx(3.0, rel=1e-12)
    assert err < 1e-10


def test_loglog_slope():
    x = np.geomspace(1, 100, 10)
    assert loglog_slope(x, -2 * x**-1.5) == pytest.approx(-1.5)


def test_series_oracle_known_values():
    s, c = series_oracle(1.0)
    assert s == pytest.approx(0.946083070367183, abs=1e-15)
    assert c == pytest.approx(0.337403922900968, abs=1e-15)
    with pytest.raises(ParameterError):
        series_oracle(0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 200.0))
def test_series_oracle_agrees_with_kernel(x):
    s, c = series_oracle(x)
    assert abs(s - si(x)) < 1e-14
    assert abs(c - ci(x)) < 1e-14


def test_check_result_line():
    r = CheckResult("x", True, 1.5e-9, 1e-7)
    assert r.line().startswith("PASS x: measured=1.5e-09 tolerance=1e-07")
    assert CheckResult("y", True, 0.1, math.inf, informational=True).line().startswith("INFO")


def test_run_check_unknown():
    with pytest.raises(ParameterError):
        run_check("nope")


def test_tolerance_override_applies():
    r = run_check("long_time_plateau", tolerance=1e-12)
    assert r.tolerance == 1e-12 and not r.passed


def test_printed_forms_is_informational():
    r = run_check("printed_forms")
    assert r.informational
    assert r.detail["HighT_Gamma_prefactor"]["asymptote_display_gap"] < 1e-12
    assert set(CHECKS) >= {"printed_forms", "sbs_bound"}
