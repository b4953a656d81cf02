import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbsqbm.errors import ParameterError, UnsupportedPatternError, ValidityError
from sbsqbm.special import (EULER_GAMMA, PMMP, PMPM, FrequencyWindow, SignPattern, ci, cin,
                            f_ci, f_ci_limit, f_ci_long, f_ci_short, f_si, f_si_long,
                            f_si_short, si)
from sbsqbm.validation import loglog_slope

mpmath.mp.dps = 40


def mp_si(x):
    return float(mpmath.si(x))


def mp_ci(x):
    return float(mpmath.ci(x))


class TestSiCi:
    def test_reference_values(self):
        assert si(0.0) == 0.0
        assert si(1.0) == pytest.approx(0.946083070367183, abs=1e-15)
        assert ci(1.0) == pytest.approx(0.337403922900968, abs=1e-15)

    def test_against_mpmath_wide_range(self):
        xs = np.concatenate([np.geomspace(1e-8, 1e6, 2000),
                             np.random.default_rng(0).uniform(0, 50, 1000)])
        xs = xs[xs > 0]
        err_si = max(abs(si(x) - mp_si(x)) for x in xs)
        err_ci = max(abs(ci(x) - mp_ci(x)) for x in xs)
        assert err_si <= 1e-13
        assert err_ci <= 1e-13

    def test_branch_point_continuity(self):
        # series and continued fraction meet at x = 4
        for x in (4.0 - 1e-12, 4.0, 4.0 + 1e-12):
            assert abs(si(x) - mp_si(x)) < 5e-15
            assert abs(ci(x) - mp_ci(x)) < 5e-15

    def test_asymptotes(self):
        assert abs(si(1e6) - math.pi / 2) < 1e-6
        assert abs(ci(1e6)) < 1e-5
        assert abs(ci(1e-8) - (EULER_GAMMA + math.log(1e-8))) < 1e-10

    def test_cin_is_regular_part(self):
        for x in (1e-3, 0.7, 3.0, 25.0):
            assert cin(x) == pytest.approx(EULER_GAMMA + math.log(x) - ci(x), abs=1e-14)

    @given(st.floats(min_value=-1e5, max_value=1e5, allow_nan=False))
    def test_si_is_odd(self, x):
        assert si(-x) == -si(x)

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            ci(0.0)
        with pytest.raises(ParameterError):
            ci(-1.0)
        with pytest.raises(ParameterError):
            si(float("nan"))

    def test_derivatives_by_central_difference(self):
        rng = np.random.default_rng(5)
        for x in rng.uniform(0.5, 200.0, 20):
            h = 1e-5 * x
            dsi = (si(x + h) - si(x - h)) / (2 * h)
            dci = (ci(x + h) - ci(x - h)) / (2 * h)
            assert dsi == pytest.approx(math.sin(x) / x, rel=1e-6, abs=1e-9)
            assert dci == pytest.approx(math.cos(x) / x, rel=1e-6, abs=1e-9)

    def test_array_input_keeps_shape(self):
        x = np.linspace(0.1, 30, 12).reshape(3, 4)
        assert si(x).shape == (3, 4)
        assert ci(x).shape == (3, 4)


class TestSignPattern:
    def test_parse_and_negate(self):
        p = SignPattern.parse("+-+-")
        assert p == PMPM
        assert -p == SignPattern.parse("-+-+")
        assert str(PMMP) == "(+,-,-,+)"

    @pytest.mark.parametrize("bad", ["+-+", "+-+-+", "+-x-"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ParameterError):
            SignPattern.parse(bad)


class TestWindow:
    def test_requires_off_resonance(self):
        with pytest.raises(ParameterError):
            FrequencyWindow(1.0, 20.0, 1.0)
        with pytest.raises(ParameterError):
            FrequencyWindow(10.0, 5.0, 1.0)

    def test_arguments_order(self, window):
        args = window.arguments(2.0)
        assert list(args) == [18.0, 38.0, 22.0, 42.0]


class TestFCombinations:
    def test_zero_time(self, window):
        for p in (PMPM, PMMP, SignPattern.parse("++++")):
            assert f_si(p, 0.0, window) == 0.0

    def test_f_ci_needs_positive_time(self, window):
        with pytest.raises(ParameterError):
            f_ci(PMPM, 0.0, window)

    def test_signed_sum(self, window):
        t = 0.37
        x = window.arguments(t)
        expected = sum(s * mp_ci(v) for s, v in zip((1, -1, -1, 1), x))
        assert f_ci(PMMP, t, window) == pytest.approx(expected, abs=1e-13)

    def test_f_ci_limit_avoids_cancellation(self, window):
        t = 1e-9
        L, U, W = window.omega_L, window.omega_U, window.Omega
        expected = math.log((L**2 - W**2) / (U**2 - W**2))
        assert f_ci_limit(PMPM, t, window) == pytest.approx(expected, abs=1e-14)
        assert f_ci_limit(PMPM, 0.0, window) == pytest.approx(expected, abs=1e-15)

    def test_f_ci_limit_rejects_divergent_patterns(self, window):
        with pytest.raises(ParameterError):
            f_ci_limit(SignPattern.parse("++++"), 1e-3, window)

    def test_divergent_pattern_is_finite(self, window):
        v = f_ci(SignPattern.parse("++++"), 1e-8, window)
        assert np.isfinite(v)
        # grows as 4 ln t
        w2 = f_ci(SignPattern.parse("++++"), 1e-9, window)
        assert v - w2 == pytest.approx(4 * math.log(10), abs=1e-6)


class TestShortTime:
    def test_tabulated_values_at_small_t(self, window):
        t = 1e-3
        L, U, W = window.omega_L, window.omega_U, window.Omega
        printed_si = 2 * (L - U) * t + t**3 / 9 * (U**3 - L**3 + 3 * W**2 * U - 3 * W**2 * L)
        assert f_si_short(PMPM, t, window) == pytest.approx(printed_si, rel=1e-15)
        assert abs(f_si(PMPM, t, window) - printed_si) < 5e4 * t**5

    def test_pmpm_ci_uses_central_frequency(self, window):
        t = 1e-3
        L, U, W = window.omega_L, window.omega_U, window.Omega
        v = math.log((L**2 - W**2) / (U**2 - W**2)) + 0.5 * (U**2 - L**2) * t**2
        assert f_ci_short(PMPM, t, window) == pytest.approx(v, rel=1e-15)
        assert abs(f_ci(PMPM, t, window) - v) < 1e-8

    def test_pmmp_ci(self, window):
        t = 1e-3
        assert abs(f_ci(PMMP, t, window) - f_ci_short(PMMP, t, window)) < 1e-9

    def test_negated_pattern_flips_sign(self, window):
        t = 2e-3
        assert f_si_short(-PMPM, t, window) == -f_si_short(PMPM, t, window)

    def test_guards(self, window):
        with pytest.raises(ValidityError):
            f_si_short(PMPM, 0.2 / window.omega_U, window)
        with pytest.raises(UnsupportedPatternError):
            f_si_short(SignPattern.parse("++--"), 1e-3, window)

    @pytest.mark.parametrize("pattern", [PMPM, PMMP])
    def test_order_of_short_expansions(self, window, pattern):
        t = np.geomspace(0.01, 0.1, 12) / window.omega_U
        assert loglog_slope(t, f_si(pattern, t, window) - f_si_short(pattern, t, window)) >= 4.5
        assert loglog_slope(t, f_ci(pattern, t, window) - f_ci_short(pattern, t, window)) >= 3.5


class TestLongTime:
    @pytest.mark.parametrize("pattern", [PMPM, PMMP])
    def test_envelope(self, window, pattern):
        t = 1e3
        for exact, approx in ((f_si, f_si_long), (f_ci, f_ci_long)):
            assert abs(exact(pattern, t, window) - approx(pattern, t, window)) <= 20.0 / t**2

    @pytest.mark.parametrize("pattern", [PMPM, PMMP])
    def test_order_of_long_expansions(self, window, pattern):
        t = np.geomspace(10.0 / (window.omega_L - window.Omega), 1e4 / window.omega_L, 12)
        assert loglog_slope(t, f_si(pattern, t, window) - f_si_long(pattern, t, window)) <= -1.5
        assert loglog_slope(t, f_ci(pattern, t, window) - f_ci_long(pattern, t, window)) <= -1.5

    def test_period_average_is_small(self, window):
        # all terms oscillate; the average over a central period is O(1/t^2)
        t0 = 500.0
        grid = t0 + 2 * math.pi * np.arange(4096) / 4096
        avg = np.mean(f_si_long(PMPM, grid, window))
        assert abs(avg) < 1e-3 / t0

    def test_guard(self, window):
        with pytest.raises(ValidityError):
            f_ci_long(PMPM, 0.5, window)
