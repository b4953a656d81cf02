import json
import math

import numpy as np
import pytest

from sbsqbm.errors import ParameterError, RegimeMismatchError, ValidityError
from sbsqbm.indicators import gamma_factor, sample_environment
from sbsqbm.means import MeanKind
from sbsqbm.params import EnvironmentSpec, ModelParams, TemperatureRegime, ThermalTime
from sbsqbm.regime import (TimeWindow, gaussian_timescale, macrofraction_ratio, nmac_bound,
                           sbs_verdict, tau_printed, temperature_constraint)
from sbsqbm.validation import fit_t2_coefficient


@pytest.fixture
def cold():
    return ThermalTime(0.0)


class TestTimescales:
    def test_definitional_identity(self, window, params, hot):
        for kind, tau in ((MeanKind.LOW_T, ThermalTime(0.0)), (MeanKind.HIGH_T_GAMMA, hot),
                          (MeanKind.HIGH_T_B, hot)):
            ts = gaussian_timescale(kind, 2.5, window, tau, params)
            assert ts.tau_derived**2 * ts.c2 * 2.5**2 == pytest.approx(2.0, rel=1e-14)
            assert ts.effective(4) == pytest.approx(ts.tau_derived / 2)

    def test_regime_mismatch(self, window, params, hot):
        with pytest.raises(RegimeMismatchError):
            gaussian_timescale(MeanKind.LOW_T, 1.0, window, hot, params)
        with pytest.raises(RegimeMismatchError):
            gaussian_timescale(MeanKind.HIGH_T_B, 1.0, window, ThermalTime(5.0), params)
        ts = gaussian_timescale(MeanKind.HIGH_T_B, 1.0, window, ThermalTime(5.0), params,
                                check_regime=False)
        assert ts.tau_derived > 0

    def test_bad_separation(self, window, params, cold):
        with pytest.raises(ParameterError):
            gaussian_timescale(MeanKind.LOW_T, 0.0, window, cold, params)

    def test_low_temperature_common_timescale(self, window, params):
        # same closed form feeds both indicators at low temperature
        tau = ThermalTime.from_temperature(window.omega_L / 40.0, params)
        spec = EnvironmentSpec(10.0, 20.0, T=tau.T, n_unobserved=2000, seed=5)
        mac, _ = sample_environment(spec, params)
        from sbsqbm.indicators import overlap_factor
        t = np.geomspace(1e-4, 1e-2, 20) / window.omega_U
        g, _ = fit_t2_coefficient(t, -np.log(gamma_factor(t, 1.0, mac, tau, params)))
        b, _ = fit_t2_coefficient(t, -np.log(overlap_factor(t, 1.0, mac, tau, params)))
        assert g == pytest.approx(b, rel=1e-12)

    def test_printed_timescales_scale_with_temperature(self, window, params):
        t1 = ThermalTime.from_temperature(1000.0, params)
        t2 = ThermalTime.from_temperature(2000.0, params)
        for kind, factor in ((MeanKind.HIGH_T_GAMMA, 0.5), (MeanKind.HIGH_T_B, 2.0)):
            r = tau_printed(kind, 1.0, window, t2, params) / tau_printed(kind, 1.0, window, t1, params)
            assert r == pytest.approx(factor, rel=1e-14)

    def test_derived_timescales_scale_with_sqrt_temperature(self, window, params):
        t1 = ThermalTime.from_temperature(1000.0, params)
        t2 = ThermalTime.from_temperature(4000.0, params)
        d = gaussian_timescale(MeanKind.HIGH_T_GAMMA, 1.0, window, t2, params).tau_derived \
            / gaussian_timescale(MeanKind.HIGH_T_GAMMA, 1.0, window, t1, params).tau_derived
        o = gaussian_timescale(MeanKind.HIGH_T_B, 1.0, window, t2, params).tau_derived \
            / gaussian_timescale(MeanKind.HIGH_T_B, 1.0, window, t1, params).tau_derived
        assert d == pytest.approx(0.5, rel=1e-14)
        assert o == pytest.approx(2.0, rel=1e-14)

    def test_monte_carlo_fit(self, window, params, cold):
        spec = EnvironmentSpec(10.0, 20.0, n_unobserved=10_000, seed=17)
        mac, _ = sample_environment(spec, params)
        t = np.geomspace(1e-4, 1e-2, 20) / window.omega_U
        y = -np.log(gamma_factor(t, 1.0, mac, cold, params)) / len(mac)
        c2, _ = fit_t2_coefficient(t, y)
        ts = gaussian_timescale(MeanKind.LOW_T, 1.0, window, cold, params)
        assert c2 == pytest.approx(1 / ts.tau_derived**2, rel=0.05)


class TestBounds:
    def test_epsilon_one_gives_zero(self, window, params, cold):
        assert nmac_bound(MeanKind.LOW_T, 1.0, window, cold, params).bound_exact == 0.0

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.5, math.nan])
    def test_epsilon_domain(self, window, params, cold, eps):
        with pytest.raises(ParameterError):
            nmac_bound(MeanKind.LOW_T, eps, window, cold, params)

    def test_frozen_low_temperature_value(self, window, params, cold):
        bound = nmac_bound(MeanKind.LOW_T, 1e-3, window, cold, params)
        assert bound.bound_exact == pytest.approx(56792.85, rel=1e-6)
        assert bound.bound_fast == pytest.approx(math.pi * 400 * 100 / 30 * math.log(1e3), rel=1e-14)

    def test_strictly_decreasing_in_epsilon(self, window, params, hot):
        for kind in MeanKind:
            tau = None if kind is MeanKind.LOW_T else hot
            values = [nmac_bound(kind, e, window, tau, params).bound_exact for e in (1e-6, 1e-3, 0.1, 0.5)]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_temperature_monotonicity(self, window, params):
        lo, hi = ThermalTime(1000.0), ThermalTime(2000.0)
        g = [nmac_bound(MeanKind.HIGH_T_GAMMA, 1e-3, window, t, params).bound_exact for t in (lo, hi)]
        b = [nmac_bound(MeanKind.HIGH_T_B, 1e-3, window, t, params).bound_exact for t in (lo, hi)]
        assert g[1] < g[0]
        assert b[1] > b[0]

    def test_n_mac_follows_inverse_square_separation(self, window, params, cold):
        bound = nmac_bound(MeanKind.LOW_T, 1e-3, window, cold, params)
        assert bound.n_mac(10.0) == math.ceil(bound.bound_exact / 100)
        assert bound.n_mac(1e6) == 1
        n1, n2 = bound.n_mac(2.0), bound.n_mac(4.0)
        assert n1 / n2 == pytest.approx(4.0, rel=1e-3)

    def test_fast_form_accuracy(self, params):
        """Fast forms track the exact bound only for the overlap."""
        from sbsqbm.special import FrequencyWindow
        w = FrequencyWindow(100.0, 200.0, 1.0)
        tau = ThermalTime(2e4)
        r = {k: nmac_bound(k, 1e-3, w, None if k is MeanKind.LOW_T else tau, params)
             for k in MeanKind}
        ratio = {k: v.bound_fast / v.bound_exact for k, v in r.items()}
        assert ratio[MeanKind.HIGH_T_B] == pytest.approx(1.0, abs=0.25)
        assert ratio[MeanKind.LOW_T] == pytest.approx(0.5, abs=1e-3)
        assert ratio[MeanKind.HIGH_T_GAMMA] < 1e-3


class TestTemperatureConstraint:
    def test_zero_temperature_satisfied(self, window, params):
        assert temperature_constraint(1.0, 10, window, params, 0.0).satisfied

    def test_equality_is_violated(self, window, params):
        rhs = params.M * params.gamma0_bar / (2 * math.pi * params.kB * window.omega_U)
        v = temperature_constraint(2.0, 4, window, params, rhs * 4.0)
        assert v.lhs == v.rhs
        assert not v.satisfied

    def test_quadrupling_n_doubles_admissible_temperature(self, window, params):
        T = 0.999 * temperature_constraint(1.0, 1, window, params, 0.0).rhs
        assert temperature_constraint(1.0, 1, window, params, T).satisfied
        assert not temperature_constraint(1.0, 1, window, params, 1.01 * T).satisfied
        assert temperature_constraint(1.0, 4, window, params, 2 * T).satisfied
        assert not temperature_constraint(1.0, 4, window, params, 2.02 * T).satisfied

    def test_rejects_bad_inputs(self, window, params):
        with pytest.raises(ParameterError):
            temperature_constraint(1.0, 0, window, params, 1.0)


class TestMacrofractionRatio:
    def test_equal_epsilons(self, params):
        assert macrofraction_ratio(7.0, params, 1e-3, 1e-3) == pytest.approx(2 * 49.0)

    def test_unit_energy_ratio(self):
        assert macrofraction_ratio(1.0, ModelParams(), 0.1, 0.1) == pytest.approx(2.0)

    @pytest.mark.parametrize("eps", [0.0, 1.0])
    def test_domain(self, params, eps):
        with pytest.raises(ParameterError):
            macrofraction_ratio(1.0, params, eps, 0.5)


class TestVerdict:
    def test_zero_separation_fails_with_unit_averages(self, params):
        spec = EnvironmentSpec(10.0, 20.0, n_unobserved=5, n_observed_per_mac=5, seed=1)
        report = sbs_verdict(spec, params, 0.0, 1e-3, 1e-3)
        assert report.verdict == "FAIL"
        assert report.gamma_mean == 1.0 and report.overlap_means == [1.0]
        assert report.timescales == {}

    def test_single_oscillator_fails(self, params):
        spec = EnvironmentSpec(10.0, 20.0, n_unobserved=1, n_observed_per_mac=1, seed=1)
        report = sbs_verdict(spec, params, 1.0, 1e-3, 1e-3)
        assert report.verdict == "FAIL"
        assert report.gamma_mean > 0.99 and report.overlap_means[0] > 0.99

    def test_pass_with_margin_and_deterministic(self, params, window, cold):
        bound = nmac_bound(MeanKind.LOW_T, 1e-3, window, cold, params)
        n = bound.n_mac(10.0) * 2
        spec = EnvironmentSpec(10.0, 20.0, n_unobserved=n, n_observed_per_mac=n,
                               n_macrofractions=2, seed=8)
        a = sbs_verdict(spec, params, 10.0, 1e-3, 1e-3)
        b = sbs_verdict(spec, params, 10.0, 1e-3, 1e-3)
        assert a.verdict == "PASS"
        assert a.regime is TemperatureRegime.LOW_T
        assert a.to_json() == b.to_json()
        data = json.loads(a.to_json())
        assert data["verdict"] == "PASS" and len(data["overlap_time_averages"]) == 2
        assert "verdict" in a.render()

    def test_high_temperature_report_fields(self, params):
        spec = EnvironmentSpec(10.0, 20.0, T=500.0, n_unobserved=50, n_observed_per_mac=50, seed=2)
        report = sbs_verdict(spec, params, 1.0, 1e-2, 1e-3)
        assert set(report.timescales) == {"gamma", "overlap"}
        assert report.temperature is not None
        assert report.ratio_bound == pytest.approx(macrofraction_ratio(500.0, params, 1e-2, 1e-3))

    def test_window_guard(self, params):
        spec = EnvironmentSpec(10.0, 20.0, n_unobserved=5, seed=1)
        with pytest.raises(ValidityError):
            sbs_verdict(spec, params, 1.0, 1e-3, 1e-3, window=TimeWindow(0.5))

    def test_default_window(self, window):
        tw = TimeWindow.default(window)
        assert tw.start * window.omega_L >= 100
        grid = tw.grid(window.Omega)
        assert grid.size == 640
        assert grid[64] - grid[0] == pytest.approx(2 * math.pi)
