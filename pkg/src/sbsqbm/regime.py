"""Timescales, macrofraction-size bounds and the end-to-end SBS verdict."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import printed
from .errors import ParameterError, RegimeMismatchError, ValidityError
from .indicators import gamma_factor, overlap_factor, sample_environment
from .means import (MeanKind, asymptote_constants, mean_prefactor,
                    short_time_coefficient)
from .params import (EnvironmentSpec, ModelParams, TemperatureRegime, ThermalTime,
                     classify_temperature)
from .special import LONG_TIME_GUARD, FrequencyWindow

_EXPECTED_REGIME = {
    MeanKind.LOW_T: TemperatureRegime.LOW_T,
    MeanKind.HIGH_T_GAMMA: TemperatureRegime.HIGH_T,
    MeanKind.HIGH_T_B: TemperatureRegime.HIGH_T,
}


def _check_regime(kind, w, tau, params):
    T = 0.0 if tau is None else tau.T
    regime = classify_temperature(T, w.omega_L, w.omega_U, params)
    if regime is not _EXPECTED_REGIME[kind]:
        raise RegimeMismatchError(
            f"{kind.value} needs the {_EXPECTED_REGIME[kind].value} regime, "
            f"T={T} is {regime.value}")


def _positive_separation(delta_X):
    if not (math.isfinite(delta_X) and delta_X > 0):
        raise ParameterError(f"delta_X must be finite and > 0, got {delta_X!r}")


@dataclass(frozen=True)
class Timescales:
    """Gaussian decay times for one mean kind.

    ``tau_derived`` makes ``exp(-N (t/tau)^2)`` match the short-time mean,
    i.e. ``tau_derived**2 * c2 * delta_X**2 == 2``. ``tau_printed`` is the
    published closed form, kept for comparison only.
    """

    kind: MeanKind
    delta_X: float
    c2: float
    tau_derived: float
    tau_printed: float

    def effective(self, n_mac):
        return self.tau_derived / math.sqrt(n_mac)

    def to_dict(self):
        return {"kind": self.kind.value, "delta_X": self.delta_X, "c2": self.c2,
                "tau_derived": self.tau_derived, "tau_printed": self.tau_printed}


def tau_printed(kind, delta_X, w: FrequencyWindow, tau: ThermalTime | None, params: ModelParams):
    kind = MeanKind.parse(kind)
    base = params.hbar * math.pi / (delta_X * params.M * params.gamma0_bar)
    if kind is MeanKind.LOW_T:
        return base * w.delta / math.log1p(w.delta / w.omega_L)
    if kind is MeanKind.HIGH_T_GAMMA:
        return tau.tau_T * base * w.omega_L * w.omega_U
    return base / tau.tau_T


def gaussian_timescale(kind, delta_X, w: FrequencyWindow, tau: ThermalTime | None,
                       params: ModelParams, check_regime=True) -> Timescales:
    kind = MeanKind.parse(kind)
    _positive_separation(delta_X)
    if check_regime:
        _check_regime(kind, w, tau, params)
    c2 = short_time_coefficient(kind, w, tau, params)
    tau_d = math.sqrt(2.0 / (delta_X**2 * c2))
    return Timescales(kind, float(delta_X), c2, tau_d, tau_printed(kind, delta_X, w, tau, params))


@dataclass(frozen=True)
class MacBound:
    """Minimal ``delta_X**2 * N_mac`` for an indicator to stay below ``epsilon``."""

    kind: MeanKind
    epsilon: float
    bound_exact: float
    bound_fast: float
    plateau_min: float

    def n_mac(self, delta_X):
        """Smallest integer macrofraction size meeting the bound at ``delta_X``."""
        _positive_separation(delta_X)
        return max(1, math.ceil(self.bound_exact / delta_X**2))

    def to_dict(self):
        return {"kind": self.kind.value, "epsilon": self.epsilon,
                "bound_exact": self.bound_exact, "bound_fast": self.bound_fast,
                "plateau_min": self.plateau_min}


def _check_epsilon(epsilon, name="epsilon"):
    if not (math.isfinite(epsilon) and 0 < epsilon <= 1):
        raise ParameterError(f"{name} must lie in (0, 1], got {epsilon!r}")


def nmac_bound(kind, epsilon, w: FrequencyWindow, tau: ThermalTime | None,
               params: ModelParams) -> MacBound:
    """Bound from the minimum over ``cos^2`` of the long-time mean.

    The mean is ``P (A cos^2 + B)``; its minimum is ``P B`` for ``A >= 0`` and
    ``P (A + B)`` otherwise. Requiring ``(delta_X^2 N / 2) * min >= ln(1/eps)``
    gives ``delta_X^2 N >= 2 ln(1/eps) / min``.
    """
    kind = MeanKind.parse(kind)
    _check_epsilon(epsilon)
    consts = asymptote_constants(kind, w)
    floor = mean_prefactor(kind, w, tau, params) * consts.plateau_min
    log_eps = math.log(1.0 / epsilon)
    exact = 2.0 * log_eps / floor
    T = 0.0 if tau is None else tau.T
    fast = printed.bound_fast(kind, epsilon, w, T, params) if (
        kind is MeanKind.LOW_T or T > 0) else math.nan
    return MacBound(kind, float(epsilon), exact, fast, consts.plateau_min)


@dataclass(frozen=True)
class TemperatureVerdict:
    satisfied: bool
    lhs: float
    rhs: float

    def to_dict(self):
        return {"satisfied": self.satisfied, "lhs": self.lhs, "rhs": self.rhs}


def temperature_constraint(delta_X, n_mac, w: FrequencyWindow, params: ModelParams, T):
    """Check ``T / (delta_X sqrt(N)) < M gamma0_bar / (2 pi kB omega_U)`` (strict)."""
    _positive_separation(delta_X)
    if n_mac <= 0 or T < 0:
        raise ParameterError("n_mac must be > 0 and T >= 0")
    lhs = T / (delta_X * math.sqrt(n_mac))
    rhs = params.M * params.gamma0_bar / (2.0 * math.pi * params.kB * w.omega_U)
    return TemperatureVerdict(lhs < rhs, lhs, rhs)


def macrofraction_ratio(T, params: ModelParams, eps_dec, eps_ort):
    """Lower bound on ``N_observed / N_unobserved`` at high temperature."""
    for name, eps in (("eps_dec", eps_dec), ("eps_ort", eps_ort)):
        if not (math.isfinite(eps) and 0 < eps < 1):
            raise ParameterError(f"{name} must lie in (0, 1), got {eps!r}")
    energy = params.kB * T / (params.hbar * params.Omega)
    return 2.0 * energy**2 * math.log(eps_ort) / math.log(eps_dec)


@dataclass(frozen=True)
class TimeWindow:
    """Uniform grid over ``periods`` central periods starting at ``start``."""

    start: float
    periods: int = 10
    points_per_period: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.start) and self.start > 0):
            raise ParameterError("window start must be finite and > 0")
        if self.periods < 1 or self.points_per_period < 2:
            raise ParameterError("need >= 1 period and >= 2 points per period")

    @classmethod
    def default(cls, w: FrequencyWindow, periods=10, points_per_period=64):
        start = max(100.0 / w.omega_L, LONG_TIME_GUARD / (w.omega_L - w.Omega))
        return cls(start, periods, points_per_period)

    def grid(self, Omega):
        n = self.periods * self.points_per_period
        period = 2.0 * math.pi / Omega
        return self.start + period * np.arange(n) / self.points_per_period

    def to_dict(self):
        return {"start": self.start, "periods": self.periods,
                "points_per_period": self.points_per_period}


@dataclass
class RegimeReport:
    regime: TemperatureRegime
    delta_X: float
    eps_dec: float
    eps_ort: float
    window: TimeWindow
    gamma_mean: float
    overlap_means: list
    timescales: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    temperature: TemperatureVerdict | None = None
    ratio_bound: float | None = None
    environment: dict = field(default_factory=dict)
    model: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.gamma_mean < self.eps_dec and all(b < self.eps_ort for b in self.overlap_means)

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "regime": self.regime.value,
            "delta_X": self.delta_X,
            "eps_dec": self.eps_dec,
            "eps_ort": self.eps_ort,
            "window": self.window.to_dict(),
            "gamma_time_average": self.gamma_mean,
            "overlap_time_averages": list(self.overlap_means),
            "timescales": {k: v.to_dict() for k, v in self.timescales.items()},
            "bounds": {k: v.to_dict() for k, v in self.bounds.items()},
            "temperature_constraint": None if self.temperature is None else self.temperature.to_dict(),
            "macrofraction_ratio_bound": self.ratio_bound,
            "environment": dict(self.environment),
            "model": dict(self.model),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)

    def render(self):
        rows = [("verdict", self.verdict), ("regime", self.regime.value),
                ("delta_X", f"{self.delta_X:.6g}"),
                ("<|Gamma|> (unobserved)", f"{self.gamma_mean:.6g} vs eps_dec={self.eps_dec:.3g}")]
        for i, b in enumerate(self.overlap_means, 1):
            rows.append((f"<B> (mac {i})", f"{b:.6g} vs eps_ort={self.eps_ort:.3g}"))
        for name, ts in self.timescales.items():
            rows.append((f"tau {name}", f"derived={ts.tau_derived:.6g} printed={ts.tau_printed:.6g}"))
        for name, bd in self.bounds.items():
            rows.append((f"dX^2 N bound {name}", f"exact={bd.bound_exact:.6g} fast={bd.bound_fast:.6g}"))
        if self.temperature is not None:
            rows.append(("temperature constraint",
                         f"{self.temperature.lhs:.6g} < {self.temperature.rhs:.6g}: "
                         f"{self.temperature.satisfied}"))
        if self.ratio_bound is not None:
            rows.append(("N_B/N_Gamma lower bound", f"{self.ratio_bound:.6g}"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def sbs_verdict(spec: EnvironmentSpec, params: ModelParams, delta_X, eps_dec, eps_ort,
                window: TimeWindow | None = None) -> RegimeReport:
    """Sample the bath and compare time-averaged indicators against the targets."""
    _check_epsilon(eps_dec, "eps_dec")
    _check_epsilon(eps_ort, "eps_ort")
    if not (math.isfinite(delta_X) and delta_X >= 0):
        raise ParameterError(f"delta_X must be finite and >= 0, got {delta_X!r}")
    w = FrequencyWindow.from_spec(spec, params)
    window = window or TimeWindow.default(w)
    if window.start * (w.omega_L - w.Omega) < LONG_TIME_GUARD:
        raise ValidityError(f"window must start at t*(omega_L - Omega) >= {LONG_TIME_GUARD}")
    tau = ThermalTime.from_temperature(spec.T, params)
    regime = classify_temperature(spec.T, w.omega_L, w.omega_U, params)

    unobserved, observed = sample_environment(spec, params)
    times = window.grid(params.Omega)
    gamma_mean = float(np.mean(gamma_factor(times, delta_X, unobserved, tau, params)))
    overlap_means = [float(np.mean(overlap_factor(times, delta_X, mac, tau, params)))
                     for mac in observed]

    report = RegimeReport(regime, float(delta_X), float(eps_dec), float(eps_ort), window,
                          gamma_mean, overlap_means, environment=spec.to_dict(),
                          model=params.to_dict())
    if regime is TemperatureRegime.LOW_T:
        kinds = {"gamma": MeanKind.LOW_T, "overlap": MeanKind.LOW_T}
    elif regime is TemperatureRegime.HIGH_T:
        kinds = {"gamma": MeanKind.HIGH_T_GAMMA, "overlap": MeanKind.HIGH_T_B}
    else:
        kinds = {}
    eps = {"gamma": eps_dec, "overlap": eps_ort}
    for role, kind in kinds.items():
        if delta_X > 0:
            report.timescales[role] = gaussian_timescale(kind, delta_X, w, tau, params,
                                                         check_regime=False)
        report.bounds[role] = nmac_bound(kind, eps[role], w, tau, params)
    if regime is TemperatureRegime.HIGH_T:
        if delta_X > 0:
            report.temperature = temperature_constraint(delta_X, spec.n_unobserved, w,
                                                        params, spec.T)
        if eps_dec < 1 and eps_ort < 1:
            report.ratio_bound = macrofraction_ratio(spec.T, params, eps_dec, eps_ort)
    return report
