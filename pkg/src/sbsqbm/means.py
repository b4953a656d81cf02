"""Ensemble means of the indicator functions over a uniform frequency band.

For a bath whose frequencies are i.i.d. uniform on ``[omega_L, omega_U]`` the
law of large numbers replaces a macrofraction sum ``sum_k f(t; omega_k)`` by
``N_mac * <<f>>(t)`` with

    <<f>>(t) = (1 / delta_omega) * int_{omega_L}^{omega_U} f(t; omega) d omega.

With the coupling ``C_k = 2 sqrt(M m_k gamma0_bar / pi)`` one has

    |alpha(t; w)|^2 = (2 M gamma0_bar / (pi hbar)) * w / (w^2 - W^2)^2 * g(w, t)
    g = (1 + c^2) + (W/w)^2 (1 - c^2) - 2 c cos(w t) - 2 (W/w) s sin(w t)

where ``W`` is the central frequency, ``c = cos(W t)`` and ``s = sin(W t)``.
Each mean is therefore a sum of integrals of ``w**j / (w^2 - W^2)^2`` times
``1``, ``cos(w t)`` or ``sin(w t)``. Partial fractions reduce those to
elementary functions and to ``Si``/``Ci`` evaluated at the four ``F``
arguments (poles at ``+-W``) or at ``omega_{L,U} t`` (pole at 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .errors import ParameterError, QuadratureError, ValidityError
from .indicators import displacement_amplitude
from .params import ModelParams, ThermalTime, coupling_constant
from .special import (LONG_TIME_GUARD, SHORT_TIME_GUARD, FrequencyWindow, ci,
                      ci_terms, si, si_terms)


class MeanKind(Enum):
    """Which leading-order indicator function is averaged."""

    LOW_T = "LowT_f0"
    HIGH_T_GAMMA = "HighT_Gamma"
    HIGH_T_B = "HighT_B"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "_")
        aliases = {
            "lowt_f0": cls.LOW_T, "low_t": cls.LOW_T, "lowt": cls.LOW_T, "low": cls.LOW_T,
            "hight_gamma": cls.HIGH_T_GAMMA, "high_t_gamma": cls.HIGH_T_GAMMA,
            "gamma": cls.HIGH_T_GAMMA,
            "hight_b": cls.HIGH_T_B, "high_t_b": cls.HIGH_T_B, "b": cls.HIGH_T_B,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ParameterError(f"unknown mean kind {text!r}") from None


class ExactIntegrand(Enum):
    """Full thermal integrands with true coth/tanh factors (quadrature only)."""

    GAMMA = "exact_gamma"
    B = "exact_b"


# power j in w**j / (w^2 - W^2)^2 multiplying (1 + c^2)
_POWER = {MeanKind.LOW_T: 1, MeanKind.HIGH_T_GAMMA: 0, MeanKind.HIGH_T_B: 2}


@dataclass(frozen=True)
class AsymptoteConstants:
    """Long-time mean is ``prefactor * (A cos^2(W t) + B)``."""

    kind: MeanKind
    A: float
    B: float

    @property
    def plateau_min(self):
        """Minimum of ``A x + B`` over ``x`` in ``[0, 1]``."""
        return self.B if self.A >= 0 else self.A + self.B

    @property
    def time_average(self):
        return 0.5 * self.A + self.B


def _tau_value(kind, tau):
    if kind is MeanKind.LOW_T:
        return None
    if tau is None or tau.is_zero_temperature:
        raise ParameterError(f"{kind.value} needs a finite positive thermal time (T > 0)")
    return tau.tau_T


def mean_prefactor(kind, w: FrequencyWindow, tau: ThermalTime | None, params: ModelParams):
    """Overall constant in front of the frequency integral for ``kind``."""
    kind = MeanKind.parse(kind)
    base = 2.0 * params.M * params.gamma0_bar / (params.hbar * math.pi * w.delta)
    tau_T = _tau_value(kind, tau)
    if kind is MeanKind.HIGH_T_GAMMA:
        return base / tau_T
    if kind is MeanKind.HIGH_T_B:
        return base * tau_T
    return base


def pole_terms(j, Omega):
    """Partial fractions of ``w**j / (w^2 - Omega^2)^2`` for ``-2 <= j <= 2``.

    Returns ``(pole, order, coefficient)`` triples.
    """
    if not -2 <= j <= 2:
        raise ParameterError(f"power {j} outside the supported range [-2, 2]")
    W = Omega
    terms = [
        (W, 2, W ** (j - 2) / 4.0),
        (W, 1, (j - 1) * W ** (j - 3) / 4.0),
        (-W, 2, (-W) ** j / (4.0 * W**2)),
        (-W, 1, (j - 1) * (-W) ** (j - 1) / (4.0 * W**2)),
    ]
    if j == -1:
        terms.append((0.0, 1, 1.0 / W**4))
    elif j == -2:
        terms.append((0.0, 2, 1.0 / W**4))
    return [term for term in terms if term[2] != 0.0]


def rational_integral(j, w: FrequencyWindow):
    """``int_{omega_L}^{omega_U} w**j / (w^2 - Omega^2)^2 dw`` in closed form."""
    L, U = w.omega_L, w.omega_U
    total = 0.0
    for pole, order, coef in pole_terms(j, w.Omega):
        if order == 1:
            total += coef * math.log((U - pole) / (L - pole))
        else:
            total += coef * (1.0 / (L - pole) - 1.0 / (U - pole))
    return total


class _OscillatoryTables:
    """``Si``/``Ci`` differences at every pole for one time array."""

    def __init__(self, t, w: FrequencyWindow, need_zero_pole):
        self.t = t
        self.w = w
        S, C = si_terms(t, w), ci_terms(t, w)
        # rows: (L - W)t, (U - W)t, (L + W)t, (U + W)t
        self.delta = {
            w.Omega: (S[1] - S[0], C[1] - C[0]),
            -w.Omega: (S[3] - S[2], C[3] - C[2]),
        }
        if need_zero_pole:
            self.delta[0.0] = (si(w.omega_U * t) - si(w.omega_L * t),
                               ci(w.omega_U * t) - ci(w.omega_L * t))

    def first_order(self, pole):
        """``int cos(wt)/(w - p)`` and ``int sin(wt)/(w - p)`` over the band."""
        dS, dC = self.delta[pole]
        cp, sp = np.cos(pole * self.t), np.sin(pole * self.t)
        return cp * dC - sp * dS, sp * dC + cp * dS

    def integrals(self, pole, order):
        c1, s1 = self.first_order(pole)
        if order == 1:
            return c1, s1
        # integrate by parts once
        t, L, U = self.t, self.w.omega_L, self.w.omega_U
        cos_b = np.cos(L * t) / (L - pole) - np.cos(U * t) / (U - pole)
        sin_b = np.sin(L * t) / (L - pole) - np.sin(U * t) / (U - pole)
        return cos_b - t * s1, sin_b + t * c1


def _oscillatory_integral(j, tables, trig):
    total = 0.0
    for pole, order, coef in pole_terms(j, tables.w.Omega):
        cos_part, sin_part = tables.integrals(pole, order)
        total = total + coef * (cos_part if trig == "cos" else sin_part)
    return total


# below this t * omega_U the t-series replaces the Si/Ci form, whose
# differences cancel catastrophically as t -> 0
SMALL_TIME_BRANCH = 1.0
_SERIES_TERMS = 14


def _band_moment(p, w):
    L, U = w.omega_L, w.omega_U
    if p == -1:
        return math.log(U / L)
    return (U ** (p + 1) - L ** (p + 1)) / (p + 1)


def _sum_poly(a, W):
    """Monomial coefficients of ``(w + W)**a + (w - W)**a``; only even powers of W survive."""
    coef = [0.0] * (a + 1)
    for e in range(0, a + 1, 2):
        coef[a - e] = 2.0 * math.comb(a, e) * W**e
    return coef


def series_coefficients(kind, w: FrequencyWindow, terms=_SERIES_TERMS):
    """``m_n`` with ``int w**(j-2) |I(w, t)|^2 dw = sum_n m_n t**(2n + 2)``.

    ``I = int_0^t e^{i w s} cos(W s) ds = sum_k i^k S_k(w) t^(k+1) / (2 (k+1)!)``
    with ``S_k = (w + W)^k + (w - W)^k``. Odd total orders are purely
    imaginary and drop out of ``|I|^2``.
    """
    kind = MeanKind.parse(kind)
    power = _POWER[kind] - 2
    polys = [_sum_poly(a, w.Omega) for a in range(2 * terms)]
    moments = {}

    def moment(p):
        if p not in moments:
            moments[p] = _band_moment(p, w)
        return moments[p]

    out = []
    for n in range(terms):
        N = 2 * n
        total = 0.0
        for a in range(N + 1):
            b = N - a
            sign = -1.0 if ((a - b) // 2) % 2 else 1.0
            Pa, Pb = polys[a], polys[b]
            integral = 0.0
            for i, ca in enumerate(Pa):
                if ca == 0.0:
                    continue
                for k, cb in enumerate(Pb):
                    if cb != 0.0:
                        integral += ca * cb * moment(i + k + power)
            total += sign * integral / (4.0 * math.factorial(a + 1) * math.factorial(b + 1))
        out.append(total)
    return np.array(out)


def _mean_series(kind, t, w):
    m = series_coefficients(kind, w)
    t2 = t * t
    return t2 * np.polynomial.polynomial.polyval(t2, m)


def _positive_times(t):
    t = np.asarray(t, dtype=float)
    if np.isnan(t).any() or (t <= 0).any():
        raise ParameterError("mean_exact needs t > 0; use mean_short_time at t -> 0")
    return t


def mean_exact(kind, t, w: FrequencyWindow, tau: ThermalTime | None, params: ModelParams):
    """Closed-form ensemble mean of the leading-order indicator function.

    Exact for the uniform band at every ``t > 0``; no short/long-time
    approximation is made. Below ``t * omega_U = SMALL_TIME_BRANCH`` the
    convergent t-series is summed instead of the Si/Ci form. For HighT_Gamma
    the pole-at-zero terms cancel against the others as ``(omega_L/Omega)**3``,
    costing about eight digits at ``omega_L = 300 Omega``. ``HighT`` kinds use the leading-order thermal
    factors ``1/(tau_T w)`` and ``tau_T w``.
    """
    kind = MeanKind.parse(kind)
    t = _positive_times(t)
    pref = mean_prefactor(kind, w, tau, params)
    small = t * w.omega_U <= SMALL_TIME_BRANCH
    if small.all():
        return (pref * _mean_series(kind, t, w))[()]
    result = np.empty_like(t)
    result[small] = _mean_series(kind, t[small], w)
    result[~small] = _mean_closed(kind, t[~small], w)
    return (pref * result)[()]


def _mean_closed(kind, t, w):
    W = w.Omega
    j = _POWER[kind]
    c, s = np.cos(W * t), np.sin(W * t)
    tables = _OscillatoryTables(t, w, need_zero_pole=(j - 1 < 0))
    value = ((1 + c * c) * rational_integral(j, w)
             + W**2 * (1 - c * c) * rational_integral(j - 2, w)
             - 2 * c * _oscillatory_integral(j, tables, "cos")
             - 2 * W * s * _oscillatory_integral(j - 1, tables, "sin"))
    return value


def _integrand(kind, t, w, tau, params):
    if callable(kind) and not isinstance(kind, (MeanKind, ExactIntegrand)):
        return kind
    if isinstance(kind, str):
        try:
            kind = ExactIntegrand(kind)
        except ValueError:
            kind = MeanKind.parse(kind)
    m = 1.0
    C = coupling_constant(params, m)

    def abs_alpha_sq(omega):
        return abs(displacement_amplitude(t, omega, m, C, params)) ** 2

    if kind is MeanKind.LOW_T:
        return abs_alpha_sq
    if kind is ExactIntegrand.GAMMA:
        if tau is None:
            raise ParameterError("exact integrands need a ThermalTime")
        return lambda omega: abs_alpha_sq(omega) * float(tau.coth(omega))
    if kind is ExactIntegrand.B:
        if tau is None:
            raise ParameterError("exact integrands need a ThermalTime")
        return lambda omega: abs_alpha_sq(omega) * float(tau.tanh(omega))
    tau_T = _tau_value(kind, tau)
    if kind is MeanKind.HIGH_T_GAMMA:
        return lambda omega: abs_alpha_sq(omega) / (tau_T * omega)
    return lambda omega: abs_alpha_sq(omega) * tau_T * omega


def mean_quadrature(kind, t, w: FrequencyWindow, tau: ThermalTime | None = None,
                    params: ModelParams | None = None, tol=1e-10):
    """Adaptive quadrature of ``(1/delta_omega) int f d omega`` over the band.

    ``kind`` is a :class:`MeanKind` (leading-order integrand), an
    :class:`ExactIntegrand` (true coth/tanh factors) or any callable of the
    frequency. The band is cut into panels a few oscillation periods wide so
    that each panel sees a smooth integrand.
    """
    if not 1e-12 <= tol <= 1e-3:
        raise ParameterError(f"tol must lie in [1e-12, 1e-3], got {tol}")
    params = params or ModelParams(Omega=w.Omega)
    t = float(t)
    if t < 0:
        raise ParameterError("t must be non-negative")
    f = _integrand(kind, t, w, tau, params)
    L, U = w.omega_L, w.omega_U
    n_panels = 1 + int(t * (U + w.Omega) * w.delta / (U * 4 * math.pi))
    edges = np.linspace(L, U, n_panels + 1)
    total = 0.0
    error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        out = quad(f, a, b, epsabs=0.0, epsrel=tol * 1e-1, limit=400, full_output=1)
        value, abserr = out[0], out[1]
        total += value
        error += abserr
        if len(out) > 3 and abserr > tol * abs(value) and abserr > 1e-300:
            raise QuadratureError(f"quadrature did not converge on [{a}, {b}]: {out[3]}",
                                  estimate=total / w.delta, error=error / w.delta)
    if error > tol * abs(total) and error > 1e-300:
        raise QuadratureError("quadrature error estimate above tolerance",
                              estimate=total / w.delta, error=error / w.delta)
    return total / w.delta


def short_time_coefficient(kind, w: FrequencyWindow, tau: ThermalTime | None,
                           params: ModelParams):
    """Coefficient ``c2`` in ``<<f>> = c2 t^2 + O(t^4)``.

    Near ``t = 0``, ``|alpha|^2 -> (2 M gamma0_bar / (pi hbar)) t^2 / w``, hence

    * LowT:        ``2 M g / (hbar pi dw) * ln(wU / wL)``
    * HighT Gamma: ``2 M g / (hbar pi tau_T wL wU)``
    * HighT B:     ``2 M g tau_T / (hbar pi)`` (the integrand is flat in ``w``)
    """
    kind = MeanKind.parse(kind)
    scale = 2.0 * params.M * params.gamma0_bar / (params.hbar * math.pi)
    tau_T = _tau_value(kind, tau)
    if kind is MeanKind.LOW_T:
        return scale * math.log(w.omega_U / w.omega_L) / w.delta
    if kind is MeanKind.HIGH_T_GAMMA:
        return scale / (tau_T * w.omega_L * w.omega_U)
    return scale * tau_T


def mean_short_time(kind, t, w: FrequencyWindow, tau: ThermalTime | None,
                    params: ModelParams, guard=SHORT_TIME_GUARD):
    t = np.asarray(t, dtype=float)
    if (t < 0).any() or (t * w.omega_U > guard).any():
        raise ValidityError(f"short-time mean needs 0 <= t*omega_U <= {guard}")
    return (short_time_coefficient(kind, w, tau, params) * t**2)[()]


def asymptote_constants(kind, w: FrequencyWindow, tau: ThermalTime | None = None,
                        params: ModelParams | None = None) -> AsymptoteConstants:
    """Plateau constants of the long-time mean.

    Once the oscillatory integrals have decayed only the ``(1 + c^2)`` and
    ``(1 - c^2)`` pieces survive, so with ``P = int w^j/(w^2-W^2)^2`` and
    ``Q = W^2 int w^(j-2)/(w^2-W^2)^2``: ``A = P - Q`` and ``B = P + Q``.
    """
    kind = MeanKind.parse(kind)
    j = _POWER[kind]
    P = rational_integral(j, w)
    Q = w.Omega**2 * rational_integral(j - 2, w)
    return AsymptoteConstants(kind, P - Q, P + Q)


def mean_long_time(kind, t, w: FrequencyWindow, tau: ThermalTime | None,
                   params: ModelParams, guard=LONG_TIME_GUARD):
    t = np.asarray(t, dtype=float)
    if (t * (w.omega_L - w.Omega) < guard).any():
        raise ValidityError(f"long-time mean needs t*(omega_L - Omega) >= {guard}")
    consts = asymptote_constants(kind, w)
    pref = mean_prefactor(kind, w, tau, params)
    return (pref * (consts.A * np.cos(w.Omega * t) ** 2 + consts.B))[()]
