"""Published closed forms, transcribed term by term for comparison.

Nothing in the main computation path uses these. They exist so the
validation report can measure each published expression against the
quadrature oracle and say which ones hold. Signatures follow
:mod:`sbsqbm.means`.
"""
from __future__ import annotations

import math

import numpy as np

from .means import MeanKind, _tau_value
from .params import ModelParams, ThermalTime
from .special import FrequencyWindow, SignPattern, f_ci, f_si, si


def _log_g(w):
    L, U, W = w.omega_L, w.omega_U, w.Omega
    return math.log((U + W) * (L - W) / ((U - W) * (L + W)))


def _scale(params):
    return 2.0 * params.M * params.gamma0_bar / (params.hbar * math.pi)


def _F(kind, pattern, t, w):
    fn = f_si if kind == "si" else f_ci
    return fn(SignPattern.parse(pattern), t, w)


# plateau constants -------------------------------------------------------

def plateau_lowt(w: FrequencyWindow):
    L, U, W = w.omega_L, w.omega_U, w.Omega
    A = -(2 * math.log(U / L) - math.log((U**2 - W**2) / (L**2 - W**2))) / (2 * W**2)
    B = 1 / (L**2 - W**2) - 1 / (U**2 - W**2) - A
    return A, B


def plateau_hight_gamma(w: FrequencyWindow):
    L, U, W = w.omega_L, w.omega_U, w.Omega
    A = -(w.delta / (U * L) + _log_g(w) / (2 * W)) / (4 * W**2)
    B = (L / (L**2 - W**2) - U / (U**2 - W**2)) / (4 * W**2) - A
    return A, B


def plateau_hight_b(w: FrequencyWindow):
    L, U, W = w.omega_L, w.omega_U, w.Omega
    A = math.log((U - W) * (L + W) / ((L - W) * (U + W))) / (2 * W)
    B = L / (L**2 - W**2) - U / (U**2 - W**2)
    return A, B


PLATEAU = {
    MeanKind.LOW_T: plateau_lowt,
    MeanKind.HIGH_T_GAMMA: plateau_hight_gamma,
    MeanKind.HIGH_T_B: plateau_hight_b,
}


# short-time coefficients ---------------------------------------------------

def c2_lowt(w, tau, params):
    return _scale(params) * math.log(w.omega_U / w.omega_L) / w.delta


def c2_hight_gamma(w, tau, params):
    return _scale(params) / (tau.tau_T * w.omega_L * w.omega_U)


def c2_hight_b_tau_squared(w, tau, params):
    """``tau_T`` appears twice and there is no band width."""
    return _scale(params) * tau.tau_T * tau.tau_T


def c2_hight_b_tau_over_band(w, tau, params):
    """One ``tau_T`` and a ``1/delta_omega``."""
    return _scale(params) * tau.tau_T / w.delta


# prefactors of the decoherence mean ---------------------------------------

def prefactor_hight_gamma_integral(w, tau, params):
    """Prefactor shown in front of the integral: ``1/(omega_L omega_U)``."""
    return _scale(params) / (tau.tau_T * w.omega_L * w.omega_U)


def prefactor_hight_gamma_asymptote(w, tau, params):
    """Prefactor shown in the long-time result: ``1/delta_omega``."""
    return _scale(params) / (tau.tau_T * w.delta)


# I1..I4 assemblies ---------------------------------------------------------

def integrals_lowt(t, w: FrequencyWindow):
    t = np.asarray(t, dtype=float)
    L, U, W = w.omega_L, w.omega_U, w.Omega
    dL, dU = L**2 - W**2, U**2 - W**2
    c, s = np.cos(W * t), np.sin(W * t)
    I1 = 0.5 * (1 / dL - 1 / dU) * (1 + c * c)
    I2 = ((4 * math.log(U / L) - 2 * math.log(dU / dL)) / (4 * W**2)
          + 1 / (2 * dL) - 1 / (2 * dU)) * (1 - c * c)
    I3 = c / (4 * W) * (2 * W * np.cos(L * t) / dL - 2 * W * np.cos(U * t) / dU
                        + t * c * _F("si", "+--+", t, w) + t * s * _F("ci", "+-+-", t, w))
    I4 = s / (4 * W) * (2 * L * np.sin(L * t) / dL - 2 * U * np.sin(U * t) / dU
                        + t * (c * _F("ci", "-+-+", t, w) + s * _F("si", "+--+", t, w))
                        - (_F("si", "-++-", t, w) - _F("ci", "-+-+", t, w)) / W)
    return I1, I2, I3, I4


def integrals_hight_gamma(t, w: FrequencyWindow):
    t = np.asarray(t, dtype=float)
    L, U, W = w.omega_L, w.omega_U, w.Omega
    dL, dU = L**2 - W**2, U**2 - W**2
    c, s = np.cos(W * t), np.sin(W * t)
    lg = _log_g(w)
    I1 = (1 - c * c) / W**2 * (w.delta / (U * L) - U / (2 * dU) + L / (2 * dL) + 3 * lg / (4 * W))
    I2 = (1 + c * c) / (4 * W**2) * (2 * L / dL - 2 * U / dU + lg / W)
    I3 = c / (4 * W**2) * (2 * L * np.cos(L * t) / dL - 2 * U * np.cos(U * t) / dU
                           + t * c * _F("si", "+-+-", t, w) + t * s * _F("ci", "+--+", t, w)
                           + (c * _F("ci", "+--+", t, w) + s * _F("si", "-+-+", t, w)) / W)
    I4 = s / (2 * W**3) * (2 * (si(U * t) - si(L * t))
                           - c * _F("si", "-+-+", t, w) - s * _F("ci", "-++-", t, w)
                           + W / 2 * (2 * W * np.sin(L * t) / dL - 2 * W * np.sin(U * t) / dU
                                      + t * c * _F("ci", "-++-", t, w)
                                      + t * s * _F("si", "+-+-", t, w)))
    return I1, I2, I3, I4


def integrals_hight_b(t, w: FrequencyWindow):
    # the printed results omit the (1 +- cos^2) factors of the integrands;
    # they are restored here from the integral definitions
    t = np.asarray(t, dtype=float)
    L, U, W = w.omega_L, w.omega_U, w.Omega
    dL, dU = L**2 - W**2, U**2 - W**2
    c, s = np.cos(W * t), np.sin(W * t)
    lg = _log_g(w)
    base = L / (2 * dL) - U / (2 * dU)
    I1 = (base - lg / (4 * W)) * (1 + c * c)
    I2 = (base + lg / (4 * W)) * (1 - c * c)
    I3 = (2 * L * np.cos(L * t) / dL - 2 * U * np.cos(U * t) / dU
          + t * (c * _F("si", "+-+-", t, w) + s * _F("ci", "+--+", t, w))
          + c * (c * _F("ci", "-++-", t, w) + s * _F("si", "+-+-", t, w)) / W) / (4 * W)
    I4 = s / 4 * (2 * W * np.sin(L * t) / dL - 2 * W * np.sin(U * t) / dU
                  + t * (c * _F("ci", "-++-", t, w) + s * _F("si", "+-+-", t, w)))
    return I1, I2, I3, I4


def mean_printed(kind, t, w: FrequencyWindow, tau: ThermalTime | None, params: ModelParams):
    """``prefactor * (I1 + I2 - 2 I3 - 2 I4)`` with every piece as published."""
    kind = MeanKind.parse(kind)
    if kind is MeanKind.LOW_T:
        pref = _scale(params) / w.delta
        parts = integrals_lowt(t, w)
    elif kind is MeanKind.HIGH_T_GAMMA:
        _tau_value(kind, tau)
        pref = prefactor_hight_gamma_integral(w, tau, params)
        parts = integrals_hight_gamma(t, w)
    else:
        tau_T = _tau_value(kind, tau)
        pref = _scale(params) * tau_T / w.delta
        parts = integrals_hight_b(t, w)
    I1, I2, I3, I4 = parts
    return pref * (I1 + I2 - 2 * I3 - 2 * I4)


# macrofraction bounds in the fast-environment limit -------------------------

def bound_fast(kind, epsilon, w: FrequencyWindow, T, params: ModelParams):
    """Right-hand approximations for the minimal ``delta_X**2 * N_mac``."""
    kind = MeanKind.parse(kind)
    L, U = w.omega_L, w.omega_U
    log_eps = math.log(1.0 / epsilon)
    Mg = params.M * params.gamma0_bar
    if kind is MeanKind.LOW_T:
        return params.hbar * math.pi * U**2 * L**2 / (Mg * (U + L)) * log_eps
    if kind is MeanKind.HIGH_T_GAMMA:
        return (params.hbar**2 * math.pi * w.Omega**2 * U * L
                / (Mg * params.kB * T) * log_eps)
    return 2 * math.pi * params.kB * U * L * T / Mg * log_eps
