"""Sine and cosine integrals and their four-term signed combinations.

``Si`` and ``Ci`` are evaluated with two branches:

* ``|x| <= SERIES_BRANCH``: Maclaurin series (the largest term is ~3, so at
  most one digit is lost to cancellation);
* ``|x| > SERIES_BRANCH``: continued fraction for ``E1(ix)`` evaluated with
  the modified Lentz algorithm.

Every ``F`` combination pairs a sign pattern with the four arguments
``(wL - W) t, (wU - W) t, (wL + W) t, (wU + W) t`` where ``W`` is the central
frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnsupportedPatternError, ValidityError

EULER_GAMMA = 0.57721566490153286060651209008240243
SERIES_BRANCH = 4.0
SHORT_TIME_GUARD = 0.1
LONG_TIME_GUARD = 10.0

_SERIES_TERMS = 40
_CF_MAXIT = 500
_CF_EPS = 1e-16
_FPMIN = 1e-300


def _series(x):
    """Return ``(Si(x), Cin(x))`` by Maclaurin series, ``Cin = int_0^x (1-cos u)/u``."""
    si = x.copy()
    cin = np.zeros_like(x)
    term = x.copy()  # x**k / k!
    for k in range(2, _SERIES_TERMS):
        term = term * x / k
        if k % 2:
            si += (-1) ** ((k - 1) // 2) * term / k
        else:
            cin += (-1) ** (k // 2 + 1) * term / k
    return si, cin


def _continued_fraction(x):
    """Return ``(Si(x), Ci(x))`` for ``x > 2`` from the continued fraction of ``E1(ix)``."""
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1.0 / _FPMIN, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for i in range(2, _CF_MAXIT):
            a = -float((i - 1) ** 2)
            b = b + 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h = np.where(active, h * delta, h)
            active &= np.abs(delta.real - 1.0) + np.abs(delta.imag) >= _CF_EPS
            if not active.any():
                break
    h = (np.cos(x) - 1j * np.sin(x)) * h
    return 0.5 * np.pi + h.imag, -h.real


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ParameterError("NaN argument to a sine/cosine integral")
    return arr


def _si_cin_ci(ax):
    """Si, Cin and Ci on non-negative arrays; Ci is NaN at zero."""
    si = np.empty_like(ax)
    cin = np.empty_like(ax)
    ci = np.full_like(ax, np.nan)
    small = ax <= SERIES_BRANCH
    if small.any():
        s, c = _series(ax[small])
        si[small], cin[small] = s, c
        pos = ax[small] > 0
        with np.errstate(divide="ignore"):
            ci[small] = np.where(pos, EULER_GAMMA + np.log(ax[small]) - c, np.nan)
    large = ~small
    if large.any():
        s, c = _continued_fraction(ax[large])
        si[large], ci[large] = s, c
        cin[large] = EULER_GAMMA + np.log(ax[large]) - c
    return si, cin, ci


def sici(x):
    """Vectorized ``(Si(x), Ci(x))``; ``Ci`` needs ``x > 0``."""
    arr = _as_array(x)
    if (arr <= 0).any():
        raise ParameterError("Ci is only defined here for positive arguments")
    s, _, c = _si_cin_ci(arr)
    return s[()], c[()]


def si(x):
    """Sine integral ``int_0^x sin(u)/u du``; odd in ``x``."""
    arr = _as_array(x)
    s, _, _ = _si_cin_ci(np.abs(arr))
    return (np.sign(arr) * s)[()]


def ci(x):
    """Cosine integral ``gamma + ln x + int_0^x (cos u - 1)/u du`` for ``x > 0``."""
    arr = _as_array(x)
    if (arr <= 0).any():
        raise ParameterError("Ci is only defined here for positive arguments")
    _, _, c = _si_cin_ci(arr)
    return c[()]


def cin(x):
    """Entire part ``int_0^x (1 - cos u)/u du`` of the cosine integral (even in ``x``)."""
    arr = _as_array(x)
    _, c, _ = _si_cin_ci(np.abs(arr))
    return c[()]


@dataclass(frozen=True)
class SignPattern:
    """Four signs applied to the Si/Ci terms, in the argument order above."""

    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 4 or any(s not in (1, -1) for s in signs):
            raise ParameterError(f"a sign pattern needs four entries of +-1, got {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text):
        """``SignPattern.parse("+-+-")``."""
        text = text.replace(",", "").replace(" ", "").strip("()")
        return cls(tuple(1 if ch == "+" else -1 if ch == "-" else 0 for ch in text))

    def __neg__(self):
        return SignPattern(tuple(-s for s in self.signs))

    def __str__(self):
        return "(" + ",".join("+" if s > 0 else "-" for s in self.signs) + ")"

    @property
    def vector(self):
        return np.array(self.signs, dtype=float)


PMPM = SignPattern((1, -1, 1, -1))
PMMP = SignPattern((1, -1, -1, 1))


@dataclass(frozen=True)
class FrequencyWindow:
    """Bath band ``[omega_L, omega_U]`` and central frequency ``Omega``."""

    omega_L: float
    omega_U: float
    Omega: float

    def __post_init__(self):
        if not 0 < self.Omega < self.omega_L < self.omega_U:
            raise ParameterError(
                "need 0 < Omega < omega_L < omega_U (off-resonant band), got "
                f"Omega={self.Omega}, omega_L={self.omega_L}, omega_U={self.omega_U}")

    @property
    def delta(self):
        return self.omega_U - self.omega_L

    @classmethod
    def from_spec(cls, spec, params):
        return cls(spec.omega_L, spec.omega_U, params.Omega)

    @property
    def rates(self):
        L, U, W = self.omega_L, self.omega_U, self.Omega
        return np.array([L - W, U - W, L + W, U + W])

    def arguments(self, t):
        """Array of shape ``(4,) + t.shape`` with the four ``F`` arguments."""
        t = np.asarray(t, dtype=float)
        return self.rates.reshape((4,) + (1,) * t.ndim) * t


def _check_time(t, strict):
    t = np.asarray(t, dtype=float)
    if np.isnan(t).any():
        raise ParameterError("NaN time")
    if strict and (t <= 0).any():
        raise ParameterError("F_Ci needs t > 0; use f_ci_limit near t = 0")
    if (t < 0).any():
        raise ParameterError("times must be non-negative")
    return t


def si_terms(t, w: FrequencyWindow):
    """``Si`` at the four ``F`` arguments, shape ``(4,) + t.shape``."""
    return si(w.arguments(_check_time(t, strict=False)))


def ci_terms(t, w: FrequencyWindow):
    """``Ci`` at the four ``F`` arguments, shape ``(4,) + t.shape``; needs ``t > 0``."""
    return ci(w.arguments(_check_time(t, strict=True)))


def f_si(pattern: SignPattern, t, w: FrequencyWindow):
    """Signed sum of ``Si`` over the four arguments."""
    return np.tensordot(pattern.vector, si_terms(t, w), axes=1)[()]


def f_ci(pattern: SignPattern, t, w: FrequencyWindow):
    """Signed sum of ``Ci`` over the four arguments (``t > 0``).

    Patterns whose signs do not sum to zero diverge like ``sum(s) * ln t``
    as ``t -> 0``; cancelling patterns are better served by :func:`f_ci_limit`.
    """
    return np.tensordot(pattern.vector, ci_terms(t, w), axes=1)[()]


def f_ci_limit(pattern: SignPattern, t, w: FrequencyWindow):
    """``F_Ci`` for cancelling patterns, exact down to and including ``t = 0``.

    Writing ``Ci(r t) = gamma + ln r + ln t - Cin(r t)`` the ``gamma`` and
    ``ln t`` pieces drop out when the signs sum to zero, so no large logs are
    ever subtracted.
    """
    if sum(pattern.signs) != 0:
        raise ParameterError(f"pattern {pattern} has no finite t -> 0 limit")
    t = _check_time(t, strict=False)
    logs = float(np.dot(pattern.vector, np.log(w.rates)))
    return (logs - np.tensordot(pattern.vector, cin(w.arguments(t)), axes=1))[()]


def _tabulated_sign(pattern):
    for base in (PMPM, PMMP):
        if pattern == base:
            return base, 1.0
        if pattern == -base:
            return base, -1.0
    raise UnsupportedPatternError(
        f"no expansion tabulated for {pattern}; only {PMPM}, {PMMP} and their negations")


def _short_guard(t, w, guard):
    t = _check_time(t, strict=False)
    if (t * w.omega_U > guard).any():
        raise ValidityError(f"short-time expansion needs t*omega_U <= {guard}")
    return t


def _long_guard(t, w, guard):
    t = _check_time(t, strict=True)
    if (t * (w.omega_L - w.Omega) < guard).any():
        raise ValidityError(f"long-time expansion needs t*(omega_L - Omega) >= {guard}")
    return t


def f_si_short(pattern: SignPattern, t, w: FrequencyWindow, guard=SHORT_TIME_GUARD):
    """Small-``t`` polynomial for ``F_Si``; error ``O(t**5)``."""
    base, sign = _tabulated_sign(pattern)
    t = _short_guard(t, w, guard)
    L, U, W = w.omega_L, w.omega_U, w.Omega
    if base == PMPM:
        value = 2 * (L - U) * t + t**3 / 9 * (U**3 - L**3 + 3 * W**2 * U - 3 * W**2 * L)
    else:
        value = t**3 / 3 * W * (L**2 - U**2)
    return (sign * value)[()]


def f_ci_short(pattern: SignPattern, t, w: FrequencyWindow, guard=SHORT_TIME_GUARD):
    """Small-``t`` form of ``F_Ci``: a log constant plus a ``t**2`` term; error ``O(t**4)``."""
    base, sign = _tabulated_sign(pattern)
    t = _short_guard(t, w, guard)
    L, U, W = w.omega_L, w.omega_U, w.Omega
    if base == PMPM:
        value = math.log((L**2 - W**2) / (U**2 - W**2)) + 0.5 * (U**2 - L**2) * t**2
    else:
        value = (math.log((L - W) * (U + W) / ((L + W) * (U - W)))
                 + W * (L - U) * t**2)
    return (sign * value)[()]


def _long_pieces(t, w):
    L, U, W = w.omega_L, w.omega_U, w.Omega
    dL, dU = L**2 - W**2, U**2 - W**2
    return (L, U, W, dL, dU, np.cos(L * t), np.sin(L * t), np.cos(U * t),
            np.sin(U * t), np.cos(W * t), np.sin(W * t))


def f_si_long(pattern: SignPattern, t, w: FrequencyWindow, guard=LONG_TIME_GUARD):
    """Large-``t`` trigonometric asymptote of ``F_Si`` (the ``pi/2`` parts cancel).

    Returns the asymptote of ``t * F_Si`` divided by ``t``, so the result is
    directly comparable with :func:`f_si`; the error is ``O(t**-2)``.
    """
    base, sign = _tabulated_sign(pattern)
    t = _long_guard(t, w, guard)
    L, U, W, dL, dU, cL, sL, cU, sU, c, s = _long_pieces(t, w)
    if base == PMPM:
        tf = 2 * (U * cU / dU * c + W * sU / dU * s - L * cL / dL * c - W * sL / dL * s)
    else:
        tf = 2 * (U * sU / dU * s + W * cU / dU * c - L * sL / dL * s - W * cL / dL * c)
    return (sign * tf / t)[()]


def f_ci_long(pattern: SignPattern, t, w: FrequencyWindow, guard=LONG_TIME_GUARD):
    """Large-``t`` trigonometric asymptote of ``F_Ci``, divided by ``t`` as in :func:`f_si_long`."""
    base, sign = _tabulated_sign(pattern)
    t = _long_guard(t, w, guard)
    L, U, W, dL, dU, cL, sL, cU, sU, c, s = _long_pieces(t, w)
    if base == PMPM:
        # leading term of Ci(x) ~ sin(x)/x summed over the +- pairs
        tf = 2 * (L * sL / dL * c - W * cL / dL * s - U * sU / dU * c + W * cU / dU * s)
    else:
        tf = 2 * (W * sL / dL * c - L * cL / dL * s + U * cU / dU * s - W * sU / dU * c)
    return (sign * tf / t)[()]
