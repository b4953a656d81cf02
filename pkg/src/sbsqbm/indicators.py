"""Displacement amplitudes and the SBS indicator functions of finite baths.

Each bath oscillator ``k`` is displaced by ``alpha_k(t) X0`` when the central
oscillator starts at position ``X0``. For two branches separated by
``delta_X`` the decoherence factor and the generalized overlap of a
macrofraction read

    |Gamma| = exp(-(delta_X**2 / 2) * sum_k |alpha_k|^2 coth(tau_T w_k))
    B       = exp(-(delta_X**2 / 2) * sum_k |alpha_k|^2 tanh(tau_T w_k))
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ParameterError
from .params import EnvironmentSpec, ModelParams, ThermalTime, coupling_constant

#: Relative half-width of the excluded resonance window around Omega.
RESONANCE_GUARD = 1e-9

_CHUNK = 65536


def _expm1_i(x):
    """``exp(i x) - 1`` without cancellation for small ``x``."""
    half = 0.5 * x
    return 2j * np.sin(half) * np.exp(1j * half)


def displacement_amplitude(t, omega, m, C, params: ModelParams):
    """Vectorized ``alpha(t)`` for frequencies ``omega`` (broadcasts)."""
    t = np.asarray(t, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if (t < 0).any():
        raise ParameterError("alpha needs t >= 0")
    W = params.Omega
    if (np.abs(omega - W) <= RESONANCE_GUARD * W).any():
        raise ParameterError("resonant mode omega == Omega is excluded")
    pre = -np.asarray(C) / (2.0 * np.sqrt(2.0 * params.hbar * np.asarray(m) * omega))
    plus = _expm1_i((omega + W) * t) / (omega + W)
    minus = _expm1_i((omega - W) * t) / (omega - W)
    return pre * (plus + minus)


@dataclass(frozen=True)
class Oscillator:
    omega: float
    m: float
    C: float

    def __post_init__(self):
        for name in ("omega", "m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def coupled(cls, omega, params: ModelParams, m=1.0):
        return cls(float(omega), float(m), coupling_constant(params, m))


@dataclass(frozen=True)
class Separation:
    delta_X: float

    def __post_init__(self):
        if not (math.isfinite(self.delta_X) and self.delta_X >= 0):
            raise ParameterError(f"delta_X must be finite and >= 0, got {self.delta_X!r}")


def _delta(delta_X):
    if isinstance(delta_X, Separation):
        return delta_X.delta_X
    return Separation(float(delta_X)).delta_X


@dataclass(frozen=True, eq=False)
class Macrofraction:
    """A group of bath oscillators stored column-wise.

    ``label`` is ``"unobserved"`` or ``"observed_<i>"`` (1-based).
    """

    omega: np.ndarray
    m: np.ndarray
    C: np.ndarray
    label: str = "unobserved"

    def __post_init__(self):
        arrays = [np.atleast_1d(np.asarray(a, dtype=float)) for a in (self.omega, self.m, self.C)]
        if arrays[0].size == 0:
            raise ParameterError("a macrofraction needs at least one oscillator")
        try:
            arrays = np.broadcast_arrays(*arrays)
        except ValueError:
            raise ParameterError("omega, m and C must have matching lengths") from None
        for name, arr in zip(("omega", "m", "C"), arrays):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_oscillators(cls, oscillators, label="unobserved"):
        oscillators = list(oscillators)
        if not oscillators:
            raise ParameterError("a macrofraction needs at least one oscillator")
        return cls(np.array([o.omega for o in oscillators]),
                   np.array([o.m for o in oscillators]),
                   np.array([o.C for o in oscillators]), label)

    @property
    def oscillators(self):
        return [Oscillator(float(w), float(m), float(c))
                for w, m, c in zip(self.omega, self.m, self.C)]

    def __len__(self):
        return self.omega.size

    def split(self, index):
        """Two macrofractions holding the first ``index`` and the remaining modes."""
        return (Macrofraction(self.omega[:index], self.m[:index], self.C[:index], self.label),
                Macrofraction(self.omega[index:], self.m[index:], self.C[index:], self.label))


def alpha(t, osc, params: ModelParams):
    """Complex displacement amplitude of one oscillator (or each mode of a macrofraction)."""
    return displacement_amplitude(t, osc.omega, osc.m, osc.C, params)


def f_gamma(t, osc, tau: ThermalTime, params: ModelParams):
    """``|alpha|^2 coth(tau_T w)``."""
    return np.abs(alpha(t, osc, params)) ** 2 * tau.coth(osc.omega)


def f_b(t, osc, tau: ThermalTime, params: ModelParams):
    """``|alpha|^2 tanh(tau_T w)``."""
    return np.abs(alpha(t, osc, params)) ** 2 * tau.tanh(osc.omega)


def _compensated_sum(chunks):
    # Neumaier summation of per-chunk partial sums (last axis is time)
    total = None
    comp = None
    for part in chunks:
        if total is None:
            total = np.array(part, dtype=float)
            comp = np.zeros_like(total)
            continue
        new = total + part
        big = np.abs(total) >= np.abs(part)
        comp += np.where(big, (total - new) + part, (part - new) + total)
        total = new
    return total + comp


def _exponent_sum(t, mac: Macrofraction, energy, params):
    t = np.atleast_1d(np.asarray(t, dtype=float))

    def chunks():
        for start in range(0, len(mac), _CHUNK):
            sl = slice(start, start + _CHUNK)
            w = mac.omega[sl, None]
            a = displacement_amplitude(t[None, :], w, mac.m[sl, None], mac.C[sl, None], params)
            yield np.sum(np.abs(a) ** 2 * energy(w), axis=0)

    return _compensated_sum(chunks())


def gamma_exponent(t, mac: Macrofraction, tau: ThermalTime, params: ModelParams):
    """``sum_k f_gamma`` over the macrofraction, one entry per time."""
    return _exponent_sum(t, mac, tau.coth, params)


def overlap_exponent(t, mac: Macrofraction, tau: ThermalTime, params: ModelParams):
    """``sum_k f_b`` over the macrofraction, one entry per time."""
    return _exponent_sum(t, mac, tau.tanh, params)


def _scalar_like(t, values):
    return values[0] if np.ndim(t) == 0 else values


def gamma_factor(t, delta_X, mac: Macrofraction, tau: ThermalTime, params: ModelParams):
    d = _delta(delta_X)
    value = np.exp(-0.5 * d * d * gamma_exponent(t, mac, tau, params))
    return _scalar_like(t, value)


def overlap_factor(t, delta_X, mac: Macrofraction, tau: ThermalTime, params: ModelParams):
    d = _delta(delta_X)
    value = np.exp(-0.5 * d * d * overlap_exponent(t, mac, tau, params))
    return _scalar_like(t, value)


def sample_environment(spec: EnvironmentSpec, params: ModelParams):
    """Draw a bath and split it into the unobserved part and observed macrofractions.

    Frequencies come from ``numpy.random.default_rng(spec.seed)`` in the order
    unobserved, observed 1, observed 2, ...
    """
    if spec.omega_L <= params.Omega:
        raise ConfigurationError(
            f"omega_L={spec.omega_L} must exceed Omega={params.Omega} (off-resonant bath)")
    rng = np.random.default_rng(spec.seed)
    total = spec.n_unobserved + spec.n_observed_per_mac * spec.n_macrofractions
    omega = rng.uniform(spec.omega_L, spec.omega_U, size=total)
    width = RESONANCE_GUARD * params.Omega
    bad = np.abs(omega - params.Omega) < width
    while bad.any():
        omega[bad] = rng.uniform(spec.omega_L, spec.omega_U, size=int(bad.sum()))
        bad = np.abs(omega - params.Omega) < width
    C = coupling_constant(params, spec.m)

    def block(lo, hi, label):
        n = hi - lo
        return Macrofraction(omega[lo:hi], np.full(n, spec.m), np.full(n, C), label)

    unobserved = block(0, spec.n_unobserved, "unobserved")
    observed = []
    start = spec.n_unobserved
    for i in range(spec.n_macrofractions):
        stop = start + spec.n_observed_per_mac
        observed.append(block(start, stop, f"observed_{i + 1}"))
        start = stop
    return unobserved, observed


@dataclass(frozen=True, eq=False)
class IndicatorSeries:
    times: np.ndarray
    gamma_abs: np.ndarray
    overlap: np.ndarray  # shape (K, len(times))
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self):
        return ["t", "gamma_abs"] + [f"overlap_mac_{k + 1}" for k in range(self.overlap.shape[0])]

    def to_csv(self, path=None):
        lines = [",".join(self.columns)]
        for i, t in enumerate(self.times):
            row = [t, self.gamma_abs[i], *self.overlap[:, i]]
            lines.append(",".join("%.17g" % v for v in row))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
        return text


def _check_grid(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigurationError("time grid must be a non-empty 1-d sequence")
    if not np.isfinite(times).all() or (times < 0).any():
        raise ConfigurationError("time grid must be finite and non-negative")
    if (np.diff(times) <= 0).any():
        raise ConfigurationError("time grid must be strictly increasing")
    return times


def indicator_series(times, delta_X, unobserved: Macrofraction, observed,
                     tau: ThermalTime, params: ModelParams, metadata=None) -> IndicatorSeries:
    """|Gamma| on the unobserved part and B on each observed macrofraction."""
    times = _check_grid(times)
    observed = list(observed)
    gamma = gamma_factor(times, delta_X, unobserved, tau, params)
    if observed:
        overlap = np.vstack([overlap_factor(times, delta_X, mac, tau, params) for mac in observed])
    else:
        overlap = np.empty((0, times.size))
    return IndicatorSeries(times, gamma, overlap, dict(metadata or {}))
