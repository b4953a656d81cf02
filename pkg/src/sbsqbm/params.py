"""Model constants, bath ensemble description and temperature regimes.

Everything here is immutable. The default unit system is natural units
(hbar = kB = 1) but both constants stay explicit so SI runs are possible.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError

#: Factor used to turn "much less / much greater than" into a testable test.
SEPARATION_FACTOR = 10.0


def _require_positive(name, value):
    if (not isinstance(value, numbers.Real) or isinstance(value, bool)
            or not math.isfinite(value) or value <= 0):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Central oscillator and unit constants.

    Attributes
    ----------
    M : float
        Mass of the central oscillator.
    Omega : float
        Renormalized central frequency (already includes the bath shift).
    gamma0_bar : float
        Coupling scale; fixes every bath coupling through
        :func:`coupling_constant`.
    hbar, kB : float
        Reduced Planck and Boltzmann constants.
    """

    M: float = 1.0
    Omega: float = 1.0
    gamma0_bar: float = 1.0
    hbar: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("M", "Omega", "gamma0_bar", "hbar", "kB"):
            _require_positive(name, getattr(self, name))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EnvironmentSpec:
    """Random bath: frequencies i.i.d. uniform on ``[omega_L, omega_U]``."""

    omega_L: float
    omega_U: float
    m: float = 1.0
    T: float = 0.0
    n_unobserved: int = 1
    n_observed_per_mac: int = 1
    n_macrofractions: int = 1
    seed: int = 0

    def __post_init__(self):
        _require_positive("omega_L", self.omega_L)
        _require_positive("omega_U", self.omega_U)
        _require_positive("m", self.m)
        if not self.omega_L < self.omega_U:
            raise ParameterError(
                f"need omega_L < omega_U, got {self.omega_L} >= {self.omega_U}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ParameterError(f"T must be finite and >= 0, got {self.T!r}")
        for name in ("n_unobserved", "n_observed_per_mac", "n_macrofractions"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ParameterError(f"{name} must be an integer >= 1, got {value!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def delta_omega(self):
        return self.omega_U - self.omega_L

    def is_fast(self, params: ModelParams, factor: float = SEPARATION_FACTOR) -> bool:
        """True when every bath frequency sits far above the central one."""
        return self.omega_L >= factor * params.Omega

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ThermalTime:
    """``tau_T = hbar / (2 kB T)`` together with the temperature it came from.

    At ``T = 0`` ``tau_T`` is ``inf`` and the coth/tanh factors collapse to 1
    exactly; the infinite value is never used in arithmetic.
    """

    T: float
    tau_T: float = field(init=False)
    hbar: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ParameterError(f"T must be finite and >= 0, got {self.T!r}")
        tau = math.inf if self.T == 0 else self.hbar / (2.0 * self.kB * self.T)
        object.__setattr__(self, "tau_T", tau)

    @classmethod
    def from_temperature(cls, T, params: ModelParams):
        return cls(T=T, hbar=params.hbar, kB=params.kB)

    @property
    def is_zero_temperature(self):
        return self.T == 0

    def coth(self, omega):
        """``coth(tau_T * omega)``, energy factor of the decoherence function."""
        omega = np.asarray(omega, dtype=float)
        if self.is_zero_temperature:
            return np.ones_like(omega)
        with np.errstate(over="ignore"):  # x -> inf is the T -> 0 limit
            return 1.0 / np.tanh(self.tau_T * omega)

    def tanh(self, omega):
        """``tanh(tau_T * omega)``, purity of the thermal bath state."""
        omega = np.asarray(omega, dtype=float)
        if self.is_zero_temperature:
            return np.ones_like(omega)
        with np.errstate(over="ignore"):
            return np.tanh(self.tau_T * omega)


class TemperatureRegime(Enum):
    LOW_T = "LowT"
    HIGH_T = "HighT"
    INTERMEDIATE = "Intermediate"


def coupling_constant(params: ModelParams, m: float) -> float:
    """Bath coupling ``C = 2 sqrt(M m gamma0_bar / pi)``.

    With this choice ``C**2 / m`` does not depend on the bath mass.
    """
    _require_positive("m", m)
    return 2.0 * math.sqrt(params.M * m * params.gamma0_bar / math.pi)


def classify_temperature(T, omega_L, omega_U, params: ModelParams,
                         factor: float = SEPARATION_FACTOR) -> TemperatureRegime:
    thermal = params.kB * T
    if thermal <= params.hbar * omega_L / factor:
        return TemperatureRegime.LOW_T
    if thermal >= factor * params.hbar * omega_U:
        return TemperatureRegime.HIGH_T
    return TemperatureRegime.INTERMEDIATE


def classify_regime(spec: EnvironmentSpec, params: ModelParams,
                    factor: float = SEPARATION_FACTOR) -> TemperatureRegime:
    """Place ``(T, omega_L, omega_U)`` in the low, high or intermediate regime."""
    return classify_temperature(spec.T, spec.omega_L, spec.omega_U, params, factor)
