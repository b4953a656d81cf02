"""Spectrum broadcast structures in quantum Brownian motion with a random bath."""
from .errors import (ConfigurationError, NumericalInstabilityError, ParameterError,
                     QuadratureError, RegimeMismatchError, SBSError, TruncationError,
                     UnsupportedPatternError, ValidityError)
from .indicators import (IndicatorSeries, Macrofraction, Oscillator, Separation, alpha,
                         f_b, f_gamma, gamma_factor, indicator_series, overlap_factor,
                         sample_environment)
from .means import (AsymptoteConstants, ExactIntegrand, MeanKind, asymptote_constants,
                    mean_exact, mean_long_time, mean_quadrature, mean_short_time,
                    short_time_coefficient)
from .params import (EnvironmentSpec, ModelParams, TemperatureRegime, ThermalTime,
                     classify_regime, coupling_constant)
from .regime import (MacBound, RegimeReport, Timescales, TimeWindow, gaussian_timescale,
                     macrofraction_ratio, nmac_bound, sbs_verdict, temperature_constraint)
from .special import FrequencyWindow, SignPattern, ci, f_ci, f_si, si

__version__ = "0.1.0"
