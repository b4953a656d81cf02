"""Command line front end: ``sbsqbm {indicators,means,regime,validate}``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (ConfigurationError, NumericalInstabilityError, ParameterError,
                     QuadratureError, SBSError, TruncationError, ValidityError)
from .indicators import IndicatorSeries, indicator_series, sample_environment
from .means import (MeanKind, mean_exact, mean_long_time, mean_quadrature,
                    mean_short_time)
from .params import EnvironmentSpec, ModelParams, ThermalTime
from .regime import sbs_verdict
from .special import LONG_TIME_GUARD, SHORT_TIME_GUARD, FrequencyWindow
from .validation import CHECKS, run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

_SECTIONS = {
    "model": ("M", "Omega", "gamma0_bar", "hbar", "kB"),
    "env": ("omega_L", "omega_U", "m", "T", "n_unobserved", "n_observed_per_mac",
            "n_macrofractions", "seed"),
    "run": ("t_min", "t_max", "t_points", "t_scale", "delta_X", "epsilon_dec",
            "epsilon_ort", "fock_budget"),
}
_RUN_DEFAULTS = {"t_min": 0.0, "t_points": 101, "t_scale": "linear",
                 "epsilon_dec": 1e-3, "epsilon_ort": 1e-3, "fock_budget": 1e-8}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    model: dict = field(default_factory=dict)
    env: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    def require(self, section, key):
        data = getattr(self, section)
        if key in data:
            return data[key]
        if section == "run" and key in _RUN_DEFAULTS:
            return _RUN_DEFAULTS[key]
        raise UsageError(f"missing required config key '{section}.{key}'")

    def params(self):
        return ModelParams(**self.model)

    def spec(self):
        for key in ("omega_L", "omega_U"):
            self.require("env", key)
        return EnvironmentSpec(**self.env)

    def time_grid(self):
        t_max = float(self.require("run", "t_max"))
        t_min = float(self.require("run", "t_min"))
        n = int(self.require("run", "t_points"))
        scale = self.require("run", "t_scale")
        if n < 1:
            raise UsageError("run.t_points must be >= 1")
        if n == 1:
            return np.array([t_min])
        if scale == "linear":
            return np.linspace(t_min, t_max, n)
        if scale == "log":
            if t_min <= 0:
                raise UsageError("run.t_scale = 'log' needs run.t_min > 0")
            return np.geomspace(t_min, t_max, n)
        raise UsageError(f"run.t_scale must be 'linear' or 'log', got {scale!r}")


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path=None, overrides=()):
    data = {}
    if path:
        ext = os.path.splitext(path)[1].lower()
        try:
            if ext == ".toml":
                with open(path, "rb") as fh:
                    data = tomllib.load(fh)
            elif ext == ".json":
                with open(path) as fh:
                    data = json.load(fh)
            else:
                raise UsageError(f"config must be .toml or .json, got {path!r}")
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path!r}: {exc}") from None
    config = RunConfig()
    for section, keys in _SECTIONS.items():
        values = data.get(section, {})
        unknown = set(values) - set(keys)
        if unknown:
            raise UsageError(f"unknown keys in [{section}]: {sorted(unknown)}")
        getattr(config, section).update(values)
    extra = set(data) - set(_SECTIONS)
    if extra:
        raise UsageError(f"unknown config sections: {sorted(extra)}")
    for item in overrides:
        key, sep, value = item.partition("=")
        section, _, name = key.partition(".")
        if not sep or section not in _SECTIONS or name not in _SECTIONS[section]:
            raise UsageError(f"bad --set {item!r}; expected section.key=value")
        getattr(config, section)[name] = _parse_value(value)
    return config


def _fmt(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return "%.17g" % value


def _output_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_indicators(args, config):
    params, spec = config.params(), config.spec()
    delta_X = float(config.require("run", "delta_X"))
    times = config.time_grid()
    tau = ThermalTime.from_temperature(spec.T, params)
    unobserved, observed = sample_environment(spec, params)
    chunks = np.array_split(times, max(1, min(args.jobs, times.size)))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        parts = list(pool.map(
            lambda grid: indicator_series(grid, delta_X, unobserved, observed, tau, params),
            chunks))
    series = IndicatorSeries(times, np.concatenate([p.gamma_abs for p in parts]),
                             np.hstack([p.overlap for p in parts]),
                             {"env": spec.to_dict(), "model": params.to_dict()})
    path = _output_path(args, "indicators.csv")
    series.to_csv(path)
    print(f"wrote {path} ({times.size} rows)")
    return EXIT_OK


def _means_row(kind, t, w, tau, params):
    flags = []
    exact = quad = short = long_ = None
    if t > 0:
        exact = float(mean_exact(kind, t, w, tau, params))
        flags.append("exact")
    quad = mean_quadrature(kind, t, w, tau, params, tol=1e-10)
    if t * w.omega_U <= SHORT_TIME_GUARD:
        short = float(mean_short_time(kind, t, w, tau, params))
        flags.append("short")
    if t * (w.omega_L - w.Omega) >= LONG_TIME_GUARD:
        long_ = float(mean_long_time(kind, t, w, tau, params))
        flags.append("long")
    return t, exact, quad, short, long_, "|".join(flags)


def cmd_means(args, config):
    try:
        kind = MeanKind.parse(args.kind)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    params, spec = config.params(), config.spec()
    w = FrequencyWindow.from_spec(spec, params)
    tau = ThermalTime.from_temperature(spec.T, params)
    if kind is not MeanKind.LOW_T and spec.T <= 0:
        raise UsageError(f"{kind.value} needs env.T > 0")
    times = config.time_grid()
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = list(pool.map(lambda t: _means_row(kind, float(t), w, tau, params), times))
    gaps = [abs(r[1] - r[2]) / abs(r[2]) for r in rows if r[1] is not None and r[2] != 0]
    lines = ["t,mean_exact,mean_quadrature,mean_short,mean_long,regime_flags"]
    for row in rows:
        lines.append(",".join([*(_fmt(v) for v in row[:5]), row[5]]))
    lines.append(f"# max_relative_gap_exact_vs_quadrature={_fmt(max(gaps) if gaps else None)}")
    path = _output_path(args, f"means_{kind.value}.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_regime(args, config):
    params, spec = config.params(), config.spec()
    delta_X = float(config.require("run", "delta_X"))
    report = sbs_verdict(spec, params, delta_X,
                         float(config.require("run", "epsilon_dec")),
                         float(config.require("run", "epsilon_ort")))
    path = _output_path(args, "regime_report.json")
    with open(path, "w", newline="\n") as fh:
        fh.write(report.to_json() + "\n")
    print(report.render())
    print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args, config):
    names = []
    for item in args.only or ():
        names.extend(n for n in item.split(",") if n)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {sorted(CHECKS)}")
    budget = config.run.get("fock_budget")
    results = run_validation(names or None, args.tolerance,
                             fock_budget=None if budget is None else float(budget))
    for result in results:
        print(result.line())
        if not result.informational and not result.passed:
            print("    " + json.dumps(result.detail, default=float))
    if args.out:
        path = _output_path(args, "validation_report.json")
        with open(path, "w", newline="\n") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2, default=float)
            fh.write("\n")
    failed = [r for r in results if not r.informational and not r.passed]
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sbsqbm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML or JSON run configuration")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="override a config key")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")

    common(sub.add_parser("indicators", help="|Gamma| and B on a time grid"))
    p = sub.add_parser("means", help="ensemble means on a time grid")
    common(p)
    p.add_argument("--kind", default="LowT_f0", help="LowT_f0, HighT_Gamma or HighT_B")
    common(sub.add_parser("regime", help="timescales, bounds and SBS verdict"))
    p = sub.add_parser("validate", help="run the oracle cross-checks")
    common(p)
    p.set_defaults(out=None)
    p.add_argument("--only", action="append", help="comma separated check names")
    p.add_argument("--tolerance", type=float, help="override every numeric tolerance")
    return parser


_COMMANDS = {"indicators": cmd_indicators, "means": cmd_means,
             "regime": cmd_regime, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(args.config, args.overrides)
        return _COMMANDS[args.command](args, config)
    except (QuadratureError, TruncationError, NumericalInstabilityError,
            ValidityError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ParameterError, ConfigurationError, ValueError, TypeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SBSError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

if __name__ == "__main__":
    sys.exit(main())
