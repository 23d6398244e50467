"""Command-line front end: ``tworay {power,optimize,rate,outage,sweep}``.

Every option can also come from a JSON file passed with ``--config``.
Flags beat the file, and the file beats the built-in defaults. JSON output
carries the resolved options under ``"config"``, so it can be fed straight
back in.
"""

import argparse
import json
import logging
import math
import sys
import warnings

import numpy as np

from .envelope import null_spacing, peak_spacing, sum_power, sum_power_lower_bound
from .errors import DomainError, ResolutionError, TraceFileError
from .geometry import LinkGeometry
from .metrics import NoiseModel, rate_single, rate_two, rate_two_lower_bound, zero_outage_capacity
from .optimizer import optimal_spacing
from .outage import (
    MobilityParams,
    MobilitySampler,
    TraceSampler,
    UniformSampler,
    eps_outage_capacity,
    outage_curve,
    sample_distances,
)
from .single_freq import DistanceInterval, RadioConfig, receive_power_single, worst_case_power_single
from .units import parse_si, to_db

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
MIN_SAMPLES = 1000


def _delta_f(text):
    return "auto" if str(text).strip().lower() == "auto" else parse_si(text)


def _int(text):
    return int(parse_si(text))


def _bool(value):
    if isinstance(value, bool):
        return value
    return str(value).lower() in ("1", "true", "yes", "on")


# name -> (converter, default, help); shared by every subcommand
SCENARIO = {
    "f1": (parse_si, 2.4e9, "base carrier frequency in Hz"),
    "delta_f": (_delta_f, "auto", "carrier spacing in Hz, or 'auto' to optimize it"),
    "htx": (parse_si, 10.0, "transmitter height in m"),
    "hrx": (parse_si, 1.5, "receiver height in m"),
    "dmin": (parse_si, 10.0, "smallest link distance in m"),
    "dmax": (parse_si, 100.0, "largest link distance in m"),
    "pt": (parse_si, 1e-3, "total transmit power in W"),
    "rho": (parse_si, 1.0, "reflection gain for the single carrier"),
    "theta": (parse_si, 0.5, "share of power on the first carrier"),
    "bandwidth": (parse_si, 100e3, "total bandwidth in Hz"),
    "noise_figure": (float, 3.0, "receiver noise figure in dB"),
    "noise_density": (float, -174.0, "noise density in dBm/Hz"),
    "seed": (_int, 0, "random seed"),
    "samples": (_int, 1_000_000, "Monte-Carlo sample count"),
}

COMMAND_OPTIONS = {
    "power": {
        "sweep": (str, "d", "sweep axis: d or delta_f"),
        "start": (parse_si, None, "first sweep value (default: dmin, or 1 MHz)"),
        "stop": (parse_si, None, "last sweep value (default: dmax, or 1 GHz)"),
        "points": (_int, 200, "number of sweep points"),
        "d": (parse_si, 50.0, "fixed distance in m for a delta_f sweep"),
        "log": (_bool, False, "log-spaced sweep"),
    },
    "optimize": {
        "exact_landmarks": (_bool, False, "refine peak/null spacings numerically"),
    },
    "rate": {
        "points": (_int, 200, "number of log-spaced distances"),
        "d": (parse_si, None, "single distance in m instead of a grid"),
    },
    "outage": {
        "sampler": (str, "uniform", "uniform, mobility or trace"),
        "trace": (str, None, "distance trace file for --sampler trace"),
        "epsilon": (parse_si, 1e-5, "target outage for the epsilon-outage capacity"),
        "points": (_int, 100, "number of log-spaced rate thresholds"),
        "start": (parse_si, None, "lowest threshold in bit/s"),
        "stop": (parse_si, None, "highest threshold in bit/s"),
        "workers": (_int, 1, "sampling threads"),
        "offset": (parse_si, 180.0, "mobility: transmitter to region centre in m"),
        "radius": (parse_si, 150.0, "mobility: region radius in m"),
        "steps": (_int, 2000, "mobility: positions per trajectory"),
        "dt": (parse_si, 0.1, "mobility: integration step in s"),
    },
    "sweep": {
        "param": (str, "dmax", "scenario parameter to vary"),
        "start": (parse_si, None, "first value"),
        "stop": (parse_si, None, "last value"),
        "points": (_int, 10, "number of values"),
        "log": (_bool, False, "log-spaced values"),
    },
}


class UsageError(Exception):
    pass


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(prog="tworay", description="Two-ray link planning with two carriers.")
    common = argparse.ArgumentParser(add_help=False)
    for name, (_, default, help_text) in SCENARIO.items():
        common.add_argument(_flag(name), dest=name, default=None, help=f"{help_text} (default {default})")
    common.add_argument("--output", choices=("csv", "json"), default="csv")
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    blurbs = {
        "power": "receive power table over distance or spacing",
        "optimize": "worst-case optimal carrier spacing",
        "rate": "achievable rates over distance",
        "outage": "Monte-Carlo outage probability curves",
        "sweep": "optimizer and zero-outage capacities across one parameter",
    }
    for command, options in COMMAND_OPTIONS.items():
        p = sub.add_parser(command, parents=[common], help=blurbs[command])
        for name, (conv, default, help_text) in options.items():
            if conv is _bool:
                p.add_argument(_flag(name), dest=name, action="store_const", const=True, default=None, help=help_text)
            else:
                p.add_argument(_flag(name), dest=name, default=None, help=f"{help_text} (default {default})")
    return parser


def resolve_options(args):
    """Merge defaults, the config file and explicit flags, in that order."""
    table = {**SCENARIO, **COMMAND_OPTIONS[args.command]}
    merged = {name: entry[1] for name, entry in table.items()}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}") from None
        if isinstance(loaded, dict) and isinstance(loaded.get("config"), dict):
            loaded = loaded["config"]
        for key, value in loaded.items():
            if key not in table:
                raise UsageError(f"config: unknown option {key!r} for {args.command}")
            merged[key] = value
    for name in table:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    out = {}
    for name, value in merged.items():
        if value is None:
            out[name] = None
            continue
        try:
            out[name] = table[name][0](value)
        except (TypeError, ValueError):
            raise UsageError(f"{_flag(name)}: cannot parse {value!r}") from None
    return out


def _scenario(opts):
    try:
        geom = LinkGeometry(opts["htx"], opts["hrx"])
    except DomainError as exc:
        raise UsageError(f"--htx/--hrx: {exc}") from None
    try:
        interval = DistanceInterval(opts["dmin"], opts["dmax"])
    except DomainError as exc:
        raise UsageError(f"--dmin/--dmax: {exc}") from None
    try:
        cfg = RadioConfig(opts["f1"], 0.0, opts["theta"], opts["pt"], opts["rho"])
        noise = NoiseModel(opts["bandwidth"], opts["noise_figure"], opts["noise_density"])
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return geom, interval, cfg, noise


def _spacing(opts, geom, interval, cfg):
    """Spacing in rad/s plus the optimizer result when it was run."""
    if opts["delta_f"] != "auto":
        if opts["delta_f"] < 0:
            raise UsageError("--delta-f: must be >= 0")
        return 2.0 * math.pi * opts["delta_f"], None
    # the optimum does not depend on the absolute power level
    unit = RadioConfig(cfg.f1, 0.0, cfg.theta, 1.0, cfg.rho)
    sol = optimal_spacing(interval, geom, unit, exact_landmarks=opts.get("exact_landmarks", False))
    return sol.delta_omega_star, sol


def _db(power, p_t):
    with np.errstate(divide="ignore"):
        return to_db(np.asarray(power, dtype=float) / p_t) if p_t > 0 else np.full(np.shape(power), -np.inf)


def _dbm(power):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(power, dtype=float)) + 30.0


def _grid(start, stop, points, log):
    if points < 0:
        raise UsageError("--points: must be >= 0")
    if points == 0:
        return np.empty(0)
    if log:
        if start <= 0 or stop <= 0:
            raise UsageError("--start/--stop: log sweep needs positive bounds")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def cmd_power(opts):
    geom, interval, cfg, _ = _scenario(opts)
    axis = opts["sweep"]
    if axis == "d":
        dw, _ = _spacing(opts, geom, interval, cfg)
        xs = _grid(opts["start"] or interval.d_min, opts["stop"] or interval.d_max, opts["points"], opts["log"])
        if np.any(xs <= 0):
            raise UsageError("--start: distances must be > 0")
        single = receive_power_single(xs, cfg.omega1, geom, cfg) if xs.size else xs
        total = sum_power(xs, dw, geom, cfg) if xs.size else xs
        bound = sum_power_lower_bound(xs, dw, geom, cfg) if xs.size else xs
        first = "distance_m"
    elif axis == "delta_f":
        d = opts["d"]
        if not d > 0:
            raise UsageError("--d: must be > 0")
        xs = _grid(opts["start"] if opts["start"] is not None else 1e6, opts["stop"] or 1e9, opts["points"], opts["log"])
        if np.any(xs < 0):
            raise UsageError("--start: spacings must be >= 0")
        dws = 2.0 * math.pi * xs
        single = np.full(xs.shape, receive_power_single(d, cfg.omega1, geom, cfg))
        total = sum_power(d, dws, geom, cfg) if xs.size else xs
        bound = sum_power_lower_bound(d, dws, geom, cfg) if xs.size else xs
        first = "delta_f_hz"
    else:
        raise UsageError(f"--sweep: expected 'd' or 'delta_f', got {axis!r}")
    columns = {
        first: xs,
        "p_single_db": _db(single, cfg.p_t),
        "p_sum_db": _db(total, cfg.p_t),
        "p_bound_db": _db(bound, cfg.p_t),
        "p_single_dbm": _dbm(single),
        "p_sum_dbm": _dbm(total),
        "p_bound_dbm": _dbm(bound),
    }
    summary = {}
    if axis == "delta_f":
        summary = {
            "peak_spacing_hz": peak_spacing(opts["d"], 0, geom) / (2 * math.pi),
            "null_spacing_hz": null_spacing(opts["d"], 1, geom) / (2 * math.pi),
        }
    return columns, summary


def cmd_optimize(opts):
    geom, interval, cfg, _ = _scenario(opts)
    opts = {**opts, "delta_f": "auto"}
    _, sol = _spacing(opts, geom, interval, cfg)
    single = worst_case_power_single(interval, cfg.omega1, geom, RadioConfig(cfg.f1, rho=cfg.rho))
    result = sol.as_dict()
    result["worst_case_db"] = float(to_db(sol.worst_case_power))
    result["single_worst_case_db"] = float(to_db(single.power))
    result["gain_db"] = result["worst_case_db"] - result["single_worst_case_db"]
    for key in ("peak_at_d_min", "peak_at_d_max", "null_at_d_min", "null_at_d_max"):
        result[key.replace("_at_", "_hz_at_")] = result[key] / (2 * math.pi)
    return None, result


def cmd_rate(opts):
    geom, interval, cfg, noise = _scenario(opts)
    dw, _ = _spacing(opts, geom, interval, cfg)
    if opts["d"] is not None:
        if not opts["d"] > 0:
            raise UsageError("--d: must be > 0")
        ds = np.array([opts["d"]])
    else:
        ds = _grid(interval.d_min, interval.d_max, opts["points"], True)
    if ds.size == 0:
        r1 = r2 = r2l = ds
    else:
        r1 = np.atleast_1d(rate_single(ds, geom, cfg, noise).rate)
        r2 = np.atleast_1d(rate_two(ds, dw, geom, cfg, noise).rate)
        r2l = np.atleast_1d(rate_two_lower_bound(ds, dw, interval, geom, cfg, noise).rate)
    columns = {"d_m": ds, "r1_bps": r1, "r2_bps": r2, "r2_lower_bps": r2l}
    summary = {"delta_f_hz": dw / (2 * math.pi)}
    return columns, summary


def _sampler(opts, interval):
    kind = opts["sampler"]
    if kind == "uniform":
        return UniformSampler(interval, opts["seed"])
    if kind == "mobility":
        try:
            params = MobilityParams(
                dt=opts["dt"], n_steps=opts["steps"], origin_offset=opts["offset"], region_radius=opts["radius"]
            )
        except DomainError as exc:
            raise UsageError(f"mobility: {exc}") from None
        return MobilitySampler(params, opts["seed"])
    if kind == "trace":
        if not opts["trace"]:
            raise UsageError("--trace: required with --sampler trace")
        try:
            return TraceSampler(opts["trace"])
        except TraceFileError as exc:
            raise UsageError(f"--trace: {exc}") from None
    raise UsageError(f"--sampler: expected uniform, mobility or trace, got {kind!r}")


def cmd_outage(opts):
    geom, interval, cfg, noise = _scenario(opts)
    n = opts["samples"]
    if n < MIN_SAMPLES:
        raise UsageError(f"--samples: need at least {MIN_SAMPLES}, got {n}")
    if opts["workers"] < 1:
        raise UsageError("--workers: must be >= 1")
    dw, _ = _spacing(opts, geom, interval, cfg)
    sampler = _sampler(opts, interval)
    lo, hi = sampler.bounds
    if lo < interval.d_min or hi > interval.d_max:
        logging.getLogger(__name__).warning(
            "sampler support [%g, %g] m exceeds --dmin/--dmax [%g, %g] m", lo, hi, interval.d_min, interval.d_max
        )
    distances = sample_distances(sampler, n, opts["workers"])

    rate_fns = {
        "single": lambda d: rate_single(d, geom, cfg, noise).rate,
        "two_exact": lambda d: rate_two(d, dw, geom, cfg, noise).rate,
        "two_bound": lambda d: rate_two_lower_bound(d, dw, interval, geom, cfg, noise).rate,
    }
    zoc = {
        "single": zero_outage_capacity(interval, None, geom, cfg, noise),
        "two_exact": zero_outage_capacity(interval, dw, geom, cfg, noise, mode="exact"),
        "two_bound": zero_outage_capacity(interval, dw, geom, cfg, noise, mode="bound"),
    }
    eps = opts["epsilon"]
    try:
        caps = {k: eps_outage_capacity(sampler, f, eps, n, distances=distances) for k, f in rate_fns.items()}
    except (ResolutionError, DomainError) as exc:
        raise UsageError(f"--epsilon: {exc}") from None

    start = opts["start"] or 10 ** math.floor(math.log10(max(min(zoc.values()), 1.0)) - 1)
    stop = opts["stop"] or 10 ** math.ceil(math.log10(max(max(zoc.values()), 1.0)) + 1)
    thresholds = _grid(start, stop, opts["points"], True)
    columns = {"threshold_bps": thresholds}
    for key, fn in rate_fns.items():
        curve = outage_curve(sampler, fn, thresholds, n, distances=distances)
        columns[f"eps_{key}"] = np.array([e.probability for e in curve])

    summary = {"delta_f_hz": dw / (2 * math.pi), "samples": n, "epsilon": eps}
    for key in rate_fns:
        summary[f"zoc_{key}_bps"] = zoc[key]
    for key in rate_fns:
        summary[f"eps_capacity_{key}_bps"] = caps[key]
    summary["zoc_gain_bound"] = zoc["two_bound"] / zoc["single"] if zoc["single"] > 0 else math.inf
    summary["eps_capacity_gain_bound"] = caps["two_bound"] / caps["single"] if caps["single"] > 0 else math.inf
    return columns, summary


def cmd_sweep(opts):
    param = opts["param"]
    if param not in SCENARIO or param in ("delta_f", "seed", "samples"):
        raise UsageError(f"--param: cannot sweep {param!r}")
    if opts["start"] is None or opts["stop"] is None:
        raise UsageError("--start/--stop: both required for a sweep")
    values = _grid(opts["start"], opts["stop"], opts["points"], opts["log"])
    rows = {param: values, "delta_f_star_hz": [], "worst_case_db": [], "zoc_single_bps": [], "zoc_two_bound_bps": []}
    for value in values:
        point = {**opts, param: float(value), "delta_f": "auto"}
        geom, interval, cfg, noise = _scenario(point)
        dw, sol = _spacing(point, geom, interval, cfg)
        rows["delta_f_star_hz"].append(sol.delta_f_star)
        rows["worst_case_db"].append(float(to_db(sol.worst_case_power)))
        rows["zoc_single_bps"].append(zero_outage_capacity(interval, None, geom, cfg, noise))
        rows["zoc_two_bound_bps"].append(zero_outage_capacity(interval, dw, geom, cfg, noise))
    return {k: np.asarray(v, dtype=float) for k, v in rows.items()}, {}


COMMANDS = {
    "power": cmd_power,
    "optimize": cmd_optimize,
    "rate": cmd_rate,
    "outage": cmd_outage,
    "sweep": cmd_sweep,
}


def _fmt(value):
    return format(float(value), ".12g")


def _text(value):
    return _fmt(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else str(value)


def write_csv(columns, summary, out):
    if columns is None:
        out.write("field,value\n")
        for key, value in summary.items():
            out.write(f"{key},{_text(value)}\n")
        return
    for key, value in summary.items():
        out.write(f"# {key}: {_text(value)}\n")
    out.write(",".join(columns) + "\n")
    for row in zip(*columns.values()):
        out.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_json(command, opts, columns, summary, out):
    doc = {"command": command, "config": opts}
    if columns is not None:
        doc["columns"] = {k: _jsonable(v) for k, v in columns.items()}
    doc["result" if columns is None else "summary"] = {k: _jsonable(v) for k, v in summary.items()}
    json.dump(doc, out, indent=2)
    out.write("\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        opts = resolve_options(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            columns, summary = COMMANDS[args.command](opts)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"tworay {args.command}: error: {exc}\n")
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"tworay {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output == "json":
        write_json(args.command, opts, columns, summary, sys.stdout)
    else:
        write_csv(columns, summary, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
