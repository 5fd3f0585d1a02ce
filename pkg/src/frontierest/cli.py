"""Command line front end: simulate, estimate, experiment, diagnose.

Exit codes: 0 success, 1 runtime or statistical failure, 2 usage error.
Settings resolve as built-in defaults < ``--config`` key-value file < flags.
The default output directory is taken from ``FRONTIEREST_OUTDIR``.
"""

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .diagnostics import diagnostics_report
from .errors import EmptyCellError, FrontierestError
from .estimator import EstimateSettings, estimate_pipeline
from .experiment import ExperimentConfig, default_intensity, run_experiment
from .frontiers import parse_frontier
from .kernel import KernelSpec, build_partition
from .polar import integrate_over_E
from .simulate import sample_star_support

OUTDIR_ENV = "FRONTIEREST_OUTDIR"


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


# name -> (type, default)
OPTIONS = {
    "simulate": {
        "frontier": (str, "lobed"),
        "n": (int, 100),
        "c": (float, None),
        "d": (int, 2),
        "kind": (str, "P"),
        "seed": (int, 0),
        "out": (str, "sample"),
    },
    "estimate": {
        "sample": (str, None),
        "k_n": (int, 20),
        "m": (int, 7),
        "gamma": (float, 0.95),
        "grid": (int, 1024),
        "polar_cells": (int, None),
        "seed": (int, 0),
        "out": (str, "estimate"),
        "format": (str, "csv"),
    },
    "experiment": {
        "preset": (str, "paper-2007"),
        "frontier": (str, "lobed"),
        "n": (int, 100),
        "k_n": (int, 20),
        "m": (int, 7),
        "reps": (int, 100),
        "gamma": (float, 0.95),
        "grid": (int, 1024),
        "kind": (str, "P"),
        "c": (float, None),
        "u": (float, 1.0),
        "max_retries": (int, 10),
        "coverage_x": (_float_list, None),
        "jobs": (int, 1),
        "seed": (int, 2007),
        "out": (str, "experiment"),
        "format": (str, "csv"),
    },
    "diagnose": {
        "frontier": (str, None),
        "k_n": (int, None),
        "m": (int, None),
        "n": (int, None),
        "x": (_float_list, None),
        "per_cell": (int, 64),
        "seed": (int, 0),
        "out": (str, "diagnostics"),
    },
}

REQUIRED = {"estimate": ["sample"], "diagnose": ["frontier", "k_n", "m", "n"]}
CHOICES = {"d": [2, 3], "kind": ["P", "E"], "format": ["csv", "json"], "preset": ["paper-2007", "corollary5", "manual"]}


class UsageError(Exception):
    pass


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="frontierest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key = value settings file (flags win)")
        for key, (typ, default) in opts.items():
            flags = ["--" + key.replace("_", "-")]
            if "_" in key:
                flags.append("--" + key)
            kw = {"type": typ, "dest": key}
            if key in CHOICES:
                kw["choices"] = CHOICES[key]
            help_default = "required" if key in REQUIRED.get(name, []) else f"default {default}"
            p.add_argument(*flags, help=help_default, **kw)
    return parser


def resolve(command, ns):
    opts = OPTIONS[command]
    given = {k: v for k, v in vars(ns).items() if k in opts}
    merged = {k: default for k, (typ, default) in opts.items()}
    if getattr(ns, "config", None):
        for key, raw in read_config_file(ns.config).items():
            if key not in opts:
                raise UsageError(f"unknown config key {key!r} for {command}")
            try:
                merged[key] = opts[key][0](raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {exc}") from None
            if key in CHOICES and merged[key] not in CHOICES[key]:
                raise UsageError(f"{key} must be one of {CHOICES[key]}")
    merged.update(given)
    missing = [k for k in REQUIRED.get(command, []) if merged.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return merged


def _out_stem(value):
    path = Path(value)
    if not path.is_absolute() and os.environ.get(OUTDIR_ENV):
        path = Path(os.environ[OUTDIR_ENV]) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _print_config(command, cfg):
    print(f"# {command} config: " + json.dumps(cfg, sort_keys=True, default=str))


def cmd_simulate(cfg):
    try:
        f = parse_frontier(cfg["frontier"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg["n"] < 1:
        raise UsageError("--n must be >= 1")
    c = cfg["c"]
    if c is None:
        c = default_intensity(f) if cfg["d"] == 2 else 1.0 / integrate_over_E(f, cfg["d"])
        cfg["c"] = c
    _print_config("simulate", cfg)
    sample = sample_star_support(f, cfg["n"], c, d=cfg["d"], kind=cfg["kind"], seed=cfg["seed"])
    stem = _out_stem(cfg["out"])
    csv_path, side = io.write_sample(sample, stem.with_suffix(".csv"))
    print(f"wrote {len(sample)} points to {csv_path} and {side}")
    return 0


def cmd_estimate(cfg):
    _print_config("estimate", cfg)
    try:
        sample = io.read_sample(cfg["sample"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read sample: {exc}") from None
    settings = EstimateSettings(cfg["k_n"], cfg["m"], cfg["grid"], cfg["gamma"], cfg["polar_cells"])
    result = estimate_pipeline(sample, settings)
    stem = _out_stem(cfg["out"])
    if cfg["format"] == "json":
        path = stem.with_suffix(".json")
        path.write_text(result.to_json() + "\n")
        paths = [path]
    else:
        paths = io.write_estimate(result, stem)
    print(f"c_hat = {result.c_hat:.10g}")
    print(f"mean CI width = {2 * np.nanmean(result.ci_half_width):.10g}")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def experiment_config(cfg):
    schedule = "corollary5" if cfg["preset"] == "corollary5" else "manual"
    ec = ExperimentConfig(
        reps=cfg["reps"],
        n=cfg["n"],
        k_n=cfg["k_n"],
        order=cfg["m"],
        gamma=cfg["gamma"],
        grid_size=cfg["grid"],
        seed=cfg["seed"],
        frontier=cfg["frontier"],
        kind=cfg["kind"],
        c=cfg["c"],
        schedule=schedule,
        u=cfg["u"],
        max_retries=cfg["max_retries"],
        coverage_x=None if cfg["coverage_x"] is None else tuple(cfg["coverage_x"]),
    )
    return ec.resolved()


def cmd_experiment(cfg):
    try:
        parse_frontier(cfg["frontier"])
        ec = experiment_config(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _print_config("experiment", {**cfg, "resolved": ec.to_dict()})
    report = run_experiment(ec, jobs=cfg["jobs"])
    stem = _out_stem(cfg["out"])
    if cfg["format"] == "json":
        path = stem.with_suffix(".json")
        path.write_text(report.to_json() + "\n")
        paths = [path]
    else:
        paths = io.write_report(report, stem, parse_frontier(ec.frontier))
    print(f"xi_n min = {report.xi_min:.6f}  mean = {report.xi_mean:.6f}  max = {report.xi_max:.6f}")
    print(f"best replication {report.best}, worst replication {report.worst}, retries {int(report.retries.sum())}")
    if report.coverage is not None:
        print("coverage: " + ", ".join(f"{c:.3f}" for c in report.coverage))
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def cmd_diagnose(cfg):
    try:
        f = parse_frontier(cfg["frontier"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg["k_n"] < 1 or cfg["m"] < 0 or cfg["n"] < 2:
        raise UsageError("need k_n >= 1, m >= 0 and n >= 2")
    _print_config("diagnose", cfg)
    report = diagnostics_report(
        KernelSpec(cfg["m"]), build_partition(cfg["k_n"], 2), f, cfg["n"], x=cfg["x"], per_cell=cfg["per_cell"]
    )
    stem = _out_stem(cfg["out"])
    path = stem.with_suffix(".json")
    path.write_text(report.to_json() + "\n")
    print(report.table())
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "experiment": cmd_experiment,
    "diagnose": cmd_diagnose,
}


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"frontierest: error: {exc}", file=sys.stderr)
        return 2
    except EmptyCellError as exc:
        print(f"frontierest: {exc}", file=sys.stderr)
        return 1
    except FrontierestError as exc:
        print(f"frontierest: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
