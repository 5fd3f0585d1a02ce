"""CSV and JSON exchange formats.

Samples are a CSV (``x,y,u,v`` in the plane: angle, radius, Cartesian
coordinates) plus a JSON sidecar with the generation metadata. Estimates are
``x,f_hat,ci_lo,ci_hi`` CSVs and full JSON dumps.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .estimator import EstimateResult
from .simulate import PointSample

_FMT = "%.17g"


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def sample_header(d):
    if d == 2:
        return ["x", "y", "u", "v"]
    return [f"x{i}" for i in range(1, d)] + ["y"] + [f"u{i}" for i in range(1, d + 1)]


def write_sample(sample, path):
    """Write ``path`` (CSV) and its JSON sidecar; returns both paths."""
    path = Path(path)
    table = np.column_stack([sample.x, sample.y, sample.cartesian()])
    _write_csv(path, sample_header(sample.d), table)
    side = sidecar_path(path)
    side.write_text(json.dumps(sample.metadata(), indent=1, sort_keys=True) + "\n")
    return path, side


def read_sample(path):
    """Read a sample CSV and its sidecar back into a :class:`PointSample`."""
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise ValueError(f"missing metadata sidecar {side}")
    meta = json.loads(side.read_text())
    d = int(meta["d"])
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0] if rows else None
    if header != sample_header(d):
        raise ValueError(f"{path}: expected header {sample_header(d)}, got {header}")
    data = np.array(rows[1:], dtype=float).reshape(-1, len(header))
    extra = {k: v for k, v in meta.items() if k not in ("n", "c", "kind", "d", "seed", "model", "frontier", "count")}
    return PointSample(
        data[:, : d - 1],
        data[:, d - 1],
        n=int(meta["n"]),
        c=float(meta["c"]),
        kind=meta["kind"],
        d=d,
        seed=meta.get("seed"),
        model=meta.get("model", f"polar-d{d}"),
        frontier=meta.get("frontier", ""),
        meta=extra,
    )


def _write_csv(path, header, table):
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        if len(table):
            np.savetxt(fh, table, delimiter=",", fmt=_FMT)


def write_estimate(result, stem):
    """Write ``stem.csv`` (x,f_hat,ci_lo,ci_hi) and ``stem.json``; returns both paths."""
    stem = Path(stem)
    grid = result.grid.reshape(len(result.f_hat), -1)
    head = ["x"] if grid.shape[1] == 1 else [f"x{i}" for i in range(1, grid.shape[1] + 1)]
    table = np.column_stack([grid, result.f_hat, result.ci_lower, result.ci_upper])
    csv_path = stem.with_suffix(".csv")
    _write_csv(csv_path, head + ["f_hat", "ci_lo", "ci_hi"], table)
    json_path = stem.with_suffix(".json")
    json_path.write_text(result.to_json() + "\n")
    return csv_path, json_path


def read_estimate(path):
    return EstimateResult.from_dict(json.loads(Path(path).read_text()))


def write_curve(path, grid, f_values, result):
    """Best/worst export: ``x,f,f_hat,ci_lo,ci_hi``."""
    table = np.column_stack([grid, f_values, result.f_hat, result.ci_lower, result.ci_upper])
    _write_csv(path, ["x", "f", "f_hat", "ci_lo", "ci_hi"], table)
    return Path(path)


def write_report(report, stem, frontier=None):
    """Write the report JSON, the ``rep,xi_n,retries`` summary and best/worst exports."""
    stem = Path(stem)
    paths = [stem.with_suffix(".json")]
    paths[0].write_text(report.to_json() + "\n")
    summary = stem.parent / (stem.name + "_summary.csv")
    with summary.open("w", newline="") as fh:
        fh.write("rep,xi_n,retries\n")
        for r, xi, t in report.summary_rows():
            fh.write(f"{r},{xi:.17g},{t}\n")
    paths.append(summary)
    for label, rep in report.exports.items():
        grid = rep.estimate.grid.reshape(-1)
        fvals = frontier(grid) if frontier is not None else np.full(len(grid), np.nan)
        paths.append(write_curve(stem.parent / f"{stem.name}_{label}.csv", grid, fvals, rep.estimate))
        paths.extend(write_sample(rep.sample, stem.parent / f"{stem.name}_{label}_sample.csv"))
    return paths
