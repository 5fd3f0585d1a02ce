"""Finite-n values of the regularity conditions behind the limit theorems.

Each condition of the asymptotic theory asks some quantity to vanish as n
grows. At a fixed n we can only report the quantity and compare it with a
heuristic threshold; ``satisfied`` means "small enough to be plausible".
Planar (d = 2) partitions only.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError
from .estimator import c_hat_global, cell_maxima
from .kernel import kernel_eval, weight_table
from .model import ProcessModel, homogenized_frontier

# quantities that must tend to 0, and bias/spread ratios that must be o(1)
RATE_THRESHOLD = 0.2
RATIO_THRESHOLD = 0.5


@dataclass
class DiagnosticsReport:
    settings: dict
    values: dict
    per_x: dict
    conditions: list = field(default_factory=list)

    def condition(self, name):
        for c in self.conditions:
            if c["name"] == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "settings": self.settings,
            "values": self.values,
            "per_x": self.per_x,
            "conditions": self.conditions,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, default=float)

    def table(self):
        rows = [f"{'condition':<10}{'value':>14}{'threshold':>12}  ok"]
        for c in self.conditions:
            val = c["value"]
            txt = "n/a" if val is None else f"{val:14.6g}"
            thr = "-" if c["threshold"] is None else f"{c['threshold']:.3g}"
            rows.append(f"{c['name']:<10}{txt:>14}{thr:>12}  {'yes' if c['satisfied'] else 'no'}")
        return "\n".join(rows)


def _cell_grids(partition, per_cell):
    """Nested uniform grid, closed at both ends of each cell: shape (k, per_cell + 1)."""
    a = partition.azimuth_cuts[:-1, None]
    b = partition.azimuth_cuts[1:, None]
    return a + (b - a) * np.arange(per_cell + 1)[None, :] / per_cell


def _gauss_nodes(partition, per_cell):
    """Gauss-Legendre nodes and nu-weights per cell, shape (k, per_cell)."""
    u, w = np.polynomial.legendre.leggauss(per_cell)
    a = partition.azimuth_cuts[:-1, None]
    b = partition.azimuth_cuts[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (u[None, :] + 1.0)
    weights = half * w[None, :] / (2.0 * np.pi)
    return nodes, weights


def kernel_oscillation(spec, partition, x, per_cell=64):
    """Gamma_{n,r}(x): range of K(x, .) over each cell, from a grid."""
    t = _cell_grids(partition, per_cell)
    vals = kernel_eval(spec, x, t)
    return vals.max(axis=1) - vals.min(axis=1)


def _flag(name, value, threshold, note=""):
    ok = value is not None and bool(np.isfinite(value)) and value <= threshold
    return {
        "name": name,
        "value": None if value is None else float(value),
        "threshold": threshold,
        "satisfied": ok,
        "note": note,
    }


def diagnostics_report(spec, partition, f, n, model=None, x=None, per_cell=64, sample=None, c=None):
    """Evaluate the (H.*), (K.*) and, given a sample and the true c, (C.*) quantities.

    Parameters
    ----------
    spec : KernelSpec
    partition : Partition (planar)
    f : FrontierFunction
    n : int
        Intensity index.
    x : sequence of float, optional
        Query angles for the pointwise quantities (default 0, pi/2, pi).
    per_cell : int
        Grid points per cell for suprema and quadrature nodes per cell.
    """
    if partition.d != 2:
        raise InvalidDimensionError("diagnostics are implemented for planar partitions")
    model = model or ProcessModel.polar(2)
    d = model.d
    xq = np.array([0.0, np.pi / 2, np.pi] if x is None else x, dtype=float).reshape(-1)
    k = partition.k_n
    nu = partition.measures
    g = homogenized_frontier(model, f)

    grid = _cell_grids(partition, per_cell)
    g_grid = g(grid.reshape(-1)).reshape(grid.shape)
    fd_grid = f(grid.reshape(-1)).reshape(grid.shape) ** d
    delta_n = float(np.max(nu * (g_grid.max(axis=1) - g_grid.min(axis=1))))
    omega_n = float(np.max(fd_grid.max(axis=1) - fd_grid.min(axis=1)))

    nodes, wts = _gauss_nodes(partition, per_cell)
    flat = nodes.reshape(-1)
    fd_nodes = (f(flat) ** d).reshape(nodes.shape)
    g_nodes = g(flat).reshape(nodes.shape)
    cell_fd = np.sum(wts * fd_nodes, axis=1)  # int_{I_r} f^d dnu
    cell_g = np.sum(wts * g_nodes, axis=1)  # int_{I_r} g dnu

    table = weight_table(spec, partition, xq)
    w = table.weights
    per_x = {
        "x": xq.tolist(),
        "psi": [],
        "xi": [],
        "gamma_max": [],
        "k2_ratio": [],
        "l1_norm": [],
        "l2_norm": [],
        "sup_norm": [],
        "max_abs_weight": np.max(np.abs(w), axis=1).tolist(),
        "sum_abs_weight": np.sum(np.abs(w), axis=1).tolist(),
        "kappa_n": table.kappa_n.tolist(),
        "kappa_over_n": (table.kappa_n / n).tolist(),
        "smoothing_bias_ratio": [],
        "k5_ratio": [],
        "k6_ratio": [],
        "k7": [],
    }
    for i, xi in enumerate(xq):
        kv = kernel_eval(spec, xi, nodes)
        smooth_r = np.sum(wts * kv * fd_nodes, axis=1)
        psi = abs(smooth_r.sum() - f(xi) ** d)
        xi_loss = k * abs(np.sum(table.mass[i] * cell_fd - nu * smooth_r))
        l1 = float(np.sum(wts * np.abs(kv)))
        l2 = float(np.sqrt(np.sum(wts * kv**2)))
        sup = float(max(np.abs(kernel_eval(spec, xi, grid)).max(), abs(kernel_eval(spec, xi, xi))))
        gam = kernel_oscillation(spec, partition, xi, per_cell)
        abs_mass = np.sum(wts * np.abs(kv), axis=1)
        g_n = float(np.sum(table.kappa[i] * cell_g))
        per_x["psi"].append(float(psi))
        per_x["xi"].append(float(xi_loss))
        per_x["gamma_max"].append(float(gam.max()))
        per_x["k2_ratio"].append(float(np.sum(gam * abs_mass) / l2**2))
        per_x["l1_norm"].append(l1)
        per_x["l2_norm"].append(l2)
        per_x["sup_norm"].append(sup)
        per_x["smoothing_bias_ratio"].append(abs(g_n - float(g(xi))) * n / float(table.kappa_n[i]))
        per_x["k5_ratio"].append(n / np.sqrt(k) / l2 * max(psi, xi_loss))
        per_x["k6_ratio"].append(n * k**-0.75 * l2**-0.5 * l1**0.5 * omega_n)
        per_x["k7"].append(np.sqrt(k) * l2 / n)

    gram = w @ w.T
    values = {
        "delta_n": delta_n,
        "omega_n": omega_n,
        "nu_n": partition.nu_min,
        "n_nu_over_log_n": n * partition.nu_min / np.log(n),
        "weight_gram": gram.tolist(),
        "kernel_correlation": _kernel_correlation(spec, xq, nodes, wts).tolist(),
    }

    worst = lambda key: float(np.max(per_x[key]))
    conds = [
        _flag("H.1", np.log(n) / (n * partition.nu_min), RATE_THRESHOLD, "log n / (n nu_n)"),
        _flag("H.2", n * delta_n, RATIO_THRESHOLD, "n delta_n"),
        _flag("H.3", float(np.max(np.abs(np.diag(gram) - 1.0))), 1e-9, "finite-n weight Gram matrix reported"),
        _flag("H.4", worst("max_abs_weight"), RATE_THRESHOLD, "max_r |w_{n,r}(x)|"),
        _flag("H.5", worst("smoothing_bias_ratio"), RATIO_THRESHOLD, "n |g_n - g| / kappa_n"),
        _flag("H.6", float(np.max(per_x["sum_abs_weight"])) * (n * delta_n) ** 2, RATIO_THRESHOLD, "sum|w| (n delta_n)^2"),
    ]
    h7 = 0.0 if model.kind == "uniform" else worst("kappa_over_n")
    conds.append(_flag("H.7", h7, RATE_THRESHOLD, "kappa_n / n (0 for constant intensity)"))
    conds += [
        _flag("K.1", worst("l1_norm"), np.inf, "int int |K| finite"),
        _flag("K.2", worst("k2_ratio"), RATIO_THRESHOLD, "sum Gamma_r int_{I_r}|K| / ||K||_2^2"),
        _flag("K.3", float(np.max(np.abs(np.diag(values["kernel_correlation"])) - 1.0)), 1e-6, "kernel correlation reported"),
        _flag("K.4", max(s / np.sqrt(k) / l for s, l in zip(per_x["sup_norm"], per_x["l2_norm"])), RATE_THRESHOLD, "||K||_E / (k_n^(1/2) ||K||_2)"),
        _flag("K.5", worst("k5_ratio"), RATIO_THRESHOLD, "n k_n^(-1/2) max(Psi, Xi) / ||K||_2"),
        _flag("K.6", worst("k6_ratio"), RATIO_THRESHOLD, "n k_n^(-3/4) ||K||_1^(1/2) omega_n / ||K||_2^(1/2)"),
        _flag("K.7", worst("k7"), RATE_THRESHOLD, "k_n^(1/2) ||K||_2 / n"),
    ]
    if sample is not None and c is not None:
        summary = cell_maxima(sample, partition, model)
        if summary.n_empty == 0:
            ch = c_hat_global(summary, n)
            c1 = float(np.max(np.abs(w.sum(axis=1)))) * abs(1.0 / ch - 1.0 / c)
            c2 = abs(ch - c) / c
            values["c_hat"] = ch
        else:
            c1 = c2 = None
        conds.append(_flag("C.1", c1, RATE_THRESHOLD, "|sum w| |1/c_hat - 1/c|"))
        conds.append(_flag("C.2", c2, RATE_THRESHOLD, "|c_hat - c| / c"))

    settings = {
        "n": int(n),
        "k_n": int(k),
        "order": int(spec.order),
        "frontier": f.tag,
        "model": model.tag,
        "per_cell": int(per_cell),
    }
    return DiagnosticsReport(settings, values, per_x, conds)


def _kernel_correlation(spec, xq, nodes, wts):
    kv = np.stack([kernel_eval(spec, xi, nodes) for xi in xq])
    inner = np.einsum("ikl,jkl,kl->ij", kv, kv, wts)
    norms = np.sqrt(np.diag(inner))
    return inner / np.outer(norms, norms)
