"""Monte Carlo replications: relative L1 error, best/worst runs, CI coverage."""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import EmptyCellError
from .estimator import EstimateSettings, default_grid, estimate_pipeline
from .frontiers import parse_frontier
from .polar import TWO_PI, integrate_over_E
from .simulate import make_rng, sample_star_support


def round_to_even(value):
    return int(2 * round(value / 2.0))


def rate_schedule(n, u=1.0):
    """Harmonic count l_n = n^(10/27) (rounded to even) and k_n = n^(14/27) (log n)^(2/7) u^2."""
    harmonics = max(0, round_to_even(n ** (10.0 / 27.0)))
    k_n = max(1, int(round(n ** (14.0 / 27.0) * math.log(n) ** (2.0 / 7.0) * u**2)))
    return harmonics, k_n


@dataclass(frozen=True)
class ExperimentConfig:
    reps: int = 100
    n: int = 100
    k_n: int = 20
    order: int = 7
    gamma: float = 0.95
    grid_size: int = 1024
    seed: int = 2007
    frontier: str = "lobed"
    kind: str = "P"
    c: float | None = None
    schedule: str = "manual"
    u: float = 1.0
    max_retries: int = 10
    coverage_x: tuple | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.schedule not in ("manual", "corollary5"):
            raise ValueError(f"unknown schedule {self.schedule!r}")

    def resolved(self):
        """Config with the schedule applied and c filled in."""
        cfg = self
        if cfg.schedule == "corollary5":
            harmonics, k_n = rate_schedule(cfg.n, cfg.u)
            cfg = replace(cfg, order=harmonics // 2, k_n=k_n)
        if cfg.c is None:
            cfg = replace(cfg, c=default_intensity(parse_frontier(cfg.frontier)))
        return cfg

    def settings(self):
        return EstimateSettings(self.k_n, self.order, self.grid_size, self.gamma)

    def to_dict(self):
        out = asdict(self)
        if out["coverage_x"] is not None:
            out["coverage_x"] = list(out["coverage_x"])
        return out


def default_intensity(f):
    """c = 1 / int_0^{2 pi} f(x) dx."""
    return 1.0 / integrate_over_E(f, 2, epsrel=1e-10)


def l1_relative_error(f_hat_values, f, grid):
    """int |f_hat - f| / int f by the periodic trapezoid rule on a uniform grid."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if len(grid) < 2:
        raise ValueError("need at least two grid points")
    step = TWO_PI / len(grid)
    if not np.allclose(np.diff(grid), step, rtol=1e-9, atol=1e-12):
        raise ValueError("grid must be uniform over [0, 2 pi)")
    fx = f(grid)
    return float(np.sum(np.abs(np.asarray(f_hat_values) - fx)) / np.sum(fx))


@dataclass(frozen=True, eq=False)
class Replicate:
    index: int
    attempt: int
    xi: float
    sample: object
    estimate: object


def replicate(config, r, grid=None):
    """Run replication ``r`` of a resolved config, re-drawing on empty cells."""
    f = parse_frontier(config.frontier)
    grid = default_grid(2, config.grid_size) if grid is None else np.asarray(grid, dtype=float)
    last = None
    for attempt in range(config.max_retries + 1):
        sample = sample_star_support(
            f, config.n, config.c, d=2, kind=config.kind, rng=make_rng(config.seed, r, attempt)
        )
        sample = replace(sample, seed=config.seed, meta={"rep": r, "attempt": attempt})
        try:
            est = estimate_pipeline(sample, config.settings(), grid=grid)
        except EmptyCellError as exc:
            last = exc
            continue
        ng = config.grid_size
        xi = l1_relative_error(est.f_hat[:ng], f, grid[:ng]) if ng >= 2 else float("nan")
        return Replicate(r, attempt, xi, sample, est)
    raise last


def _summary(config, r):
    grid = default_grid(2, config.grid_size)
    if config.coverage_x:
        grid = np.r_[grid, np.asarray(config.coverage_x, dtype=float)]
    rep = replicate(config, r, grid)
    hits = None
    if config.coverage_x:
        f = parse_frontier(config.frontier)
        ng = config.grid_size
        xq = grid[ng:]
        fx = f(xq)
        hits = ((rep.estimate.ci_lower[ng:] <= fx) & (fx <= rep.estimate.ci_upper[ng:])).tolist()
    return rep.xi, rep.attempt, hits


def _map(func, config, indices, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, [config] * len(indices), indices))
    return [func(config, r) for r in indices]


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: dict
    xi: np.ndarray
    retries: np.ndarray
    best: int
    worst: int
    coverage: np.ndarray | None = None
    coverage_se: np.ndarray | None = None
    exports: dict = field(default_factory=dict)

    @property
    def xi_min(self):
        return float(self.xi.min())

    @property
    def xi_mean(self):
        return float(self.xi.mean())

    @property
    def xi_max(self):
        return float(self.xi.max())

    @property
    def retried(self):
        """(replication, attempt) pairs whose draw had an empty cell."""
        return [(int(r), a) for r in np.flatnonzero(self.retries) for a in range(int(self.retries[r]))]

    def to_dict(self):
        out = {
            "config": self.config,
            "xi": self.xi.tolist(),
            "retries": self.retries.tolist(),
            "retried": self.retried,
            "xi_min": self.xi_min,
            "xi_mean": self.xi_mean,
            "xi_max": self.xi_max,
            "best": self.best,
            "worst": self.worst,
        }
        if self.coverage is not None:
            out["coverage"] = self.coverage.tolist()
            out["coverage_se"] = self.coverage_se.tolist()
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def summary_rows(self):
        return [(r, float(x), int(t)) for r, (x, t) in enumerate(zip(self.xi, self.retries))]


def run_experiment(config, jobs=1, exports=True):
    """Replicate simulate -> estimate -> xi_n and aggregate.

    Best and worst replications (lowest index on ties) are re-run to attach
    their sample and estimate under ``exports``.
    """
    cfg = config.resolved()
    rows = _map(_summary, cfg, list(range(cfg.reps)), jobs)
    xi = np.array([r[0] for r in rows])
    retries = np.array([r[1] for r in rows], dtype=np.int64)
    best, worst = int(np.argmin(xi)), int(np.argmax(xi))
    cov = se = None
    if cfg.coverage_x:
        hits = np.array([r[2] for r in rows], dtype=float)
        cov = hits.mean(axis=0)
        se = np.sqrt(cov * (1 - cov) / cfg.reps)
    ex = {}
    if exports:
        grid = default_grid(2, cfg.grid_size)
        ex = {"best": replicate(cfg, best, grid), "worst": replicate(cfg, worst, grid)}
    return ExperimentReport(cfg.to_dict(), xi, retries, best, worst, cov, se, ex)


@dataclass(frozen=True, eq=False)
class CoverageResult:
    x: np.ndarray
    coverage: np.ndarray
    se: np.ndarray
    reps: int
    retries: int

    def to_dict(self):
        return {
            "x": self.x.tolist(),
            "coverage": self.coverage.tolist(),
            "se": self.se.tolist(),
            "reps": self.reps,
            "retries": self.retries,
        }


def _coverage_one(config, r):
    f = parse_frontier(config.frontier)
    xq = np.asarray(config.coverage_x, dtype=float)
    rep = replicate(replace(config, grid_size=0), r, xq)
    fx = f(xq)
    hit = (rep.estimate.ci_lower <= fx) & (fx <= rep.estimate.ci_upper)
    return hit.tolist(), rep.attempt


def coverage_study(config, x_points, jobs=1):
    """Fraction of replications whose interval at each x contains f(x)."""
    x_points = np.asarray(x_points, dtype=float).reshape(-1)
    if np.any((x_points < 0) | (x_points >= TWO_PI)):
        raise ValueError("query angles must lie in [0, 2 pi)")
    cfg = replace(config.resolved(), coverage_x=tuple(x_points.tolist()))
    rows = _map(_coverage_one, cfg, list(range(cfg.reps)), jobs)
    hits = np.array([r[0] for r in rows], dtype=float)
    cov = hits.mean(axis=0)
    return CoverageResult(x_points, cov, np.sqrt(cov * (1 - cov) / cfg.reps), cfg.reps, int(sum(r[1] for r in rows)))


def convergence_table(config, ns, jobs=1):
    """Rows (n, k_n, harmonics, v_n, mean xi) along a sequence of n."""
    rows = []
    for n in ns:
        cfg = replace(config, n=int(n)).resolved()
        rep = run_experiment(cfg, jobs=jobs, exports=False)
        ell = 2 * cfg.order
        v_n = cfg.n / math.sqrt(ell * cfg.k_n) if ell else float("nan")
        rows.append({"n": cfg.n, "k_n": cfg.k_n, "harmonics": ell, "v_n": v_n, "xi_mean": rep.xi_mean})
    return rows
