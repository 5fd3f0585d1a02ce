"""
Replicated experiment and interval coverage
===========================================

One hundred Poisson samples of mean size about 130 below f(x) = 1 + exp(-cos 3x),
each estimated with k_n = 20 cells and a 14-harmonic kernel; then a coverage
study of the pointwise 95% interval on the unit disk.
"""

import numpy as np

from frontierest import ExperimentConfig, coverage_study, run_experiment

report = run_experiment(ExperimentConfig())
print(f"xi_n: min {report.xi_min:.2%}, mean {report.xi_mean:.2%}, max {report.xi_max:.2%}")
print(f"best replication {report.best}, worst {report.worst}; "
      f"{int(report.retries.sum())} re-draws after empty cells")

best = report.exports["best"].estimate
print("best-case f_hat at the first grid points:", np.round(best.f_hat[:4], 4))

cov = coverage_study(
    ExperimentConfig(reps=200, n=2000, k_n=50, order=10, frontier="constant:1", c=1 / np.pi), [0.0, np.pi / 2, np.pi]
)
for x, p, se in zip(cov.x, cov.coverage, cov.se):
    print(f"coverage at x = {x:.3f}: {p:.3f} +/- {se:.3f}")
