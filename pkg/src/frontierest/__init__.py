"""Smoothed extreme-value estimation of star-shaped and non-uniform point process frontiers."""

from .diagnostics import DiagnosticsReport, diagnostics_report
from .errors import EmptyCellError, FrontierestError
from .estimator import (
    CellSummary,
    EstimateResult,
    EstimateSettings,
    c_hat_global,
    cell_maxima,
    confidence_interval,
    estimate_pipeline,
    f_hat,
    f_hat_polar,
    g_hat,
    z_gamma,
)
from .experiment import ExperimentConfig, convergence_table, coverage_study, l1_relative_error, run_experiment
from .frontiers import FrontierFunction, constant_frontier, fourier_frontier, lobed_frontier, parse_frontier
from .kernel import KernelSpec, Partition, build_partition, kernel_cell_integral, kernel_eval, weight_table
from .model import ProcessModel, homogenized_frontier
from .polar import cartesian_to_polar, gamma_d, polar_to_cartesian
from .simulate import (
    PointSample,
    homogenize,
    make_rng,
    sample_angle,
    sample_process,
    sample_star_support,
    support_mass,
    support_volume,
)

__version__ = "0.1.0"
