"""Kernel regression for right-censored, strongly mixing data."""

from .harness import (
    AssumptionParams,
    ErrorReport,
    ExperimentConfig,
    check_assumptions,
    mixing_threshold,
    oracle_gap,
    rate_slope,
    run_monte_carlo,
    sup_error,
)
from .regression import (
    GSource,
    PointEstimate,
    censoring_adjusted_numerator,
    estimate_on_grid,
    nw_weights,
    regression_estimate,
)
from .sampledata import CensoredObservation, CensoredSample, EvaluationGrid, validate_sample
from .smoothing import BandwidthRule, KernelSpec, bandwidth_for, density_estimate, kernel_eval, verify_kernel_properties
from .survival import SurvivalCurve, kaplan_meier_censoring, km_censoring_survival, km_sup_distance, survival_at
from .synthetic import (
    ModelSpec,
    censoring_survival_for,
    generate_covariate_path,
    generate_dataset,
    true_censoring_survival,
    true_density,
    true_numerator,
    true_regression,
)

__version__ = "0.1.0"
