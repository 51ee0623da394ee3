"""Spectral-Galerkin simulation and statistical verification toolkit for the
inviscid modified SQG family: truncated flows, Gaussian invariant-measure
sampling, and numerical verification of the conservation laws, the Liouville
property, measure invariance, the quadratic-term expectation estimates, and
the delta -> 0 breakdown.
"""

from .params import Formulation, ModelParams, STREAMLINE_VARIANTS
from .fields import (
    SpectralField,
    add,
    is_hermitian,
    project,
    project_complement,
    sobolev_norm_sq,
)
from .coefficients import alpha, alpha_pairs, coefficient_table
from .nonlinearity import (
    conserved_form_rate,
    fast_nonlinearity,
    nonlinearity,
    quadratic_term_grids,
    truncated_nonlinearity,
)
from .gibbs import (
    GibbsSpec,
    SeededStream,
    covariance,
    expected_sobolev_norm_sq,
    log_density_truncated,
    sample_field,
    sample_grid_ensemble,
)
from .snapshots import (
    read_snapshot,
    read_trajectory,
    write_snapshot,
    write_trajectory,
)
from .flow import (
    IntegratorConfig,
    NonConvergence,
    Trajectory,
    duhamel_residual,
    evolve,
    evolve_grid_ensemble,
    liouville_divergence,
    step,
)
from .expectations import (
    ScalingReport,
    SumReport,
    ThresholdScanReport,
    delta_difference_bound,
    expectation_B_analytic,
    expectation_B_monte_carlo,
    galerkin_tail,
    inner_sum,
    scaling_check,
    streamline_threshold_scan,
)
from .invariance import (
    EnsembleReport,
    ObservablePanel,
    default_panel,
    run_invariance_experiment,
    trajectory_norm_bounds,
    two_sample_test,
)

__version__ = "0.1.0"

__all__ = [
    "Formulation",
    "ModelParams",
    "STREAMLINE_VARIANTS",
    "SpectralField",
    "add",
    "is_hermitian",
    "project",
    "project_complement",
    "sobolev_norm_sq",
    "alpha",
    "alpha_pairs",
    "coefficient_table",
    "nonlinearity",
    "truncated_nonlinearity",
    "fast_nonlinearity",
    "quadratic_term_grids",
    "conserved_form_rate",
    "GibbsSpec",
    "SeededStream",
    "covariance",
    "sample_field",
    "sample_grid_ensemble",
    "log_density_truncated",
    "expected_sobolev_norm_sq",
    "write_snapshot",
    "read_snapshot",
    "write_trajectory",
    "read_trajectory",
    "IntegratorConfig",
    "Trajectory",
    "NonConvergence",
    "step",
    "evolve",
    "evolve_grid_ensemble",
    "liouville_divergence",
    "duhamel_residual",
    "SumReport",
    "ScalingReport",
    "ThresholdScanReport",
    "inner_sum",
    "expectation_B_analytic",
    "expectation_B_monte_carlo",
    "scaling_check",
    "delta_difference_bound",
    "galerkin_tail",
    "streamline_threshold_scan",
    "EnsembleReport",
    "ObservablePanel",
    "default_panel",
    "run_invariance_experiment",
    "two_sample_test",
    "trajectory_norm_bounds",
]
