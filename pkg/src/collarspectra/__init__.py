"""Spectral computations for the singular boundary-collar model operator.

The model family is P_mu = -d^2/dx^2 + C_beta/x^2 + mu x^beta on subintervals
of (0, x_max], summed over a boundary spectrum {mu_j}. The package counts
eigenvalues on collar regions without dense diagonalization, assembles the
averaged eigenfunction density and its moments, and checks counting envelopes,
Wasserstein-type decay rates, and localisation inequalities at desk scale.
"""

from .analysis import (
    ChiSpec,
    FitResult,
    LocalisationReport,
    SweepConfig,
    ims_relative_defect,
    localisation_check,
    loglog_fit,
    rate_check,
    run_rate_sweep,
    weyl_check,
)
from .boundary import (
    BoundarySpectrum,
    flat_torus_spectrum,
    load_csv,
    synthetic_weyl_spectrum,
)
from .counting import (
    BRule,
    CountReport,
    Region,
    envelope_value,
    full_count,
    j_cutoff,
    min_potential,
    region_count,
    sharp_skip_threshold,
    verify_lower_bounds,
    verify_upper_bounds,
)
from .density import (
    MomentReport,
    RadialDensity,
    assemble_density,
    bootstrap_b,
    moment_p,
    moment_report,
    resample_density,
    tail_mass,
    tail_sequence,
    wasserstein_to_boundary,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    ConvergenceError,
    EmptySpectrumError,
    InfeasibleError,
    SpectrumIncompleteError,
)
from .params import (
    ModelParams,
    RateSpec,
    c_beta,
    eval_rate,
    theoretical_rate,
)
from .radial import (
    BoundaryCondition,
    Mesh,
    TridiagOperator,
    assemble_radial,
    dense_oracle_eigs,
    eigenvalues_below,
    eigenvector,
    mesh_nodes_for,
    rescaled_problem,
    sturm_count,
    trace_plus_weighted,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "RateSpec",
    "c_beta",
    "theoretical_rate",
    "eval_rate",
    "BoundarySpectrum",
    "synthetic_weyl_spectrum",
    "flat_torus_spectrum",
    "load_csv",
    "BoundaryCondition",
    "Mesh",
    "TridiagOperator",
    "assemble_radial",
    "sturm_count",
    "eigenvalues_below",
    "eigenvector",
    "dense_oracle_eigs",
    "rescaled_problem",
    "mesh_nodes_for",
    "trace_plus_weighted",
    "Region",
    "CountReport",
    "BRule",
    "j_cutoff",
    "min_potential",
    "sharp_skip_threshold",
    "envelope_value",
    "region_count",
    "full_count",
    "verify_upper_bounds",
    "verify_lower_bounds",
    "RadialDensity",
    "MomentReport",
    "assemble_density",
    "bootstrap_b",
    "moment_p",
    "moment_report",
    "wasserstein_to_boundary",
    "tail_mass",
    "tail_sequence",
    "resample_density",
    "SweepConfig",
    "FitResult",
    "ChiSpec",
    "LocalisationReport",
    "loglog_fit",
    "rate_check",
    "weyl_check",
    "localisation_check",
    "ims_relative_defect",
    "run_rate_sweep",
    "ConfigError",
    "InfeasibleError",
    "BudgetExceededError",
    "SpectrumIncompleteError",
    "EmptySpectrumError",
    "ConvergenceError",
]
