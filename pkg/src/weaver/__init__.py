"""Exact and Monte Carlo tools for the binary weaving cascade.

A depth-``n`` weave scatters mass ``p**ones(k) * (1-p)**(n-ones(k))`` onto
the lattice point ``k/(2**n - 1)``; the modules here build that law with
rational arithmetic, simulate the two-population sampling scheme that
realizes it, and expose the closed-form moment and variance structure.
"""

from weaver.analysis import (
    DecompositionRow,
    RoughnessReport,
    exact_mean,
    exact_moment,
    exact_variance,
    limit_variance,
    local_density,
    merged_variable_stats,
    pmodel_cell_masses,
    roughness_report,
    variance_decomposition,
)
from weaver.errors import (
    CapacityError,
    ContractError,
    DegeneracyError,
    RangeError,
    RefinementError,
    WeaverError,
)
from weaver.exact import (
    MATERIALIZATION_CAP,
    DyadicPoint,
    SelectionPath,
    WeaverDist,
    WeaverParams,
    as_exact_probability,
    build_pmf_vector,
    cdf_at_dyadic,
    exponent_sum,
    geometric_triangle_row,
    jump_spectrum,
    mirror_index,
    pmf_point,
    pmf_point_log2,
    realization_value,
)
from weaver.parents import (
    ParentDistribution,
    bernoulli,
    gaussian,
    is_standardized,
    point_mass,
    standardize_parents,
    uniform_interval,
)
from weaver.sampler import (
    PATH_ONLY_CAP,
    RAW_DRAW_CAP,
    MomentReport,
    SampleRun,
    convergence_ks,
    draw_selection_path,
    monte_carlo_moments,
    path_ensemble,
    run_ensemble,
    run_exponential_sample,
    run_from_path,
    simulate_mean_ensemble,
)

__version__ = "0.1.0"

__all__ = [
    "MATERIALIZATION_CAP",
    "PATH_ONLY_CAP",
    "RAW_DRAW_CAP",
    "CapacityError",
    "ContractError",
    "DecompositionRow",
    "DegeneracyError",
    "DyadicPoint",
    "MomentReport",
    "ParentDistribution",
    "RangeError",
    "RefinementError",
    "RoughnessReport",
    "SampleRun",
    "SelectionPath",
    "WeaverDist",
    "WeaverError",
    "WeaverParams",
    "as_exact_probability",
    "bernoulli",
    "build_pmf_vector",
    "cdf_at_dyadic",
    "convergence_ks",
    "draw_selection_path",
    "exact_mean",
    "exact_moment",
    "exact_variance",
    "exponent_sum",
    "gaussian",
    "geometric_triangle_row",
    "is_standardized",
    "jump_spectrum",
    "limit_variance",
    "local_density",
    "merged_variable_stats",
    "mirror_index",
    "monte_carlo_moments",
    "path_ensemble",
    "pmf_point",
    "pmf_point_log2",
    "pmodel_cell_masses",
    "point_mass",
    "realization_value",
    "roughness_report",
    "run_ensemble",
    "run_exponential_sample",
    "run_from_path",
    "simulate_mean_ensemble",
    "standardize_parents",
    "uniform_interval",
    "variance_decomposition",
]
