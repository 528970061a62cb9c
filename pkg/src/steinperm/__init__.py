"""Permutation statistics from antisymmetric matrices, their
exchangeable pair under the move-random-to-end chain, exact
distributions, and normal-approximation bounds."""

from .analysis import RateRow, kolmogorov_distance, normal_cdf, rate_table, rate_table_csv
from .chain import (
    PairSample,
    cond_exp_sq,
    conditional_drift,
    move_to_end,
    sample_pair,
    unit_step_check,
    x_delta,
)
from .exact_dist import (
    IntegerDistribution,
    StandardizedDistribution,
    eulerian_distribution,
    exact_moments,
    generic_distribution,
    mahonian_distribution,
    standardize,
)
from .exchangeability import (
    CosetContext,
    PairDistribution,
    SetBijection,
    builtin_phi,
    check_conditions,
    coset_of,
    is_exchangeable,
    joint_distribution,
    lambda_map,
    phi,
    subset_sums,
    theta,
)
from .perm_core import (
    AntisymmetricMatrix,
    EnumerationLimitError,
    MatrixFormatError,
    Permutation,
    StatisticKind,
    StatisticSpec,
    VarianceBreakdown,
    brute_force_moments,
    custom_spec,
    descent_count,
    descents_matrix,
    descents_spec,
    identity,
    inverse,
    inversion_count,
    inversions_matrix,
    inversions_spec,
    load_matrix_file,
    matrix_from_json_dict,
    matrix_to_json_dict,
    random_antisymmetric_matrix,
    spec_for,
    variance_formula,
    x_stat,
    zero_matrix,
)
from .stein_bounds import (
    BoundIngredients,
    BoundReport,
    ScalingRow,
    a_max,
    bound_report,
    ingredients_exact,
    ingredients_mc,
    rr_bound,
    scaling_table,
    stein_original_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AntisymmetricMatrix",
    "BoundIngredients",
    "BoundReport",
    "CosetContext",
    "EnumerationLimitError",
    "IntegerDistribution",
    "MatrixFormatError",
    "PairDistribution",
    "PairSample",
    "Permutation",
    "RateRow",
    "ScalingRow",
    "SetBijection",
    "StandardizedDistribution",
    "StatisticKind",
    "StatisticSpec",
    "VarianceBreakdown",
    "a_max",
    "bound_report",
    "brute_force_moments",
    "builtin_phi",
    "check_conditions",
    "cond_exp_sq",
    "conditional_drift",
    "coset_of",
    "custom_spec",
    "descent_count",
    "descents_matrix",
    "descents_spec",
    "eulerian_distribution",
    "exact_moments",
    "generic_distribution",
    "identity",
    "ingredients_exact",
    "ingredients_mc",
    "inverse",
    "inversion_count",
    "inversions_matrix",
    "inversions_spec",
    "is_exchangeable",
    "joint_distribution",
    "kolmogorov_distance",
    "lambda_map",
    "load_matrix_file",
    "mahonian_distribution",
    "matrix_from_json_dict",
    "matrix_to_json_dict",
    "move_to_end",
    "normal_cdf",
    "phi",
    "random_antisymmetric_matrix",
    "rate_table",
    "rate_table_csv",
    "rr_bound",
    "sample_pair",
    "scaling_table",
    "spec_for",
    "standardize",
    "stein_original_bound",
    "subset_sums",
    "theta",
    "unit_step_check",
    "variance_formula",
    "x_delta",
    "x_stat",
    "zero_matrix",
]
