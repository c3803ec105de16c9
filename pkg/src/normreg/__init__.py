"""Normalization-aware elastic-net regression for mixed binary/continuous data.

The package couples a coordinate-descent elastic-net solver with pluggable
feature normalization, closed-form finite-sample results for penalized
estimators on binary features, and a deterministic simulation catalogue.
"""

from .dataset import BINARY, CONTINUOUS, Dataset, infer_kinds
from .errors import (
    DimensionMismatchError,
    DomainError,
    KindMismatchError,
    NormRegError,
    ParseError,
    UnsupportedLimitError,
    ZeroScaleError,
)
from .evaluate import CVBest, CVPlan, CVResult, CVRow, cross_validate, fdr, fold_assignments, nmse, power_all
from .io import (
    CSV,
    JSON,
    ResultTable,
    TableSchema,
    atomic_write_text,
    manifest_path,
    read_delimited,
    read_sparse_labeled,
    write_delimited,
    write_results,
    write_sparse_labeled,
)
from .normalize import (
    CENTER_BOTH,
    LASSO_COMPARABLE,
    PLAIN,
    RAW_PRODUCT,
    RIDGE_COMPARABLE,
    BinaryDelta,
    L1Centered,
    MaxAbs,
    MinMax,
    NoNorm,
    NormalizationPlan,
    PerFeature,
    Robust,
    Standardize,
    apply,
    backtransform,
    class_balance,
    compute_plan,
    make_interaction,
)
from .oracle import (
    BinaryFeatureModel,
    ComparabilityAnchor,
    Delta,
    GumbelApprox,
    LimitSummary,
    Moments,
    Omega,
    VarianceLimit,
    asymptotic_limits,
    bernoulli_cont_corr,
    bernoulli_corr_bounds,
    dichotomized_corr,
    estimator_bias,
    estimator_mean,
    estimator_mse,
    estimator_variance,
    maxabs_gumbel,
    moments,
    noiseless_estimate,
    selection_probability,
    soft_threshold,
    st_mean,
    st_variance,
)
from .rng import RandomStream
from .simulate import (
    SCENARIOS,
    ScenarioResult,
    ScenarioSpec,
    correlated_binary_pair,
    gen_binary,
    gen_quasinormal,
    inject_correlation,
    parse_scenario_config,
    run_scenario,
    scenario_defaults,
    sigma_for_snr,
    signal_balances,
)
from .solver import (
    FitOptions,
    FitResult,
    PenaltySpec,
    fit,
    fit_path,
    kkt_residuals,
    lambda_grid,
    lambda_max,
    orthogonal_solution,
)

__version__ = "0.1.0"

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "Dataset",
    "infer_kinds",
    "NormRegError",
    "DomainError",
    "DimensionMismatchError",
    "KindMismatchError",
    "ZeroScaleError",
    "ParseError",
    "UnsupportedLimitError",
    "PLAIN",
    "LASSO_COMPARABLE",
    "RIDGE_COMPARABLE",
    "CENTER_BOTH",
    "RAW_PRODUCT",
    "NoNorm",
    "Standardize",
    "L1Centered",
    "MaxAbs",
    "MinMax",
    "Robust",
    "BinaryDelta",
    "PerFeature",
    "NormalizationPlan",
    "class_balance",
    "compute_plan",
    "apply",
    "backtransform",
    "make_interaction",
    "PenaltySpec",
    "FitOptions",
    "FitResult",
    "fit",
    "fit_path",
    "lambda_max",
    "lambda_grid",
    "orthogonal_solution",
    "kkt_residuals",
    "Delta",
    "Omega",
    "ComparabilityAnchor",
    "BinaryFeatureModel",
    "Moments",
    "moments",
    "soft_threshold",
    "st_mean",
    "st_variance",
    "estimator_mean",
    "estimator_bias",
    "estimator_variance",
    "estimator_mse",
    "selection_probability",
    "noiseless_estimate",
    "VarianceLimit",
    "LimitSummary",
    "asymptotic_limits",
    "GumbelApprox",
    "maxabs_gumbel",
    "dichotomized_corr",
    "bernoulli_cont_corr",
    "bernoulli_corr_bounds",
    "RandomStream",
    "nmse",
    "fdr",
    "power_all",
    "CVPlan",
    "CVRow",
    "CVBest",
    "CVResult",
    "fold_assignments",
    "cross_validate",
    "SCENARIOS",
    "ScenarioSpec",
    "ScenarioResult",
    "scenario_defaults",
    "run_scenario",
    "parse_scenario_config",
    "gen_binary",
    "gen_quasinormal",
    "inject_correlation",
    "sigma_for_snr",
    "signal_balances",
    "correlated_binary_pair",
    "CSV",
    "JSON",
    "TableSchema",
    "ResultTable",
    "read_delimited",
    "read_sparse_labeled",
    "write_delimited",
    "write_sparse_labeled",
    "write_results",
    "atomic_write_text",
    "manifest_path",
    "__version__",
]
