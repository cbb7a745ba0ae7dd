"""Inclusion relations between absolute weighted-mean summability methods."""

from .criteria import (
    ConditionReport,
    InclusionVerdict,
    bennett_factorable_bound,
    eval_condition_i,
    eval_condition_ii,
    eval_corollary,
    eval_theorem,
)
from .errors import ConfigError, ExponentError, InclusionError, LinearOverflowError, WeightError
from .normest import NormEstimate, estimate_norm, mixed_norm, norm_growth_profile
from .operator import InclusionMatrix, apply_section, build_inclusion_matrix, split_BC
from .reproduce import reproduce_example
from .transform import (
    ExponentPair,
    Series,
    TransformResult,
    invert_differences,
    summability_functionals,
    transform_differences,
    weighted_mean_transform,
)
from .weights import WeightSequence, make_weights, partial_sum, ratio_P_over_p

__version__ = "0.1.0"

__all__ = [
    "ConditionReport", "InclusionVerdict", "bennett_factorable_bound", "eval_condition_i",
    "eval_condition_ii", "eval_corollary", "eval_theorem", "ConfigError", "ExponentError",
    "InclusionError", "LinearOverflowError", "WeightError", "NormEstimate", "estimate_norm",
    "mixed_norm", "norm_growth_profile", "InclusionMatrix", "apply_section",
    "build_inclusion_matrix", "split_BC", "reproduce_example", "ExponentPair", "Series",
    "TransformResult", "invert_differences", "summability_functionals", "transform_differences",
    "weighted_mean_transform", "WeightSequence", "make_weights", "partial_sum", "ratio_P_over_p",
]
