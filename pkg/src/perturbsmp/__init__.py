"""Asymptotic expansions for nonlinearly perturbed semi-Markov processes."""
from .errors import *  # noqa: F401,F403
from .laurent import (
    LaurentExpansion,
    RemainderBound,
    add,
    constant,
    div,
    downgrade_delta,
    evaluate,
    from_record,
    make,
    merge,
    mul,
    normalize_bound,
    prod_many,
    reciprocal,
    scale,
    sum_many,
    to_record,
)
from .model import (
    PerturbedSMP,
    ValidationReport,
    continuous_time,
    discrete_time,
    load_model,
    model_from_record,
    model_to_record,
    row_sum,
    validate,
)
from .oracle import compare, instantiate, numeric_hitting, numeric_stationary
from .reduction import hitting_expectation, non_absorption, pair_hitting, reduce_state
from .stationary import sojourn, stationary_distribution

__version__ = "0.1.0"
