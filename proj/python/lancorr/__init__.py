"""Python bindings for the lancorr C++ library."""

from ._lancorr import (
    ConditionViolation,
    DegenerateDesignError,
    DegenerateVarianceError,
    DomainError,
    Error,
    ExperimentError,
    InsufficientDataError,
    IoError,
    NumericError,
    ParseError,
    ScoreFamily,
    StationarityError,
    central,
    check_regularity,
    confidence_intervals,
    derive_seed,
    extended_size,
    fit_lse,
    grad_check,
    ks_normality,
    normalize_config,
    run_experiment,
    simulate,
    theoretical_power,
)

__all__ = [name for name in dir() if not name.startswith("_")]
