"""Acceptance sets, closed-form evaluators and the capital-requirement engine."""

from .engine import (
    M_MAX,
    CounterexampleRecord,
    FinitenessVerdict,
    acceptable_law,
    capital,
    cash_rho,
    counterexample_space,
    eval_risk,
    finiteness_check,
    is_acceptable,
    reproduce_counterexample,
    utility_expectation,
)
from .measures import (
    distortion_rho,
    entropic_rho,
    max_correlation_rho,
    min_correlation,
    tvar_alpha,
    var_alpha,
)
from .specs import (
    COHERENT_VARIANTS,
    AcceptanceSpec,
    BetaGamma,
    CappedLog,
    CustomDistortion,
    CustomUtility,
    DensitySpec,
    Distortion,
    DistortionFunction,
    EmpiricalDensity,
    ExpectationFloor,
    Exponential,
    FlatPower,
    LogDistortion,
    MaxCorrelation,
    MaxMinVar,
    MaxVar,
    MinMaxVar,
    MinVar,
    NonHara,
    QuantilePower,
    TVaRDistortion,
    TVaRLevel,
    UtilityFamily,
    UtilityFloor,
    UtilitySpec,
    acceptance_from_dict,
    acceptance_to_dict,
)
