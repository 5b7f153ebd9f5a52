"""Capital requirements with general eligible assets, and the finiteness and
robustness indices of their acceptance sets."""

from .distributions import (
    FiniteDiscrete,
    LogNormal,
    Mixture,
    Normal,
    ParetoTail,
    PointMass,
    Truncated,
    contaminate,
    sample,
)
from .indices import IndexReport, conjugate, index_of_finiteness, index_of_qualitative_robustness
from .metrics import MetricResult, levy_distance, perturbation_gap, prohorov_distance
from .riskcore import *  # noqa: F401,F403
from .scenario import EmpiricalDistribution, ScenarioSpace, TradedAsset, law_of, make_empirical

__version__ = "0.1.0"
