"""Steady-state analysis and optimization of time-dependent shipment fees."""

from .chain import (
    AgeIncome,
    PolicyEvaluator,
    Scenario,
    StationaryDistribution,
    TruncatedKernel,
    age_incomes,
    build_kernel,
    find_bound,
    stationary,
    steady_state,
    transition,
)
from .choice import ChoiceModel, split_rates, take_rate
from .distributions import (
    CapacitySpec,
    Pmf,
    beta_shape_parameters,
    discretized_beta,
    poisson_pmf,
    surplus_pmf,
)
from .errors import (
    CapacityInfeasibleError,
    NumericsError,
    ParameterError,
    UndefinedMeasureError,
)
from .measures import (
    PerformanceReport,
    evaluate_policy,
    expected_backorders,
    mean_delay,
    rejection_probability,
    variable_profit,
)
from .optimize import (
    DominanceRecord,
    Optimum,
    SearchGrid,
    dominance_experiment,
    exhaustive_fee_vector_search,
    is_weakly_monotone,
    optimize_family,
    revenue_max_fee,
)
from .simulate import SimConfig, SimulationReport, simulate
from .policies import (
    CumulativeDemandProfile,
    FeeStructure,
    SimpleTspParams,
    build_policy,
    canonicalize,
    cutoff_form,
    demand_profile,
    is_monotone,
    profile_to_fees,
)

__all__ = [
    "AgeIncome",
    "CapacityInfeasibleError",
    "CapacitySpec",
    "ChoiceModel",
    "CumulativeDemandProfile",
    "DominanceRecord",
    "FeeStructure",
    "NumericsError",
    "Optimum",
    "ParameterError",
    "PerformanceReport",
    "Pmf",
    "PolicyEvaluator",
    "Scenario",
    "SearchGrid",
    "SimConfig",
    "SimpleTspParams",
    "SimulationReport",
    "StationaryDistribution",
    "TruncatedKernel",
    "UndefinedMeasureError",
    "age_incomes",
    "build_kernel",
    "build_policy",
    "canonicalize",
    "cutoff_form",
    "demand_profile",
    "beta_shape_parameters",
    "discretized_beta",
    "dominance_experiment",
    "evaluate_policy",
    "exhaustive_fee_vector_search",
    "expected_backorders",
    "find_bound",
    "is_monotone",
    "is_weakly_monotone",
    "mean_delay",
    "optimize_family",
    "poisson_pmf",
    "profile_to_fees",
    "rejection_probability",
    "revenue_max_fee",
    "simulate",
    "split_rates",
    "stationary",
    "steady_state",
    "surplus_pmf",
    "take_rate",
    "transition",
    "variable_profit",
]

__version__ = "0.1.0"
