"""Profit-maximizing parameter search over shipment-fee policy families.

Searches are exhaustive over finite grids: fee values on a fixed lattice,
cutoff ages 1..T-1, switch ages below the cutoff.  All candidates in one
search are evaluated at a single shared truncation bound so their profits
are directly comparable, and ties are resolved by a fixed preference order
(later cutoff, later switch, cheaper fees) so the reported optimum is
deterministic regardless of evaluation order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .chain import PolicyEvaluator, Scenario, find_bound
from .choice import ChoiceModel
from .errors import NumericsError, ParameterError
from .measures import PerformanceReport, evaluate_policy
from .policies import FeeStructure, SimpleTspParams, build_policy, demand_profile

# Profits closer than this are treated as tied and go to the preference order.
PROFIT_TIE_TOL = 1e-9

ENUMERATION_BUDGET = 10**6

FAMILIES = ("TSP_CF_star", "TSP")


@dataclass(frozen=True)
class SearchGrid:
    """Candidate fee values and cutoff ages for the family searches.

    fee_values must be strictly increasing; admissible switch ages are
    derived from the cutoff rather than stored.
    """

    fee_values: tuple[float, ...]
    cutoff_range: tuple[int, int]

    def __post_init__(self) -> None:
        fees = tuple(float(f) for f in self.fee_values)
        object.__setattr__(self, "fee_values", fees)
        object.__setattr__(self, "cutoff_range", tuple(self.cutoff_range))
        if not fees:
            raise ParameterError("fee_values must not be empty")
        if any(b <= a for a, b in zip(fees, fees[1:])):
            raise ParameterError("fee_values must be strictly increasing")
        if any(f < 0.0 or math.isinf(f) or math.isnan(f) for f in fees):
            raise ParameterError("fee_values must be finite and nonnegative")
        lo, hi = self.cutoff_range
        if not 0 <= lo <= hi:
            raise ParameterError("cutoff_range must satisfy 0 <= lo <= hi")

    @classmethod
    def default(cls, period_length: int) -> SearchGrid:
        """0.2 lattice from 0.2 to 3.8 with cutoffs 1..T-1."""
        fees = tuple(round(0.2 * k, 10) for k in range(1, 20))
        return cls(fees, (1, max(period_length - 1, 1)))

    def switch_values(self, cutoff: int) -> range:
        """Admissible fee switching ages for a given cutoff age."""
        return range(0, cutoff)


@dataclass(frozen=True)
class Optimum:
    """Winning candidate of a family search.

    family_params is (fee, cutoff_age) for TSP_CF_star and a SimpleTspParams
    for TSP.  runner_up_gap is the profit margin over the best candidate
    with different parameters (inf when the grid has a single candidate);
    tie_broken records whether the preference order had to decide among
    profits within PROFIT_TIE_TOL of the maximum.
    """

    family: str
    family_params: object
    best_policy: FeeStructure
    report: PerformanceReport
    evaluations: int
    runner_up_gap: float
    tie_broken: bool


def revenue_max_fee(choice: ChoiceModel) -> float:
    """Fee maximizing per-arrival express revenue fee * w(p + fee).

    The linear take rate makes revenue a downward parabola in the fee with
    vertex u_max / 2; the argmax over admissible fees is the clamped vertex.
    """
    return min(max(0.5 * choice.u_max, choice.u_min), choice.u_max)


def _validated_grid(
    scenario: Scenario, grid: SearchGrid | None
) -> SearchGrid:
    if grid is None:
        grid = SearchGrid.default(scenario.period_length)
    choice = scenario.choice
    if grid.fee_values[0] < choice.u_min or grid.fee_values[-1] > choice.u_max:
        raise ParameterError(
            "fee_values must lie within the utility range "
            f"[{choice.u_min}, {choice.u_max}]"
        )
    if grid.cutoff_range[1] > scenario.period_length - 1:
        raise ParameterError("cutoff ages must lie in 0..period_length-1")
    return grid


def _candidates(
    scenario: Scenario, family: str, grid: SearchGrid
) -> tuple[list[object], list[FeeStructure], list[tuple]]:
    """Enumerate (params, policy, preference key) for one family."""
    T = scenario.period_length
    u_max = scenario.choice.u_max
    lo, hi = grid.cutoff_range
    params_list: list[object] = []
    policies: list[FeeStructure] = []
    keys: list[tuple] = []
    if family == "TSP_CF_star":
        for fee in grid.fee_values:
            for tc in range(lo, hi + 1):
                params_list.append((fee, tc))
                policies.append(build_policy("TSP_CF", (fee, tc), T, u_max))
                keys.append((tc, tc, -fee, -fee))
    elif family == "TSP":
        for fe, fle in itertools.combinations(grid.fee_values, 2):
            for tc in range(lo, hi + 1):
                for tf in grid.switch_values(tc):
                    params = SimpleTspParams(fe, fle, tf, tc)
                    params_list.append(params)
                    policies.append(build_policy("TSP", params, T, u_max))
                    keys.append((tc, tf, -fe, -fle))
    else:
        raise ParameterError(
            f"unknown family {family!r}; expected one of {FAMILIES}"
        )
    if not policies:
        raise ParameterError("parameter grid is empty")
    return params_list, policies, keys


def optimize_family(
    scenario: Scenario,
    family: str,
    grid: SearchGrid | None = None,
    bound: int | None = None,
) -> Optimum:
    """Exhaustive profit maximization within one policy family.

    TSP_CF_star sweeps fee x cutoff; TSP sweeps fee pairs f_E < f_LE times
    switch x cutoff with switch < cutoff.  All candidates are evaluated at
    one truncation bound (found once if not given; the workload total is
    policy independent, so one bound serves every candidate).  Profit ties
    within PROFIT_TIE_TOL go to the latest cutoff, then the latest switch,
    then the cheapest fees.
    """
    grid = _validated_grid(scenario, grid)
    params_list, policies, keys = _candidates(scenario, family, grid)
    if bound is None:
        bound = find_bound(scenario, policies[0])
    evaluator = PolicyEvaluator(scenario, bound)
    profits, _ = evaluator.profits_batch([p.fees for p in policies])
    pmax = float(np.max(profits))
    tied = [i for i in range(len(policies)) if profits[i] >= pmax - PROFIT_TIE_TOL]
    winner = max(tied, key=lambda i: keys[i])
    others = [profits[i] for i in range(len(policies)) if i != winner]
    gap = float(profits[winner] - max(others)) if others else math.inf
    return Optimum(
        family=family,
        family_params=params_list[winner],
        best_policy=policies[winner],
        report=evaluate_policy(scenario, policies[winner], bound=bound),
        evaluations=len(policies),
        runner_up_gap=gap,
        tie_broken=len(tied) > 1,
    )


def is_weakly_monotone(policy: FeeStructure) -> bool:
    """True iff fees never decrease age over age (ties allowed)."""
    return all(a <= b for a, b in zip(policy.fees, policy.fees[1:]))


def exhaustive_fee_vector_search(
    scenario: Scenario,
    grid: SearchGrid | None = None,
    bound: int | None = None,
) -> tuple[FeeStructure, ...]:
    """Evaluate every fee vector in the grid's T-fold product.

    Returns the argmax set: every vector whose profit is within
    PROFIT_TIE_TOL of the maximum, in enumeration order.  Intended for
    small cycle lengths; refuses products beyond the enumeration budget.
    """
    grid = _validated_grid(scenario, grid)
    T = scenario.period_length
    count = len(grid.fee_values) ** T
    if count > ENUMERATION_BUDGET:
        raise ParameterError(
            f"{count} fee vectors exceed the enumeration budget "
            f"{ENUMERATION_BUDGET}; use a smaller fee grid or shorter cycle"
        )
    vectors = list(itertools.product(grid.fee_values, repeat=T))
    if bound is None:
        bound = find_bound(scenario, FeeStructure(T, vectors[0]))
    evaluator = PolicyEvaluator(scenario, bound)
    profits, _ = evaluator.profits_batch(vectors)
    pmax = float(np.max(profits))
    return tuple(
        FeeStructure(T, vec)
        for vec, profit in zip(vectors, profits)
        if profit >= pmax - PROFIT_TIE_TOL
    )


@dataclass(frozen=True)
class DominanceRecord:
    """Backorder comparison of a dominating profile pair."""

    backorders: float
    backorders_prime: float
    bound: int

    @property
    def margin(self) -> float:
        return self.backorders_prime - self.backorders


def dominance_experiment(
    scenario: Scenario,
    policy: FeeStructure,
    policy_prime: FeeStructure,
    bound: int | None = None,
) -> DominanceRecord:
    """Check that cumulative-demand dominance implies fewer backorders.

    Requires the cumulative express demand profile of policy to dominate
    that of policy_prime componentwise with equal final values (raises a
    parameter error otherwise, since that is a hypothesis violation rather
    than a finding).  Raises a numerics error if the backorder inequality
    itself fails beyond PROFIT_TIE_TOL.
    """
    prof = demand_profile(policy, scenario.choice, scenario.lam)
    prof_prime = demand_profile(policy_prime, scenario.choice, scenario.lam)
    slack = 1e-9
    pairs = list(zip(prof.values, prof_prime.values))
    if any(a < b - slack for a, b in pairs):
        raise ParameterError(
            "cumulative demand profile of policy must dominate "
            "policy_prime componentwise"
        )
    if abs(pairs[-1][0] - pairs[-1][1]) > slack:
        raise ParameterError(
            "profiles must accumulate equal total express demand"
        )
    if bound is None:
        bound = find_bound(scenario, policy)
    evaluator = PolicyEvaluator(scenario, bound)
    backorders = evaluator.backorders(policy.fees)
    backorders_prime = evaluator.backorders(policy_prime.fees)
    if backorders > backorders_prime + PROFIT_TIE_TOL:
        raise NumericsError(
            "dominating profile produced more backorders "
            f"({backorders} > {backorders_prime})"
        )
    return DominanceRecord(backorders, backorders_prime, bound)
