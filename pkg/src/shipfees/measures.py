"""Exact stationary performance measures of a fee policy.

The central quantity is the expected number of backorders per cycle E[M]:
orders still unprocessed when their deadline hits.  Variable profit combines
express revenue at the idealized thinned rates with the backorder penalty;
fixed (regular-price) revenue is reported separately and plays no role in
optimization.  Truncation introduces a choice for E[M]: count express demand
before or after boundary rejections.  The adjusted (post-rejection)
convention is the default; the raw variant is carried in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import chain
from .chain import (
    PolicyEvaluator,
    Scenario,
    StationaryDistribution,
    age_incomes,
    find_bound,
)
from .errors import ParameterError, UndefinedMeasureError
from .policies import FeeStructure


@dataclass(frozen=True)
class PerformanceReport:
    """Stationary measures of one policy at one truncation bound.

    Express rates and revenue come in two flavors: the idealized values at
    the thinned Poisson rates (used for profit), and the truncation-adjusted
    values that subtract rejected express orders.
    """

    expected_backorders: float
    expected_backorders_raw: float
    variable_profit: float
    fixed_profit: float
    revenue: float
    revenue_adjusted: float
    rejection_probability: float
    expected_rejected_per_cycle: float
    mean_delay: float
    per_age_express_rate: tuple[float, ...]
    per_age_express_rate_adjusted: tuple[float, ...]
    bound: int

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out


def expected_backorders(
    pi: StationaryDistribution,
    scenario: Scenario,
    policy: FeeStructure,
    adjusted: bool = True,
) -> float:
    """E[M]: expected orders missing their deadline, per cycle."""
    incomes = age_incomes(scenario, policy)
    G = chain._backorder_matrix(
        incomes[-1].express, scenario.capacity, pi.bound, adjusted
    )
    J = pi.joint(scenario.period_length - 1)
    return float(np.sum(J * G))


def variable_profit(
    pi: StationaryDistribution, scenario: Scenario, policy: FeeStructure
) -> float:
    """Expected express revenue minus backorder penalty cost, per cycle."""
    revenue = 0.0
    for inc in age_incomes(scenario, policy):
        if inc.express_rate > 0.0:
            revenue += inc.fee * inc.express_rate
    return revenue - scenario.penalty * expected_backorders(pi, scenario, policy)


def rejection_probability(
    pi: StationaryDistribution, scenario: Scenario, policy: FeeStructure
) -> float:
    """Stationary per-period probability that the bound rejects an order."""
    incomes = age_incomes(scenario, policy)
    bound = pi.bound
    cap = scenario.capacity
    nb = cap.support_max
    total = 0.0
    for tau, inc in enumerate(incomes):
        v = np.convolve(
            np.convolve(inc.express.mass, inc.regular.mass), cap.mass[::-1]
        )
        tails = chain._suffix_tails(v)
        m = pi.workload_marginal(tau)
        idx = np.minimum(bound - np.arange(bound + 1) + nb + 1, v.size)
        total += float(m @ tails[idx])
    return total / scenario.period_length


def expected_rejected_per_cycle(
    pi: StationaryDistribution, scenario: Scenario, policy: FeeStructure
) -> float:
    """Expected number of rejected orders per operating cycle."""
    incomes = age_incomes(scenario, policy)
    bound = pi.bound
    cap = scenario.capacity
    nb = cap.support_max
    total = 0.0
    for tau, inc in enumerate(incomes):
        v = np.convolve(
            np.convolve(inc.express.mass, inc.regular.mass), cap.mass[::-1]
        )
        v_vals = np.arange(v.size) - nb
        m = pi.workload_marginal(tau)
        headroom = bound - np.arange(bound + 1)
        excess = np.maximum(v_vals[None, :] - headroom[:, None], 0.0) @ v
        total += float(m @ excess)
    return total


def mean_delay(expected_backorders: float, lam: float) -> float:
    """Average lateness per arriving order, in operating cycles."""
    if lam <= 0.0:
        raise UndefinedMeasureError("mean delay undefined at arrival rate 0")
    if expected_backorders < 0.0:
        raise ParameterError("expected_backorders must be nonnegative")
    return expected_backorders / lam


def _express_losses(
    pi: StationaryDistribution, scenario: Scenario, policy: FeeStructure
) -> list[float]:
    """Expected express orders rejected at each age.

    Regular orders are rejected first, so the express loss at workload x_s is
    min(E, (x_s + E - B - bound)^+), independent of the regular count.
    """
    incomes = age_incomes(scenario, policy)
    cap = scenario.capacity.mass
    bound = pi.bound
    b_vals = np.arange(cap.size)
    losses = []
    for tau, inc in enumerate(incomes):
        e = inc.express.mass
        if e.size == 1:
            losses.append(0.0)
            continue
        e_vals = np.arange(e.size)
        weights = np.outer(e, cap)
        m = pi.workload_marginal(tau)
        total = 0.0
        for s in range(bound + 1):
            if m[s] == 0.0:
                continue
            excess = np.maximum(s + e_vals[:, None] - b_vals[None, :] - bound, 0.0)
            lost = np.minimum(e_vals[:, None], excess)
            total += m[s] * float(np.sum(weights * lost))
        losses.append(float(total))
    return losses


def evaluate_policy(
    scenario: Scenario,
    policy: FeeStructure,
    bound: int | None = None,
) -> PerformanceReport:
    """Full stationary report for one policy; finds the bound if not given."""
    if bound is None:
        bound = find_bound(scenario, policy)
    ev = PolicyEvaluator(scenario, bound)
    pi = ev.distribution(policy.fees)
    incomes = age_incomes(scenario, policy)

    backorders_adj = expected_backorders(pi, scenario, policy, adjusted=True)
    backorders_raw = expected_backorders(pi, scenario, policy, adjusted=False)
    rates = tuple(inc.express_rate for inc in incomes)
    revenue = sum(
        inc.fee * inc.express_rate for inc in incomes if inc.express_rate > 0.0
    )
    losses = _express_losses(pi, scenario, policy)
    rates_adj = tuple(max(r - l, 0.0) for r, l in zip(rates, losses))
    revenue_adj = sum(
        inc.fee * r for inc, r in zip(incomes, rates_adj) if r > 0.0
    )
    delay = (
        backorders_adj / scenario.lam if scenario.lam > 0.0 else math.nan
    )
    return PerformanceReport(
        expected_backorders=backorders_adj,
        expected_backorders_raw=backorders_raw,
        variable_profit=revenue - scenario.penalty * backorders_adj,
        fixed_profit=scenario.period_length
        * scenario.lam
        * scenario.choice.regular_price,
        revenue=revenue,
        revenue_adjusted=revenue_adj,
        rejection_probability=rejection_probability(pi, scenario, policy),
        expected_rejected_per_cycle=expected_rejected_per_cycle(
            pi, scenario, policy
        ),
        mean_delay=delay,
        per_age_express_rate=rates,
        per_age_express_rate_adjusted=rates_adj,
        bound=bound,
    )
