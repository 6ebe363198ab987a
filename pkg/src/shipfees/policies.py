"""Fee policies over the operating cycle and their demand profiles.

A policy posts one express fee per age 0..T-1 of the operating cycle.  Ages
where express is not offered are encoded either with the sentinel fee u_max
(take rate 0, the canonical form) or with math.inf (the cutoff form);
both induce the same arrival split, which is what makes canonicalization
profit-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .choice import ChoiceModel, split_rates, take_rate
from .errors import ParameterError

FAMILIES = ("CSP", "TSP_CF", "TSP")


@dataclass(frozen=True)
class FeeStructure:
    """Express fee per age of the operating cycle.

    Fees are premiums over the regular price; math.inf marks an age where
    express is not offered at all.
    """

    period_length: int
    fees: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.period_length < 1:
            raise ParameterError("period_length must be at least 1")
        fees = tuple(float(f) for f in self.fees)
        if len(fees) != self.period_length:
            raise ParameterError(
                f"expected {self.period_length} fees, got {len(fees)}"
            )
        for f in fees:
            if math.isnan(f) or f < 0.0:
                raise ParameterError("fees must be nonnegative (or math.inf)")
        object.__setattr__(self, "fees", fees)


@dataclass(frozen=True)
class SimpleTspParams:
    """Two-level fee schedule: express_fee through switch_age, then
    lastminute_fee through cutoff_age, then no express."""

    express_fee: float
    lastminute_fee: float
    switch_age: int
    cutoff_age: int

    def __post_init__(self) -> None:
        if self.express_fee < 0.0 or self.lastminute_fee < 0.0:
            raise ParameterError("fees must be nonnegative")
        if not self.lastminute_fee > self.express_fee:
            raise ParameterError("lastminute_fee must exceed express_fee")
        if not 0 <= self.switch_age <= self.cutoff_age:
            raise ParameterError("ages must satisfy 0 <= switch_age <= cutoff_age")


@dataclass(frozen=True)
class CumulativeDemandProfile:
    """Cumulative expected express demand through each age, inclusive.

    values[k] is the expected express arrival rate accumulated over ages
    0..k, so the vector has one entry per age and values[0] is age 0's own
    contribution.  Every per-age increment (values[0] included) lies in
    [0, lam] because each age contributes lam times a take rate.
    """

    lam: float
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.lam < 0.0:
            raise ParameterError("arrival rate must be nonnegative")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ParameterError("profile needs at least one age")
        slack = 1e-9 * max(1.0, self.lam)
        for a, b in zip((0.0,) + vals, vals):
            if b - a < -slack or b - a > self.lam + slack:
                raise ParameterError("profile increments must lie in [0, lam]")
        object.__setattr__(self, "values", vals)

    @property
    def period_length(self) -> int:
        return len(self.values)

    def express_fraction(self) -> float:
        """Share of all arrivals that order express (the profile's alpha)."""
        if self.lam == 0.0:
            return 0.0
        return self.values[-1] / (self.period_length * self.lam)


def canonicalize(
    cutoff: int, partial_fees: Sequence[float], period_length: int, u_max: float
) -> FeeStructure:
    """Extend a cutoff-form policy to all ages with the sentinel fee u_max.

    partial_fees covers ages 0..cutoff; ages past the cutoff get fee u_max,
    which induces take rate 0 and is therefore equivalent to not offering
    express at all.  Idempotent: a full-length input with cutoff
    period_length - 1 is returned unchanged.
    """
    if not 0 <= cutoff <= period_length - 1:
        raise ParameterError("cutoff must lie in 0..period_length-1")
    fees = tuple(float(f) for f in partial_fees)
    if len(fees) != cutoff + 1:
        raise ParameterError(
            f"cutoff {cutoff} requires {cutoff + 1} fees, got {len(fees)}"
        )
    full = fees + (float(u_max),) * (period_length - 1 - cutoff)
    return FeeStructure(period_length, full)


def cutoff_form(
    cutoff: int, partial_fees: Sequence[float], period_length: int
) -> FeeStructure:
    """Cutoff-form twin of :func:`canonicalize`: math.inf past the cutoff."""
    if not 0 <= cutoff <= period_length - 1:
        raise ParameterError("cutoff must lie in 0..period_length-1")
    fees = tuple(float(f) for f in partial_fees)
    if len(fees) != cutoff + 1:
        raise ParameterError(
            f"cutoff {cutoff} requires {cutoff + 1} fees, got {len(fees)}"
        )
    return FeeStructure(period_length, fees + (math.inf,) * (period_length - 1 - cutoff))


def build_policy(
    family: str,
    params,
    period_length: int,
    u_max: float,
) -> FeeStructure:
    """Construct a benchmark-family policy as a canonical FeeStructure.

    CSP:    params is the constant fee, posted at every age.
    TSP_CF: params is (fee, cutoff_age); fee through the cutoff, then u_max.
    TSP:    params is a SimpleTspParams two-level schedule.
    """
    if family == "CSP":
        fee = float(params)
        _check_fee_range(fee, u_max)
        return FeeStructure(period_length, (fee,) * period_length)
    if family == "TSP_CF":
        fee, cutoff = params
        fee = float(fee)
        _check_fee_range(fee, u_max)
        if not 0 <= int(cutoff) <= period_length - 1:
            raise ParameterError("cutoff_age must lie in 0..period_length-1")
        return canonicalize(int(cutoff), (fee,) * (int(cutoff) + 1), period_length, u_max)
    if family == "TSP":
        if not isinstance(params, SimpleTspParams):
            params = SimpleTspParams(*params)
        _check_fee_range(params.express_fee, u_max)
        _check_fee_range(params.lastminute_fee, u_max)
        if not params.cutoff_age <= period_length - 1:
            raise ParameterError("cutoff_age must lie in 0..period_length-1")
        fees = tuple(
            params.express_fee if tau <= params.switch_age else params.lastminute_fee
            for tau in range(params.cutoff_age + 1)
        )
        return canonicalize(params.cutoff_age, fees, period_length, u_max)
    raise ParameterError(f"unknown policy family {family!r}; expected one of {FAMILIES}")


def _check_fee_range(fee: float, u_max: float) -> None:
    if not 0.0 <= fee <= u_max:
        raise ParameterError(f"fee {fee!r} outside [0, u_max={u_max!r}]")


def demand_profile(
    policy: FeeStructure, choice: ChoiceModel, lam: float
) -> CumulativeDemandProfile:
    """Cumulative express demand rates induced by a policy."""
    values = []
    running = 0.0
    for fee in policy.fees:
        express, _ = split_rates(choice, lam, fee)
        running += express
        values.append(running)
    return CumulativeDemandProfile(lam, tuple(values))


def profile_to_fees(
    profile: CumulativeDemandProfile, choice: ChoiceModel
) -> FeeStructure:
    """Invert a demand profile back to a canonical fee vector.

    Each increment demands take rate w = increment / lam; the linear part of
    the take-rate curve is inverted exactly, with w = 1 pinned to u_min and
    w = 0 pinned to the sentinel u_max.  Requires u_min < u_max and lam > 0.
    """
    if profile.lam <= 0.0:
        raise ParameterError("profile inversion requires lam > 0")
    span = choice.u_max - choice.u_min
    if span <= 0.0:
        raise ParameterError("profile inversion requires u_min < u_max")
    fees = []
    for a, b in zip((0.0,) + profile.values, profile.values):
        w = min(max((b - a) / profile.lam, 0.0), 1.0)
        if w >= 1.0:
            fees.append(choice.u_min)
        elif w <= 0.0:
            fees.append(choice.u_max)
        else:
            fees.append(choice.u_min + (1.0 - w) * span)
    return FeeStructure(profile.period_length, tuple(fees))


def is_monotone(policy: FeeStructure) -> bool:
    """True iff the full fee vector is strictly increasing age over age."""
    return all(a < b for a, b in zip(policy.fees, policy.fees[1:]))
