"""Family searches, exhaustive fee-vector search, and dominance checks."""

import itertools
import math

import numpy as np
import pytest

import shipfees as sf


GRID = sf.SearchGrid((0.5, 1.0, 1.5, 2.0, 2.5, 3.0), (1, 1))


def tsp_cf_star_policies(grid, period_length, u_max):
    out = {}
    lo, hi = grid.cutoff_range
    for fee in grid.fee_values:
        for tc in range(lo, hi + 1):
            out[(fee, tc)] = sf.canonicalize(
                tc, (fee,) * (tc + 1), period_length, u_max
            )
    return out


def tsp_policies(grid, period_length, u_max):
    out = {}
    lo, hi = grid.cutoff_range
    for fe, fle in itertools.combinations(grid.fee_values, 2):
        for tc in range(lo, hi + 1):
            for tf in range(tc):
                params = sf.SimpleTspParams(fe, fle, tf, tc)
                out[params] = sf.build_policy("TSP", params, period_length, u_max)
    return out


class TestRevenueMaxFee:
    def test_benchmark_choice(self, choice):
        assert sf.revenue_max_fee(choice) == 2.0

    def test_degenerate_premium(self):
        assert sf.revenue_max_fee(sf.ChoiceModel(4.0, 1.0, 1.0)) == 1.0

    def test_general_uniform_vertex(self):
        assert sf.revenue_max_fee(sf.ChoiceModel(4.0, 0.0, 2.0)) == 1.0


class TestOptimizeFamily:
    def test_beats_every_candidate(self, micro_scenario):
        opt = sf.optimize_family(micro_scenario, "TSP", GRID, bound=8)
        candidates = tsp_policies(GRID, 2, 4.0)
        assert opt.evaluations == len(candidates)
        for pol in candidates.values():
            report = sf.evaluate_policy(micro_scenario, pol, bound=8)
            assert opt.report.variable_profit >= report.variable_profit - 1e-12

    def test_report_matches_reevaluation(self, micro_scenario):
        opt = sf.optimize_family(micro_scenario, "TSP_CF_star", GRID, bound=8)
        again = sf.evaluate_policy(micro_scenario, opt.best_policy, bound=8)
        assert opt.report.variable_profit == again.variable_profit
        assert opt.report.expected_backorders == again.expected_backorders

    def test_zero_penalty_prefers_revenue_max_fee(self, choice):
        capacity = sf.Pmf(np.array([0.1, 0.2, 0.4, 0.3]))
        scenario = sf.Scenario(2, 1.5, capacity, choice, 0.0)
        opt = sf.optimize_family(scenario, "TSP_CF_star", GRID, bound=8)
        fee, cutoff = opt.family_params
        assert fee == sf.revenue_max_fee(choice)
        assert cutoff == scenario.period_length - 1

    def test_exact_tie_goes_to_cheaper_fees(self, choice):
        # c=0 and a symmetric revenue curve tie (1,2) with (2,3) exactly
        capacity = sf.Pmf(np.array([0.1, 0.2, 0.4, 0.3]))
        scenario = sf.Scenario(2, 1.5, capacity, choice, 0.0)
        grid = sf.SearchGrid((1.0, 2.0, 3.0), (1, 1))
        opt = sf.optimize_family(scenario, "TSP", grid, bound=8)
        assert opt.tie_broken is True
        assert opt.runner_up_gap == 0.0
        params = opt.family_params
        assert (params.express_fee, params.lastminute_fee) == (1.0, 2.0)

    def test_unknown_family_rejected(self, micro_scenario):
        with pytest.raises(sf.ParameterError):
            sf.optimize_family(micro_scenario, "CSP_star", GRID, bound=8)

    def test_grid_must_fit_choice_range(self, micro_scenario):
        with pytest.raises(sf.ParameterError):
            sf.optimize_family(
                micro_scenario, "TSP", sf.SearchGrid((2.0, 4.5), (1, 1)), bound=8
            )

    def test_cutoff_must_fit_period(self, micro_scenario):
        with pytest.raises(sf.ParameterError):
            sf.optimize_family(
                micro_scenario, "TSP", sf.SearchGrid((1.0, 2.0), (1, 3)), bound=8
            )


class TestSearchGrid:
    def test_default_lattice(self):
        grid = sf.SearchGrid.default(8)
        assert grid.fee_values[0] == pytest.approx(0.2)
        assert grid.fee_values[-1] == pytest.approx(3.8)
        assert len(grid.fee_values) == 19
        assert grid.cutoff_range == (1, 7)
        assert list(grid.switch_values(3)) == [0, 1, 2]

    def test_validation(self):
        with pytest.raises(sf.ParameterError):
            sf.SearchGrid((), (1, 1))
        with pytest.raises(sf.ParameterError):
            sf.SearchGrid((1.0, 1.0), (1, 1))
        with pytest.raises(sf.ParameterError):
            sf.SearchGrid((2.0, 1.0), (1, 1))
        with pytest.raises(sf.ParameterError):
            sf.SearchGrid((1.0, math.inf), (1, 1))
        with pytest.raises(sf.ParameterError):
            sf.SearchGrid((1.0, 2.0), (2, 1))


class TestExhaustiveSearch:
    def test_matches_manual_enumeration(self, micro_scenario):
        grid = sf.SearchGrid((0.5, 1.25, 2.0, 2.75, 3.5), (1, 1))
        best = sf.exhaustive_fee_vector_search(micro_scenario, grid, bound=8)
        vectors = list(itertools.product(grid.fee_values, repeat=2))
        ev = sf.PolicyEvaluator(micro_scenario, 8)
        profits, _ = ev.profits_batch(vectors)
        pmax = profits.max()
        expect = {v for v, p in zip(vectors, profits) if p >= pmax - 1e-9}
        assert {pol.fees for pol in best} == expect

    def test_argmax_contains_weakly_monotone_vector(self, micro_scenario):
        grid = sf.SearchGrid((0.5, 1.25, 2.0, 2.75, 3.5), (1, 1))
        best = sf.exhaustive_fee_vector_search(micro_scenario, grid, bound=8)
        assert any(sf.is_weakly_monotone(pol) for pol in best)

    def test_zero_penalty_keeps_revenue_max_vector(self, choice):
        capacity = sf.Pmf(np.array([0.1, 0.2, 0.4, 0.3]))
        scenario = sf.Scenario(2, 1.5, capacity, choice, 0.0)
        grid = sf.SearchGrid((1.0, 2.0, 3.0), (1, 1))
        best = sf.exhaustive_fee_vector_search(scenario, grid, bound=8)
        assert (2.0, 2.0) in {pol.fees for pol in best}

    def test_enumeration_budget(self, make_scenario):
        fees = tuple(np.round(np.linspace(0.1, 3.9, 39), 10))
        with pytest.raises(sf.ParameterError, match="budget|grid"):
            sf.exhaustive_fee_vector_search(
                make_scenario(0.85, 8.0), sf.SearchGrid(fees, (1, 7)), bound=15
            )

    def test_overloaded_scenario_rejected(self, choice):
        with pytest.raises(sf.ParameterError):
            sf.Scenario(2, 1.5, sf.Pmf.point_mass(0), choice, 8.0)


class TestDominance:
    def test_reflexive_equality(self, micro_scenario):
        pol = sf.FeeStructure(2, (1.5, 2.5))
        record = sf.dominance_experiment(micro_scenario, pol, pol, bound=8)
        assert record.backorders == record.backorders_prime
        assert record.margin == 0.0

    def test_front_loading_beats_back_loading(self, micro_scenario):
        front = sf.FeeStructure(2, (0.8, 3.2))
        back = sf.FeeStructure(2, (3.2, 0.8))
        record = sf.dominance_experiment(micro_scenario, front, back, bound=8)
        assert record.backorders <= record.backorders_prime + 1e-9
        assert record.margin == pytest.approx(
            record.backorders_prime - record.backorders, abs=1e-15
        )

    def test_violated_dominance_is_a_precondition_error(self, micro_scenario):
        front = sf.FeeStructure(2, (0.8, 3.2))
        back = sf.FeeStructure(2, (3.2, 0.8))
        with pytest.raises(sf.ParameterError):
            sf.dominance_experiment(micro_scenario, back, front, bound=8)

    def test_unequal_totals_are_a_precondition_error(self, micro_scenario):
        high = sf.FeeStructure(2, (0.8, 0.8))
        low = sf.FeeStructure(2, (3.2, 3.2))
        with pytest.raises(sf.ParameterError):
            sf.dominance_experiment(micro_scenario, high, low, bound=8)
