"""Cross-check the exact evaluator against Monte Carlo.

Same truncated dynamics on both sides, so the empirical estimates must
land within a few stream-level halfwidths of the exact values.
"""

from shipfees import (
    ChoiceModel,
    Scenario,
    SimConfig,
    build_policy,
    evaluate_policy,
    simulate,
)

BOUND = 40
CONFIG = SimConfig(cycles=105_000, warmup_cycles=5_000, seed=7, bound=BOUND, streams=100)


def main():
    choice = ChoiceModel(regular_price=4.0, u_min=0.0, u_max=4.0)
    scenario = Scenario.from_utilization(8, 5.0, 0.90, 0.5, 20, choice, 8.0)
    policy = build_policy("TSP", (2.6, 3.2, 6, 7), 8, choice.u_max)

    exact = evaluate_policy(scenario, policy, bound=BOUND)
    sim = simulate(scenario, policy, CONFIG)
    est = sim.report
    print(f"{sim.measured_cycles} measured cycles over {sim.streams} streams")
    rows = (
        ("E[M]", est.expected_backorders, exact.expected_backorders,
         sim.halfwidth_backorders),
        ("E[G^V]", est.variable_profit, exact.variable_profit,
         sim.halfwidth_variable_profit),
        ("J", est.rejection_probability, exact.rejection_probability,
         sim.halfwidth_rejection),
    )
    for label, simulated, exact_value, hw in rows:
        pull = abs(simulated - exact_value) / hw
        print(
            f"{label:7} sim={simulated:9.5f}  exact={exact_value:9.5f}  "
            f"halfwidth={hw:.5f}  ({pull:.2f} hw)"
        )


if __name__ == "__main__":
    main()
