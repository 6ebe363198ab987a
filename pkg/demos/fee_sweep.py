"""Sweep the constant express fee and watch the profit trade-off.

Low fees sell a lot of express shipping but pile up deadline backlog;
high fees forgo revenue.  The profit-maximizing constant fee sits at the
revenue-maximizing level only when backorders are cheap.
"""

from shipfees import (
    ChoiceModel,
    Scenario,
    build_policy,
    evaluate_policy,
    revenue_max_fee,
    take_rate,
)

BOUND = 30


def main():
    choice = ChoiceModel(regular_price=4.0, u_min=0.0, u_max=4.0)
    scenario = Scenario.from_utilization(8, 5.0, 0.85, 0.5, 20, choice, 8.0)

    print(f"revenue-maximizing fee: {revenue_max_fee(choice):g}")
    print(f"{'fee':>4} {'express share':>13} {'revenue':>8} {'E[M]':>7} {'E[G^V]':>8}")
    best = (float("-inf"), None)
    for k in range(1, 20):
        fee = round(0.2 * k, 1)
        policy = build_policy("CSP", fee, 8, choice.u_max)
        rep = evaluate_policy(scenario, policy, bound=BOUND)
        share = take_rate(choice, choice.regular_price + fee)
        print(
            f"{fee:4.1f} {share:13.2f} {rep.revenue:8.3f} "
            f"{rep.expected_backorders:7.3f} {rep.variable_profit:8.3f}"
        )
        if rep.variable_profit > best[0]:
            best = (rep.variable_profit, fee)
    print()
    print(f"best constant fee {best[1]:g} with E[G^V] = {best[0]:.3f}")


if __name__ == "__main__":
    main()
