"""Shared fixtures: instances small enough for exhaustive oracles."""

import numpy as np
import pytest

import shipfees as sf


@pytest.fixture(scope="session")
def choice():
    return sf.ChoiceModel(regular_price=4.0, u_min=0.0, u_max=4.0)


@pytest.fixture(scope="session")
def micro_scenario(choice):
    # T=2 with a 4-point capacity keeps the brute-force loops exact and fast
    capacity = sf.Pmf(np.array([0.1, 0.2, 0.4, 0.3]))
    return sf.Scenario(2, 1.5, capacity, choice, 8.0)


@pytest.fixture(scope="session")
def make_scenario(choice):
    """Factory for the benchmark experimental design at a given (rho, c)."""

    def make(rho: float, penalty: float) -> sf.Scenario:
        return sf.Scenario.from_utilization(8, 5.0, rho, 0.5, 20, choice, penalty)

    return make
