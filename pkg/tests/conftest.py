import pytest

from drcontract import ConsumerParams, Prices


@pytest.fixture
def prices():
    return Prices(energy_price=0.26, incentive_price=0.30)


@pytest.fixture
def household():
    return ConsumerParams(baseline=8.0, marginal_utility=0.05, max_consumption=16.0)
