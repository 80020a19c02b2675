import pytest

from algebroidkit import SamplePlan, fixture, load_problem


@pytest.fixture
def plan():
    return SamplePlan(seed=0, count=64)


@pytest.fixture
def problem():
    return lambda name: load_problem(fixture(name))
