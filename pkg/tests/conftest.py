import pytest

from hetcycle.presets import example_params


@pytest.fixture(scope="session")
def ex1():
    return example_params(1)


@pytest.fixture(scope="session")
def ex2():
    return example_params(2)


@pytest.fixture(scope="session")
def ex3():
    return example_params(3)
