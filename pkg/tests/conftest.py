from importlib import resources

import pytest


@pytest.fixture(scope="session")
def fixture_signal():
    """Path of the shipped unit-Gaussian signal file."""
    return str(resources.files("extgev") / "data" / "unit_gaussian.json")
