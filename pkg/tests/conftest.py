import numpy as np
import pytest

from wrp.verify import generate_scenario


@pytest.fixture(scope="session")
def scenario0():
    return generate_scenario(0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
