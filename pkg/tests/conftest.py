import numpy as np
import pytest

from mtload import QuadrupoleField, chromium52


@pytest.fixture(scope="session")
def cr():
    return chromium52()


@pytest.fixture
def field():
    return QuadrupoleField(gradient=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
