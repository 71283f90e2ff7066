import numpy as np
import pytest

from thermoplate.backend.quadrature import DataTriple, RadialData
from thermoplate.backend.roots import solve_characteristic_cubic
from thermoplate.utils.presets import preset_data


@pytest.fixture
def roots():
    return solve_characteristic_cubic()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gaussian():
    return preset_data("gaussian")


@pytest.fixture
def constant():
    return preset_data("constant-profile")


@pytest.fixture
def mean_zero():
    return preset_data("mean-zero-gaussian-derivative")


@pytest.fixture
def zero_data():
    zero = RadialData(profile=np.zeros_like, mean=0.0, name="zero")
    return DataTriple(zero, zero, zero)
