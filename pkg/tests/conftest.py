import numpy as np
import pytest

from wdl.network import NetworkSpec, init_params


@pytest.fixture
def small_spec():
    return NetworkSpec(layer_sizes=(3, 6, 4, 2), split_index=1, activation="tanh")


@pytest.fixture
def small_params(small_spec):
    return init_params(small_spec, np.random.default_rng(0))
