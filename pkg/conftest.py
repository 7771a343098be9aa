"""
Shared fixtures for the lab tests
Living at the repository root puts `utils` and `components` on the import path
"""

import numpy as np
import pytest

from utils.metric_core import euclidean_space
from utils.paper_spaces import AssemblyParams, build_assembly, build_gnk, gnk_metric


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def line_space():
    """Points 0, 1, 2, 10, 11 on the real line"""
    return euclidean_space([[0.0], [1.0], [2.0], [10.0], [11.0]], labels=("a", "b", "c", "d", "e"))


@pytest.fixture
def two_point_space():
    return euclidean_space([[0.0], [1.0]], labels=("a", "b"), name="two-point")


@pytest.fixture(scope="session")
def g21():
    g = build_gnk(2, 1)
    return g, gnk_metric(g)


@pytest.fixture(scope="session")
def xn21():
    """X_2 glued from G_{2,1}: T-corners, origin and outer-edge midpoints"""
    return build_assembly("X_N", AssemblyParams(n_values=(2,), k_values=(1,)))
