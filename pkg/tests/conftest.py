import numpy as np
import pytest

from spinshuttle import PhysicalScales, StaProtocol, build_grid, initial_state


@pytest.fixture(scope="session")
def scales():
    return PhysicalScales()


@pytest.fixture(scope="session")
def default_grid():
    """Production grid: x in [-15, 25], 2048 points, dt = 1e-3, t_f = 8."""
    return build_grid(-15.0, 25.0, 2048, 1e-3, 8.0)


@pytest.fixture(scope="session")
def small_grid():
    """Cheap grid for short transports (d ~ 3)."""
    return build_grid(-8.0, 11.0, 1024, 1e-3, 2.0)


@pytest.fixture(scope="session")
def sta_default():
    return StaProtocol(d=10.0, t_f=8.0)


@pytest.fixture(scope="session")
def sta_small():
    return StaProtocol(d=3.0, t_f=2.0)


@pytest.fixture(scope="session")
def plus_x_state(default_grid, scales):
    return initial_state(default_grid, scales)


def rng(seed=0):
    return np.random.default_rng(seed)
