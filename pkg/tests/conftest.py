"""Shared fixtures. Ground states and minimizers are expensive enough to be
worth computing once per session; everything they feed is read-only."""

import pytest

from stripmin import RadialGrid, shoot_ground_state


@pytest.fixture(scope="session")
def radial_grid_1d():
    return RadialGrid(d=1, r_max=25.0, h=0.01)


@pytest.fixture(scope="session")
def radial_grid_2d():
    return RadialGrid(d=2, r_max=25.0, h=0.01)


@pytest.fixture(scope="session")
def w1_p3(radial_grid_1d):
    """d=1, p=3 ground state on the default grid."""
    return shoot_ground_state(1, 3.0, radial_grid_1d)


@pytest.fixture(scope="session")
def w1_p2(radial_grid_1d):
    return shoot_ground_state(1, 2.0, radial_grid_1d)


@pytest.fixture(scope="session")
def w2_p3(radial_grid_2d):
    """d=2, p=3 ground state (the cross-section of the N=3 strip problem)."""
    return shoot_ground_state(2, 3.0, radial_grid_2d)
