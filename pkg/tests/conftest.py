from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from cablegrid.cable import cable_fixture, cable_flyped_fixture, trefoil_steps_fixture
from cablegrid.grid import RectDiagram

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

UNKNOT_CORNERS = [(0, 0), (0, 1), (1, 1), (1, 0)]
TREFOIL_CORNERS = [(0, 3), (0, 0), (3, 0), (3, 2), (1, 2), (1, 4), (4, 4), (4, 1), (2, 1), (2, 3)]


@pytest.fixture(scope="session")
def unknot() -> RectDiagram:
    return RectDiagram.from_cycle(UNKNOT_CORNERS)


@pytest.fixture(scope="session")
def trefoil() -> RectDiagram:
    return RectDiagram.from_cycle(TREFOIL_CORNERS)


@pytest.fixture(scope="session")
def trefoil_steps():
    return trefoil_steps_fixture()


@pytest.fixture(scope="session")
def cable() -> RectDiagram:
    return cable_fixture()


@pytest.fixture(scope="session")
def cable_flyped() -> RectDiagram:
    return cable_flyped_fixture()
