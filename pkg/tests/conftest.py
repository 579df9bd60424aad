"""Shared fixtures for the delegation simulator tests."""

import numpy as np
import pytest

from src.routing import EnvironmentKind, build_network
from src.scenario import SimulatorConfig
from src.world import CarKinematics, Entity, EntityKind, Vec2, WorldState


def make_car(car_id, x, y, heading=0.0, half_extent=(2.25, 1.0), color=(30, 90, 220)):
    return Entity(
        id=car_id,
        kind=EntityKind.CAR,
        center=Vec2(x, y),
        heading=heading,
        half_extent=half_extent,
        color=color,
        movable=True,
    )


def make_block(block_id, x, y, half_extent, kind=EntityKind.BUILDING, color=(56, 56, 56)):
    return Entity(
        id=block_id,
        kind=kind,
        center=Vec2(x, y),
        heading=0.0,
        half_extent=half_extent,
        color=color,
        movable=False,
    )


def make_state(entities, speeds=None, dt=0.1):
    speeds = speeds or {}
    kinematics = {e.id: CarKinematics(speed=speeds.get(e.id, 0.0)) for e in entities if e.movable}
    return WorldState(entities=tuple(entities), car_kinematics=kinematics, dt=dt)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def four_way_network():
    return build_network(EnvironmentKind.FOUR_WAY)


@pytest.fixture(scope="session")
def t_network():
    return build_network(EnvironmentKind.T_INTERSECTION)


@pytest.fixture
def settings():
    return SimulatorConfig()


@pytest.fixture
def fast_settings():
    """Small network and short runs for the training and CLI tests."""
    return SimulatorConfig.model_validate(
        {
            "perception": {"image_resolution": 64},
            "manager": {"input_size": 24, "channels": [4, 8], "hidden": [32]},
            "training": {"episodes": 2, "batch_size": 8, "warmup": 16, "replay_capacity": 256, "target_sync": 10},
            "evaluation": {"episodes": 1, "intervals": [10, 20]},
            "calibration": {"trial_seeds": 1, "bisection_iterations": 2},
        }
    )
