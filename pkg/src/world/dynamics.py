"""Kinematic updates and spatial queries over a world state."""

import math
from dataclasses import replace
from itertools import combinations
from typing import Dict, List, Mapping, Tuple

from ..errors import InvalidControlError
from .geometry import Vec2, polygon_distance, rectangles_intersect, wrap_angle
from .state import MAX_ACCELERATION, MAX_SPEED, CarKinematics, Entity, WorldState

Controls = Tuple[float, float]  # (acceleration m/s^2, yaw rate rad/s)


def step_world(
    state: WorldState,
    controls: Mapping[int, Controls],
    max_speed: float = MAX_SPEED,
) -> WorldState:
    """Advance every car by one forward-Euler step.

    Speed is updated first and clamped to [0, max_speed], then heading from the
    yaw-rate command, then position from the new speed and heading. Cars without
    a control entry coast with zero acceleration and zero yaw rate.
    """
    for car_id, (acceleration, steering) in controls.items():
        entity = state.entity(car_id)
        if not entity.movable:
            raise InvalidControlError(f"Entity {car_id} is not a movable car")
        if not (math.isfinite(acceleration) and math.isfinite(steering)):
            raise InvalidControlError(f"Non-finite control for car {car_id}: ({acceleration}, {steering})")
        if abs(acceleration) > MAX_ACCELERATION + 1e-9:
            raise InvalidControlError(f"Acceleration {acceleration} for car {car_id} exceeds {MAX_ACCELERATION}")

    dt = state.dt
    entities: List[Entity] = []
    kinematics: Dict[int, CarKinematics] = {}
    for entity in state.entities:
        if not entity.movable:
            entities.append(entity)
            continue
        current = state.kinematics(entity.id)
        acceleration, steering = controls.get(entity.id, (0.0, 0.0))
        speed = min(max(current.speed + acceleration * dt, 0.0), max_speed)
        heading = wrap_angle(entity.heading + steering * dt)
        center = Vec2(
            entity.center.x + speed * math.cos(heading) * dt,
            entity.center.y + speed * math.sin(heading) * dt,
        )
        entities.append(entity.moved_to(center, heading))
        kinematics[entity.id] = CarKinematics(speed=speed, acceleration=acceleration, steering=steering)

    return replace(
        state,
        entities=tuple(entities),
        car_kinematics=kinematics,
        time_step_index=state.time_step_index + 1,
    )


def _bounding_radius(entity: Entity) -> float:
    return math.hypot(*entity.half_extent)


def detect_collisions(state: WorldState) -> List[Tuple[int, int]]:
    """All pairs of intersecting rectangles as (lower id, higher id), sorted."""
    pairs = []
    ordered = sorted(state.entities, key=lambda e: e.id)
    corners = {e.id: e.corners() for e in ordered}
    for a, b in combinations(ordered, 2):
        reach = _bounding_radius(a) + _bounding_radius(b)
        if a.center.distance_to(b.center) > reach:
            continue
        if rectangles_intersect(corners[a.id], corners[b.id]):
            pairs.append((a.id, b.id))
    return pairs


def entity_distance(a: Entity, b: Entity) -> float:
    """Minimum distance between two entity boundaries; 0 when they intersect."""
    return polygon_distance(a.corners(), b.corners())
