"""World entities and state snapshots."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np

from ..errors import InvalidArgumentError, MissingEntityError
from .geometry import Vec2, rectangle_corners

RGB = Tuple[int, int, int]

MAX_SPEED = 13.5  # m/s
MAX_ACCELERATION = 1.2  # m/s^2
DEFAULT_DT = 0.1  # s


class EntityKind(str, Enum):
    """Kinds of rectangular entities in the world."""

    CAR = "car"
    BUILDING = "building"
    SIDEWALK = "sidewalk"


@dataclass(frozen=True)
class Entity:
    """An oriented rectangle with a fixed color."""

    id: int
    kind: EntityKind
    center: Vec2
    heading: float
    half_extent: Tuple[float, float]
    color: RGB
    movable: bool

    def __post_init__(self):
        if min(self.half_extent) <= 0:
            raise InvalidArgumentError(f"Entity {self.id}: half_extent must be positive, got {self.half_extent}")
        if self.movable != (self.kind == EntityKind.CAR):
            raise InvalidArgumentError(f"Entity {self.id}: only cars are movable")
        if any(not 0 <= channel <= 255 for channel in self.color):
            raise InvalidArgumentError(f"Entity {self.id}: color out of range {self.color}")
        if not math.isfinite(self.heading):
            raise InvalidArgumentError(f"Entity {self.id}: non-finite heading")

    def corners(self) -> np.ndarray:
        return rectangle_corners(self.center, self.heading, self.half_extent)

    def moved_to(self, center: Vec2, heading: float) -> "Entity":
        return replace(self, center=center, heading=heading)


@dataclass(frozen=True)
class CarKinematics:
    """Speed and last applied controls of a car."""

    speed: float
    acceleration: float = 0.0
    steering: float = 0.0  # yaw rate, rad/s

    def __post_init__(self):
        if not 0.0 <= self.speed <= MAX_SPEED + 1e-9:
            raise InvalidArgumentError(f"Speed {self.speed} outside [0, {MAX_SPEED}]")
        if abs(self.acceleration) > MAX_ACCELERATION + 1e-9:
            raise InvalidArgumentError(f"Acceleration {self.acceleration} exceeds {MAX_ACCELERATION}")


@dataclass(frozen=True)
class WorldState:
    """All entities and car kinematics at one time step."""

    entities: Tuple[Entity, ...]
    car_kinematics: Mapping[int, CarKinematics] = field(default_factory=dict)
    time_step_index: int = 0
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if self.time_step_index < 0:
            raise InvalidArgumentError("time_step_index must be non-negative")
        if self.dt <= 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        ids = [e.id for e in self.entities]
        if len(ids) != len(set(ids)):
            raise InvalidArgumentError("Entity ids must be unique")
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "car_kinematics", dict(self.car_kinematics))

    def entity(self, entity_id: int) -> Entity:
        for entity in self.entities:
            if entity.id == entity_id:
                return entity
        raise MissingEntityError(f"Unknown entity id: {entity_id}")

    def kinematics(self, entity_id: int) -> CarKinematics:
        try:
            return self.car_kinematics[entity_id]
        except KeyError:
            raise MissingEntityError(f"No kinematics for entity id: {entity_id}") from None

    def cars(self) -> Iterator[Entity]:
        return (e for e in self.entities if e.kind == EntityKind.CAR)

    def static_entities(self) -> List[Entity]:
        return [e for e in self.entities if not e.movable]

    def without(self, entity_id: int) -> "WorldState":
        """State with one car removed."""
        kinematics: Dict[int, CarKinematics] = dict(self.car_kinematics)
        kinematics.pop(entity_id, None)
        return replace(
            self,
            entities=tuple(e for e in self.entities if e.id != entity_id),
            car_kinematics=kinematics,
        )
