"""Acceleration-only driving policy shared by the human and AI driver models."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..routing.network import TurnKind
from ..routing.paths import Path, path_crossings
from ..routing.tracking import planned_speed, segment_speed_limit
from ..world.state import CarKinematics, Entity, EntityKind
from .params import DriverParams

logger = logging.getLogger(__name__)


class ConflictKind(str, Enum):
    NONE = "none"
    LEAD_FOLLOW = "lead_follow"
    PATH_CROSS = "path_cross"


class ObserverRole(str, Enum):
    MANAGED = "managed"
    BACKGROUND = "background"


@dataclass(frozen=True)
class ConflictAssessment:
    """The binding conflict for one car at one step.

    `stop_distance` is the arclength left before the yield point (path_cross),
    `gap` the bumper gap to the lead car (lead_follow).
    """

    kind: ConflictKind = ConflictKind.NONE
    other_id: Optional[int] = None
    time_to_conflict: Optional[float] = None
    has_right_of_way: Optional[bool] = None
    stop_distance: Optional[float] = None
    gap: Optional[float] = None
    other_speed: Optional[float] = None

    def __post_init__(self):
        if self.kind == ConflictKind.NONE and any(
            v is not None
            for v in (self.other_id, self.time_to_conflict, self.has_right_of_way, self.stop_distance, self.gap, self.other_speed)
        ):
            raise ValueError("A clear assessment carries no conflict details")

    @property
    def binding(self) -> bool:
        if self.kind == ConflictKind.LEAD_FOLLOW:
            return True
        return self.kind == ConflictKind.PATH_CROSS and not self.has_right_of_way


CLEAR = ConflictAssessment()


@dataclass(frozen=True)
class VehicleView:
    """A car as seen by a driver: pose, speed, and its path when known."""

    entity: Entity
    kinematics: CarKinematics
    path: Optional[Path] = None
    progress: Optional[float] = None

    @property
    def id(self) -> int:
        return self.entity.id

    @property
    def speed(self) -> float:
        return self.kinematics.speed

    def progress_on_path(self) -> Optional[float]:
        if self.path is None:
            return None
        if self.progress is not None:
            return self.progress
        s, _, _ = self.path.project(self.entity.center)
        return s


@lru_cache(maxsize=512)
def _crossings(a: Path, b: Path) -> Tuple[Tuple[float, float], ...]:
    return tuple(path_crossings(a, b))


def arrival_time(distance: float, speed: float, accel: float, max_speed: float) -> float:
    """Time to cover a distance accelerating at `accel` up to `max_speed`, seconds."""
    if distance <= 0.0:
        return 0.0
    if speed >= max_speed:
        return distance / max_speed
    t_acc = (max_speed - speed) / accel
    d_acc = speed * t_acc + 0.5 * accel * t_acc**2
    if distance <= d_acc:
        return (-speed + math.sqrt(speed**2 + 2.0 * accel * distance)) / accel
    return t_acc + (distance - d_acc) / max_speed


def _lead_follow(me: VehicleView, other: VehicleView, s_self: float, params: DriverParams) -> Optional[ConflictAssessment]:
    s_other, lateral, _ = me.path.project(other.entity.center)
    if abs(lateral) > params.lane_half_width or s_other <= s_self:
        return None
    if math.cos(other.entity.heading - me.entity.heading) <= 0.7:
        return None
    gap = s_other - s_self - me.entity.half_extent[0] - other.entity.half_extent[0]
    reach = params.min_safe_distance + me.speed**2 / (2.0 * params.max_accel)
    if gap > reach:
        return None
    closing = me.speed - other.speed
    ttc = gap / closing if closing > 1e-9 else params.conflict_horizon
    return ConflictAssessment(
        kind=ConflictKind.LEAD_FOLLOW,
        other_id=other.id,
        time_to_conflict=max(ttc, 0.0),
        gap=gap,
        other_speed=other.speed,
    )


def _path_cross(
    me: VehicleView,
    other: VehicleView,
    s_self: float,
    params: DriverParams,
    has_right_of_way: bool,
) -> Optional[ConflictAssessment]:
    if other.path is None:
        return None
    s_other = other.progress_on_path()
    best: Optional[ConflictAssessment] = None
    for cross_self, cross_other in _crossings(me.path, other.path):
        if s_self > cross_self + params.conflict_zone or s_other > cross_other + params.conflict_zone:
            continue
        if s_self >= cross_self - params.conflict_zone:
            # already committed into the zone
            continue
        t_self = arrival_time(cross_self - s_self, me.speed, params.max_accel, params.max_speed)
        t_other = arrival_time(cross_other - s_other, other.speed, params.max_accel, params.max_speed)
        if t_self > params.conflict_horizon or t_other > params.conflict_horizon:
            continue
        candidate = ConflictAssessment(
            kind=ConflictKind.PATH_CROSS,
            other_id=other.id,
            time_to_conflict=t_self,
            has_right_of_way=has_right_of_way,
            stop_distance=cross_self - params.conflict_zone - params.stop_buffer - s_self,
            other_speed=other.speed,
        )
        if best is None or candidate.time_to_conflict < best.time_to_conflict:
            best = candidate
    return best


def assess_conflict(
    me: VehicleView,
    detected: Sequence[VehicleView],
    params: Optional[DriverParams] = None,
    right_of_way: Optional[Mapping[int, bool]] = None,
    always_yield: bool = False,
) -> ConflictAssessment:
    """Most urgent conflict with any detected car.

    Crossing conflicts resolve right-of-way from `right_of_way` when given,
    otherwise by the lowest-id rule; `always_yield` makes this car give way
    to every crossing.
    """
    params = params or DriverParams()
    if me.path is None:
        raise ValueError(f"Car {me.id} has no path")
    s_self = me.progress_on_path()
    found: List[ConflictAssessment] = []
    for other in detected:
        if other.id == me.id or other.entity.kind != EntityKind.CAR:
            continue
        lead = _lead_follow(me, other, s_self, params)
        if lead is not None:
            found.append(lead)
        if always_yield:
            proceeds = False
        elif right_of_way is not None and me.id in right_of_way:
            proceeds = right_of_way[me.id]
        else:
            proceeds = me.id < other.id
        cross = _path_cross(me, other, s_self, params, proceeds)
        if cross is not None:
            found.append(cross)
    if not found:
        return CLEAR
    binding = [a for a in found if a.binding]
    pool = binding or found
    return min(pool, key=lambda a: (a.time_to_conflict, a.other_id))


def _nominal(speed: float, target: float, params: DriverParams, dt: float) -> float:
    diff = target - speed
    if diff >= 0.0:
        return min(params.max_accel, diff / dt)
    needed = -diff / dt
    if needed < params.min_decel:
        return 0.0
    return -min(max(needed, params.min_decel), params.max_accel)


def _brake(required: float, params: DriverParams) -> float:
    return -min(max(required, params.min_decel), params.max_accel)


def decide_acceleration(
    kinematics: CarKinematics,
    assessment: ConflictAssessment,
    segment_kind: TurnKind,
    params: Optional[DriverParams] = None,
    target_speed: Optional[float] = None,
    dt: float = 0.1,
) -> float:
    """Acceleration command in [-max_accel, max_accel]; never asks a stopped car to reverse."""
    params = params or DriverParams()
    speed = kinematics.speed
    target = target_speed if target_speed is not None else segment_speed_limit(segment_kind, params.speed_limits())
    nominal = _nominal(speed, target, params, dt)

    if assessment.kind == ConflictKind.NONE or not assessment.binding:
        return nominal
    if speed <= 1e-9:
        return 0.0

    if assessment.kind == ConflictKind.LEAD_FOLLOW:
        closing = speed - assessment.other_speed
        if closing > 0.0:
            room = max(assessment.gap - params.follow_buffer, 0.1)
            return min(nominal, _brake(closing**2 / (2.0 * room), params))
        if assessment.gap < params.min_safe_distance:
            return min(nominal, 0.0)
        return _nominal(speed, min(target, assessment.other_speed), params, dt)

    # yield before the crossing
    stop_distance = assessment.stop_distance
    if stop_distance <= 0.0:
        return -params.max_accel
    required = speed**2 / (2.0 * stop_distance)
    if required < params.min_decel:
        # coast until braking at the minimum rate is needed
        return min(nominal, 0.0)
    return _brake(required, params)


def assign_right_of_way(
    conflicting_cars: Iterable[int],
    pairs: Optional[Iterable[Tuple[int, int]]] = None,
    managed_id: Optional[int] = None,
) -> Dict[int, bool]:
    """Exactly one car per conflict group proceeds: the lowest id other than the managed car.

    Without `pairs` all cars form a single group; with pairs, groups are their
    connected components.
    """
    cars = sorted(set(conflicting_cars))
    parent = {car: car for car in cars}

    def find(car: int) -> int:
        while parent[car] != car:
            parent[car] = parent[parent[car]]
            car = parent[car]
        return car

    if pairs is None:
        for car in cars[1:]:
            parent[find(car)] = find(cars[0])
    else:
        for a, b in pairs:
            for car in (a, b):
                parent.setdefault(car, car)
            parent[find(a)] = find(b)
        cars = sorted(parent)

    groups: Dict[int, List[int]] = {}
    for car in cars:
        groups.setdefault(find(car), []).append(car)
    result: Dict[int, bool] = {}
    for members in groups.values():
        eligible = [car for car in members if car != managed_id] or members
        winner = min(eligible)
        for car in members:
            result[car] = car == winner
    return result


def background_visibility_filter(
    role: ObserverRole,
    entities: Iterable[Entity],
    managed_id: int,
) -> List[Entity]:
    """Background drivers ignore the managed car; the managed driver sees everything."""
    role = ObserverRole(role)
    if role == ObserverRole.BACKGROUND:
        return [e for e in entities if e.id != managed_id]
    return list(entities)


def drive(
    me: VehicleView,
    detected: Sequence[VehicleView],
    params: Optional[DriverParams] = None,
    right_of_way: Optional[Mapping[int, bool]] = None,
    always_yield: bool = False,
    dt: float = 0.1,
) -> Tuple[float, ConflictAssessment]:
    """Assess conflicts and pick the acceleration for one car."""
    params = params or DriverParams()
    assessment = assess_conflict(me, detected, params, right_of_way, always_yield)
    s = me.progress_on_path()
    target = planned_speed(me.path, s, params.planning_decel, params.speed_limits())
    accel = decide_acceleration(me.kinematics, assessment, me.path.segment_kind_at(s), params, target, dt)
    if assessment.binding:
        logger.debug("Car %s %s with car %s: a=%.2f", me.id, assessment.kind.value, assessment.other_id, accel)
    return accel, assessment
