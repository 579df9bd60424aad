"""Steering along a path and segment speed planning."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from ..errors import TrackingLostError
from ..world.geometry import Vec2, wrap_angle
from ..world.state import CarKinematics, Entity
from .network import TurnKind
from .paths import Path

SPEED_LIMITS: Dict[TurnKind, float] = {
    TurnKind.STRAIGHT: 13.5,
    TurnKind.LEFT: 5.5,
    TurnKind.RIGHT: 4.2,
}

DEFAULT_LOOKAHEAD = 3.0  # m
RECOVERY_DISTANCE = 3.0  # m
PLANNING_DECELERATION = 1.0  # m/s^2


def segment_speed_limit(kind: TurnKind, limits: Optional[Dict[TurnKind, float]] = None) -> float:
    """Maximum speed on a segment of the given turn kind, m/s."""
    return (limits or SPEED_LIMITS)[TurnKind(kind)]


def path_follow_controls(
    car: Entity,
    kinematics: CarKinematics,
    path: Path,
    lookahead: float = DEFAULT_LOOKAHEAD,
    recovery_distance: float = RECOVERY_DISTANCE,
    hint: Optional[int] = None,
) -> float:
    """Pure-pursuit yaw-rate command (rad/s) steering the car onto the path centerline.

    Positive commands turn left. Raises TrackingLostError beyond the recovery distance.
    """
    s, lateral, _ = path.project(car.center, hint)
    if abs(lateral) > recovery_distance:
        raise TrackingLostError(
            f"Car {car.id} is {abs(lateral):.2f} m off its path (limit {recovery_distance} m)"
        )
    if len(path.waypoints) == 1 or kinematics.speed == 0.0:
        return 0.0
    target = path.point_at(s + lookahead)
    if s + lookahead > path.length:
        # extend past the goal along the final heading
        overshoot = s + lookahead - path.length
        target = target + Vec2.from_heading(path.heading_at(path.length)) * overshoot
    offset = target - car.center
    distance = offset.norm()
    if distance < 1e-6:
        return 0.0
    alpha = wrap_angle(math.atan2(offset.y, offset.x) - car.heading)
    curvature = 2.0 * math.sin(alpha) / distance
    return curvature * kinematics.speed


def planned_speed(
    path: Path,
    s: float,
    deceleration: float = PLANNING_DECELERATION,
    limits: Optional[Dict[TurnKind, float]] = None,
) -> float:
    """Highest speed at arclength s from which every upcoming limit is reachable."""
    best = math.inf
    for start, end, kind in path.kind_runs():
        if end <= s:
            continue
        gap = max(start - s, 0.0)
        best = min(best, math.sqrt(segment_speed_limit(kind, limits) ** 2 + 2.0 * deceleration * gap))
    if math.isinf(best):
        best = segment_speed_limit(path.segment_kind_at(s), limits)
    return best


@dataclass
class PathTracker:
    """A car's progress along its path, updated once per step."""

    path: Path
    goal_threshold: float = 1.0
    progress: float = 0.0
    lateral: float = 0.0
    _hint: Optional[int] = field(default=None, repr=False)

    def update(self, car: Entity) -> Tuple[float, float]:
        s, lateral, idx = self.path.project(car.center, self._hint)
        self._hint = idx
        self.progress = max(self.progress, s)
        self.lateral = lateral
        return self.progress, lateral

    @property
    def hint(self) -> Optional[int]:
        return self._hint

    @property
    def remaining(self) -> float:
        return max(self.path.length - self.progress, 0.0)

    def reached_goal(self, car: Entity) -> bool:
        return self.remaining <= self.goal_threshold or car.center.distance_to(self.path.goal) <= self.goal_threshold

    def steering(self, car: Entity, kinematics: CarKinematics, lookahead: float = DEFAULT_LOOKAHEAD, recovery_distance: float = RECOVERY_DISTANCE) -> float:
        return path_follow_controls(car, kinematics, self.path, lookahead, recovery_distance, self._hint)
