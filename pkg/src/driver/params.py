"""Driving-behavior constants."""

from typing import Dict

from pydantic import BaseModel, Field, model_validator

from ..routing.network import TurnKind


class DriverParams(BaseModel):
    """Limits shared by the human and AI driver models."""

    min_safe_distance: float = Field(10.0, gt=0, description="Minimum safe following distance, m")
    min_decel: float = Field(0.2, gt=0, description="Minimum deceleration magnitude, m/s^2")
    max_accel: float = Field(1.2, gt=0, description="Maximum acceleration magnitude, m/s^2")
    goal_threshold: float = Field(1.0, gt=0, description="Distance at which the goal counts as reached, m")
    max_speed_straight: float = Field(13.5, gt=0, description="m/s")
    max_speed_left: float = Field(5.5, gt=0, description="m/s")
    max_speed_right: float = Field(4.2, gt=0, description="m/s")
    conflict_horizon: float = Field(5.0, gt=0, description="Look-ahead for crossing conflicts, s")
    planning_decel: float = Field(1.0, gt=0, description="Deceleration used to slow for upcoming turns, m/s^2")
    conflict_zone: float = Field(5.5, gt=0, description="Arclength radius around a path crossing, m")
    stop_buffer: float = Field(1.0, ge=0, description="Extra gap kept before a conflict zone when yielding, m")
    follow_buffer: float = Field(2.0, ge=0, description="Bumper gap targeted when braking behind a lead car, m")
    lane_half_width: float = Field(1.75, gt=0, description="Lateral tolerance for same-lane checks, m")
    lookahead: float = Field(3.0, gt=0, description="Pure-pursuit lookahead, m")
    recovery_distance: float = Field(3.0, gt=0, description="Cross-track error at which tracking is lost, m")

    @model_validator(mode="after")
    def _check_bounds(self) -> "DriverParams":
        if self.min_decel > self.max_accel:
            raise ValueError("min_decel must not exceed max_accel")
        if self.planning_decel > self.max_accel:
            raise ValueError("planning_decel must not exceed max_accel")
        return self

    def speed_limits(self) -> Dict[TurnKind, float]:
        return {
            TurnKind.STRAIGHT: self.max_speed_straight,
            TurnKind.LEFT: self.max_speed_left,
            TurnKind.RIGHT: self.max_speed_right,
        }

    @property
    def max_speed(self) -> float:
        return max(self.speed_limits().values())
