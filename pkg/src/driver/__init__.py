"""Initialize driver package."""

from .params import DriverParams
from .policy import (
    CLEAR,
    ConflictAssessment,
    ConflictKind,
    ObserverRole,
    VehicleView,
    arrival_time,
    assess_conflict,
    assign_right_of_way,
    background_visibility_filter,
    decide_acceleration,
    drive,
)

__all__ = [
    "DriverParams",
    "CLEAR",
    "ConflictAssessment",
    "ConflictKind",
    "ObserverRole",
    "VehicleView",
    "arrival_time",
    "assess_conflict",
    "assign_right_of_way",
    "background_visibility_filter",
    "decide_acceleration",
    "drive",
]
