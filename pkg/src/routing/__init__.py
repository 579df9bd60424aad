"""Initialize routing package."""

from .layout import STATIC_ID_START, build_static_entities, map_viewport, on_road
from .network import (
    ARM_DIRECTIONS,
    DEFAULT_LAYOUTS,
    Edge,
    EnvironmentKind,
    Node,
    RoadLayout,
    RoadNetwork,
    TurnKind,
    build_network,
)
from .paths import Path, path_crossings, path_from_route, shortest_path, shortest_route
from .tracking import (
    DEFAULT_LOOKAHEAD,
    RECOVERY_DISTANCE,
    SPEED_LIMITS,
    PathTracker,
    path_follow_controls,
    planned_speed,
    segment_speed_limit,
)

__all__ = [
    "STATIC_ID_START",
    "build_static_entities",
    "map_viewport",
    "on_road",
    "ARM_DIRECTIONS",
    "DEFAULT_LAYOUTS",
    "Edge",
    "EnvironmentKind",
    "Node",
    "RoadLayout",
    "RoadNetwork",
    "TurnKind",
    "build_network",
    "Path",
    "path_crossings",
    "path_from_route",
    "shortest_path",
    "shortest_route",
    "DEFAULT_LOOKAHEAD",
    "RECOVERY_DISTANCE",
    "SPEED_LIMITS",
    "PathTracker",
    "path_follow_controls",
    "planned_speed",
    "segment_speed_limit",
]
