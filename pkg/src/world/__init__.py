"""Initialize world package."""

from .geometry import Vec2, rectangle_corners, rectangles_intersect, polygon_distance, wrap_angle
from .state import (
    RGB,
    MAX_SPEED,
    MAX_ACCELERATION,
    DEFAULT_DT,
    EntityKind,
    Entity,
    CarKinematics,
    WorldState,
)
from .dynamics import step_world, detect_collisions, entity_distance
from .render import (
    ROAD_COLOR,
    SIDEWALK_COLOR,
    BUILDING_COLOR,
    WHITE,
    Viewport,
    TopDownRenderer,
    render_topdown,
    save_frame,
)

__all__ = [
    "Vec2",
    "rectangle_corners",
    "rectangles_intersect",
    "polygon_distance",
    "wrap_angle",
    "RGB",
    "MAX_SPEED",
    "MAX_ACCELERATION",
    "DEFAULT_DT",
    "EntityKind",
    "Entity",
    "CarKinematics",
    "WorldState",
    "step_world",
    "detect_collisions",
    "entity_distance",
    "ROAD_COLOR",
    "SIDEWALK_COLOR",
    "BUILDING_COLOR",
    "WHITE",
    "Viewport",
    "TopDownRenderer",
    "render_topdown",
    "save_frame",
]
