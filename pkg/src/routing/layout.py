"""Static scenery and map extents for a road layout."""

from typing import Dict, List

import numpy as np

from ..world.geometry import Vec2
from ..world.render import BUILDING_COLOR, SIDEWALK_COLOR, Viewport
from ..world.state import Entity, EntityKind
from .network import ARM_DIRECTIONS, RoadLayout

STATIC_ID_START = 100


def arm_extents(layout: RoadLayout) -> Dict[str, float]:
    """Distance from the center to the map edge along each axis direction."""
    closed = layout.intersection_half_size + layout.margin
    return {
        arm: layout.arm_lengths[arm] + layout.margin if arm in layout.arm_lengths else closed
        for arm in ARM_DIRECTIONS
    }


def map_viewport(layout: RoadLayout) -> Viewport:
    """Viewport covering every arm plus the layout margin."""
    ext = arm_extents(layout)
    return Viewport(-ext["W"], -ext["S"], ext["E"], ext["N"])


def _block(entity_id: int, kind: EntityKind, x0: float, y0: float, x1: float, y1: float) -> Entity:
    color = SIDEWALK_COLOR if kind == EntityKind.SIDEWALK else BUILDING_COLOR
    return Entity(
        id=entity_id,
        kind=kind,
        center=Vec2((x0 + x1) / 2.0, (y0 + y1) / 2.0),
        heading=0.0,
        half_extent=(abs(x1 - x0) / 2.0, abs(y1 - y0) / 2.0),
        color=color,
        movable=False,
    )


def build_static_entities(layout: RoadLayout) -> List[Entity]:
    """Sidewalk blocks filling the quadrants between roads, each with a building near the corner.

    A missing arm merges the two quadrants on its side into one block.
    """
    ext = arm_extents(layout)
    edge = layout.road_half_width + layout.sidewalk_offset
    blocks = []
    for sy, y_arm in ((1.0, "N"), (-1.0, "S")):
        if y_arm not in layout.arm_lengths:
            blocks.append((-ext["W"], sy * edge, ext["E"], sy * ext[y_arm]))
            continue
        for sx, x_arm in ((-1.0, "W"), (1.0, "E")):
            if x_arm not in layout.arm_lengths:
                continue
            blocks.append((sx * edge, sy * edge, sx * ext[x_arm], sy * ext[y_arm]))
    for sx, x_arm in ((-1.0, "W"), (1.0, "E")):
        if x_arm not in layout.arm_lengths:
            blocks.append((sx * edge, -ext["S"], sx * ext[x_arm], ext["N"]))

    entities: List[Entity] = []
    next_id = STATIC_ID_START
    for x0, y0, x1, y1 in blocks:
        entities.append(_block(next_id, EntityKind.SIDEWALK, x0, y0, x1, y1))
        next_id += 1
        # building anchored at the block corner nearest the intersection
        sx = 1.0 if x1 > x0 else -1.0
        sy = 1.0 if y1 > y0 else -1.0
        bx0 = x0 + sx * layout.building_inset
        by0 = y0 + sy * layout.building_inset
        room_x = abs(x1 - bx0) - layout.building_inset
        room_y = abs(y1 - by0) - layout.building_inset
        size_x = min(layout.building_size, room_x)
        size_y = min(layout.building_size, room_y)
        if size_x <= 0 or size_y <= 0:
            continue
        if abs(x1 - x0) > 2 * (ext["W"] + ext["E"]) / 3:
            # merged block: center the building on the closed side of the junction
            bx0 = -size_x / 2.0
            sx = 1.0
        entities.append(_block(next_id, EntityKind.BUILDING, bx0, by0, bx0 + sx * size_x, by0 + sy * size_y))
        next_id += 1
    return entities


def on_road(points: np.ndarray, layout: RoadLayout) -> np.ndarray:
    """Boolean mask of points (..., 2) lying on the drivable surface."""
    x = points[..., 0]
    y = points[..., 1]
    half = layout.road_half_width
    box = layout.intersection_half_size
    inside = (np.abs(x) <= box) & (np.abs(y) <= box)
    for arm, length in layout.arm_lengths.items():
        direction = ARM_DIRECTIONS[arm]
        along = x * direction.x + y * direction.y
        across = -x * direction.y + y * direction.x
        inside |= (along >= 0.0) & (along <= length) & (np.abs(across) <= half)
    return inside
