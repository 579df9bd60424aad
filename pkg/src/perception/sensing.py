"""Vehicle-aligned sensing crops, directional regions and masks."""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Tuple

import numpy as np

from ..world.geometry import Vec2, points_in_rectangle
from ..world.render import ROAD_COLOR, WHITE, Viewport
from ..world.state import RGB, Entity
from .profiles import Direction, Mask, MaskPlacement, SensingRanges


@dataclass(frozen=True)
class SensingFrame:
    """Pixel lattice of one driver's sensing crop.

    Row 0 lies at the forward edge and column 0 at the left edge; `u` points
    forward and `v` to the left of the vehicle, both in meters.
    """

    forward: float
    backward: float
    left: float
    right: float
    meters_per_pixel: float
    height: int
    width: int
    car_half_extent: Tuple[float, float] = (2.25, 1.0)

    @classmethod
    def build(
        cls,
        ranges: SensingRanges,
        resolution: int,
        car_half_extent: Tuple[float, float] = (2.25, 1.0),
    ) -> "SensingFrame":
        mpp = max(ranges.forward + ranges.backward, ranges.left + ranges.right) / resolution
        height = max(1, int(round((ranges.forward + ranges.backward) / mpp)))
        width = max(1, int(round((ranges.left + ranges.right) / mpp)))
        return cls(ranges.forward, ranges.backward, ranges.left, ranges.right, mpp, height, width, tuple(car_half_extent))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def vehicle_pixel(self) -> Tuple[float, float]:
        """Vehicle center in (row, col) index coordinates."""
        return self.forward / self.meters_per_pixel - 0.5, self.left / self.meters_per_pixel - 0.5

    def index_to_uv(self, rows: np.ndarray, cols: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = self.forward - (np.asarray(rows, dtype=float) + 0.5) * self.meters_per_pixel
        v = self.left - (np.asarray(cols, dtype=float) + 0.5) * self.meters_per_pixel
        return u, v

    def uv_to_index(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        rows = (self.forward - np.asarray(u, dtype=float)) / self.meters_per_pixel - 0.5
        cols = (self.left - np.asarray(v, dtype=float)) / self.meters_per_pixel - 0.5
        return rows, cols

    def uv_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        return _uv_grid(self)

    def world_points(self, center: Vec2, heading: float) -> np.ndarray:
        """World coordinates of every pixel center, shape (H, W, 2)."""
        u, v = self.uv_grid()
        c, s = math.cos(heading), math.sin(heading)
        x = center.x + u * c - v * s
        y = center.y + u * s + v * c
        return np.stack([x, y], axis=-1)

    def region(self, direction: Direction) -> np.ndarray:
        """Boolean map of a directional sensing region."""
        return _region(self, Direction(direction))

    def mask_pixels(self, mask: Mask) -> np.ndarray:
        return _mask_pixels(self, mask)


@lru_cache(maxsize=64)
def _uv_grid(frame: SensingFrame) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = np.meshgrid(np.arange(frame.height), np.arange(frame.width), indexing="ij")
    u, v = frame.index_to_uv(rows, cols)
    u.setflags(write=False)
    v.setflags(write=False)
    return u, v


def _depth_axis(frame: SensingFrame, direction: Direction) -> Tuple[np.ndarray, float]:
    u, v = frame.uv_grid()
    if direction == Direction.FORWARD:
        return u, frame.forward
    if direction == Direction.BACKWARD:
        return -u, frame.backward
    if direction == Direction.LEFT:
        return v, frame.left
    return -v, frame.right


@lru_cache(maxsize=64)
def _region(frame: SensingFrame, direction: Direction) -> np.ndarray:
    depth, extent = _depth_axis(frame, direction)
    inside = (depth >= 0.0) & (depth <= extent)
    inside.setflags(write=False)
    return inside


def mask_interval(mask: Mask, extent: float) -> Tuple[float, float]:
    """Depth interval [lo, hi] covered by a mask within a region of the given extent."""
    span = mask.area_fraction * extent
    if mask.placement == MaskPlacement.VEHICLE_ADJACENT:
        return 0.0, span
    if mask.placement == MaskPlacement.BOUNDARY_ADJACENT:
        return extent - span, extent
    return (extent - span) / 2.0, (extent + span) / 2.0


@lru_cache(maxsize=256)
def _mask_pixels(frame: SensingFrame, mask: Mask) -> np.ndarray:
    depth, extent = _depth_axis(frame, mask.direction)
    lo, hi = mask_interval(mask, extent)
    covered = (depth >= lo) & (depth <= hi)
    covered.setflags(write=False)
    return covered


def crop_sensing_region(
    base: np.ndarray,
    viewport: Viewport,
    base_meters_per_pixel: float,
    center: Vec2,
    heading: float,
    frame: SensingFrame,
    fill: RGB = ROAD_COLOR,
) -> np.ndarray:
    """Vehicle-aligned nearest-neighbour resample of the base rendering.

    Pixels falling outside the base image take the fill color.
    """
    points = frame.world_points(center, heading)
    rows, cols = viewport.to_pixels(points, base_meters_per_pixel)
    height, width = base.shape[:2]
    valid = (rows >= 0) & (rows < height) & (cols >= 0) & (cols < width)
    out = np.empty((frame.height, frame.width, 3), dtype=np.uint8)
    out[...] = fill
    out[valid] = base[rows[valid], cols[valid]]
    return out


def mask_map(frame: SensingFrame, masks: Iterable[Mask]) -> np.ndarray:
    covered = np.zeros(frame.shape, dtype=bool)
    for mask in masks:
        covered |= frame.mask_pixels(mask)
    return covered


def apply_masks(obs: np.ndarray, masks: Iterable[Mask], frame: SensingFrame) -> np.ndarray:
    """Paint masked pixels white; other pixels are untouched."""
    out = obs.copy()
    out[mask_map(frame, masks)] = WHITE
    return out


def entity_footprint(entity: Entity, frame: SensingFrame, center: Vec2, heading: float) -> Tuple[np.ndarray, np.ndarray]:
    """Lattice cells covered by an entity, as (rows, cols) that may lie outside the crop."""
    corners = entity.corners()
    c, s = math.cos(heading), math.sin(heading)
    dx = corners[:, 0] - center.x
    dy = corners[:, 1] - center.y
    u = dx * c + dy * s
    v = -dx * s + dy * c
    rows, cols = frame.uv_to_index(u, v)
    r_lo, r_hi = int(math.floor(rows.min())), int(math.ceil(rows.max()))
    c_lo, c_hi = int(math.floor(cols.min())), int(math.ceil(cols.max()))
    grid_r, grid_c = np.meshgrid(np.arange(r_lo, r_hi + 1), np.arange(c_lo, c_hi + 1), indexing="ij")
    gu, gv = frame.index_to_uv(grid_r, grid_c)
    world = np.stack([center.x + gu * c - gv * s, center.y + gu * s + gv * c], axis=-1)
    inside = points_in_rectangle(world, entity.center, entity.heading, entity.half_extent)
    if not inside.any():
        # smaller than a cell: the cell holding its center
        ru, rv = frame.uv_to_index(
            np.array((entity.center.x - center.x) * c + (entity.center.y - center.y) * s),
            np.array(-(entity.center.x - center.x) * s + (entity.center.y - center.y) * c),
        )
        return np.array([int(round(float(ru)))]), np.array([int(round(float(rv)))])
    return grid_r[inside], grid_c[inside]
