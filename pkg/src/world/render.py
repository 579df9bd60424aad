"""Top-down RGB rasterization of the world."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Tuple, Union

import numpy as np
from PIL import Image

from ..errors import InvalidArgumentError
from .geometry import points_in_rectangle
from .state import Entity, EntityKind, RGB, WorldState

logger = logging.getLogger(__name__)

# Palette
ROAD_COLOR: RGB = (96, 96, 96)
SIDEWALK_COLOR: RGB = (176, 176, 176)
BUILDING_COLOR: RGB = (56, 56, 56)
WHITE: RGB = (255, 255, 255)

Z_ORDER = {EntityKind.SIDEWALK: 0, EntityKind.BUILDING: 1, EntityKind.CAR: 2}


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned world region in meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidArgumentError(f"Empty viewport: {self}")

    def shape(self, meters_per_pixel: float) -> Tuple[int, int]:
        """Image (height, width) covering the viewport."""
        height = int(math.ceil((self.y_max - self.y_min) / meters_per_pixel - 1e-9))
        width = int(math.ceil((self.x_max - self.x_min) / meters_per_pixel - 1e-9))
        return height, width

    def pixel_centers(self, meters_per_pixel: float) -> np.ndarray:
        """World coordinates of every pixel center, shape (H, W, 2)."""
        height, width = self.shape(meters_per_pixel)
        xs = self.x_min + (np.arange(width) + 0.5) * meters_per_pixel
        ys = self.y_max - (np.arange(height) + 0.5) * meters_per_pixel
        grid_x, grid_y = np.meshgrid(xs, ys)
        return np.stack([grid_x, grid_y], axis=-1)

    def to_pixels(self, points: np.ndarray, meters_per_pixel: float) -> Tuple[np.ndarray, np.ndarray]:
        """Nearest pixel (row, col) for world points (..., 2); may fall outside the image."""
        cols = np.floor((points[..., 0] - self.x_min) / meters_per_pixel).astype(np.int64)
        rows = np.floor((self.y_max - points[..., 1]) / meters_per_pixel).astype(np.int64)
        return rows, cols


def _draw(image: np.ndarray, viewport: Viewport, meters_per_pixel: float, entity: Entity) -> None:
    corners = entity.corners()
    height, width = image.shape[:2]
    col_lo = max(int(math.floor((corners[:, 0].min() - viewport.x_min) / meters_per_pixel)) - 1, 0)
    col_hi = min(int(math.ceil((corners[:, 0].max() - viewport.x_min) / meters_per_pixel)) + 1, width)
    row_lo = max(int(math.floor((viewport.y_max - corners[:, 1].max()) / meters_per_pixel)) - 1, 0)
    row_hi = min(int(math.ceil((viewport.y_max - corners[:, 1].min()) / meters_per_pixel)) + 1, height)
    if col_lo >= col_hi or row_lo >= row_hi:
        return
    xs = viewport.x_min + (np.arange(col_lo, col_hi) + 0.5) * meters_per_pixel
    ys = viewport.y_max - (np.arange(row_lo, row_hi) + 0.5) * meters_per_pixel
    grid_x, grid_y = np.meshgrid(xs, ys)
    inside = points_in_rectangle(np.stack([grid_x, grid_y], axis=-1), entity.center, entity.heading, entity.half_extent)
    image[row_lo:row_hi, col_lo:col_hi][inside] = entity.color


def _ordered(entities: Iterable[Entity]):
    return sorted(entities, key=lambda e: (Z_ORDER[e.kind], e.id))


class TopDownRenderer:
    """Renders world states over a fixed viewport, caching the static layer."""

    def __init__(
        self,
        static_entities: Iterable[Entity],
        viewport: Viewport,
        meters_per_pixel: float = 0.25,
        background: RGB = ROAD_COLOR,
    ):
        if meters_per_pixel <= 0:
            raise InvalidArgumentError(f"meters_per_pixel must be positive, got {meters_per_pixel}")
        self.viewport = viewport
        self.meters_per_pixel = meters_per_pixel
        self.background = background
        height, width = viewport.shape(meters_per_pixel)
        layer = np.empty((height, width, 3), dtype=np.uint8)
        layer[...] = background
        for entity in _ordered(e for e in static_entities if not e.movable):
            _draw(layer, viewport, meters_per_pixel, entity)
        layer.setflags(write=False)
        self._static_layer = layer

    @property
    def static_layer(self) -> np.ndarray:
        return self._static_layer

    def render(self, state: WorldState) -> np.ndarray:
        image = self._static_layer.copy()
        for car in _ordered(state.cars()):
            _draw(image, self.viewport, self.meters_per_pixel, car)
        return image


def render_topdown(state: WorldState, viewport: Viewport, meters_per_pixel: float = 0.25) -> np.ndarray:
    """Rasterize a state: background, then sidewalks, buildings and cars."""
    renderer = TopDownRenderer(state.static_entities(), viewport, meters_per_pixel)
    return renderer.render(state)


def save_frame(image: np.ndarray, directory: Union[str, Path], episode: int, step: int, prefix: str = "frame") -> Path:
    """Write an RGB frame as `{prefix}_{episode}_{step}.png`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{prefix}_{episode}_{step}.png"
    Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(path)
    logger.debug("Saved frame %s", path)
    return path
