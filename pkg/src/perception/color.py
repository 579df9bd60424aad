"""Weighted RGB color distance and color-limited detection."""

from typing import Sequence

import numpy as np

from ..errors import NoPixelsError
from ..world.render import ROAD_COLOR


def color_distance(c1, c2) -> np.ndarray:
    """Red-mean weighted Euclidean distance; broadcasts over leading axes."""
    a = np.asarray(c1, dtype=float)
    b = np.asarray(c2, dtype=float)
    r_mean = (a[..., 0] + b[..., 0]) / 2.0
    dr = a[..., 0] - b[..., 0]
    dg = a[..., 1] - b[..., 1]
    db = a[..., 2] - b[..., 2]
    d = np.sqrt((2.0 + r_mean / 256.0) * dr**2 + 4.0 * dg**2 + (2.0 + (255.0 - r_mean) / 256.0) * db**2)
    return d if d.ndim else float(d)


MAX_COLOR_DISTANCE = color_distance((0, 0, 0), (255, 255, 255))


def representative_color(image: np.ndarray, footprint: np.ndarray) -> np.ndarray:
    """Per-channel mean over the footprint pixels (boolean map or index arrays)."""
    pixels = image[footprint]
    if pixels.size == 0:
        raise NoPixelsError("Entity footprint covers no pixels")
    return pixels.reshape(-1, 3).astype(float).mean(axis=0)


def color_factor(colors, error_colors: Sequence, tolerance: float = 0.0) -> np.ndarray:
    """Detectability from the distance to the nearest error color, in [0, 1]."""
    colors = np.asarray(colors, dtype=float)
    errors = np.asarray(error_colors, dtype=float).reshape(-1, 3)
    distances = color_distance(colors[..., None, :], errors)
    nearest = np.min(distances, axis=-1)
    scale = MAX_COLOR_DISTANCE - tolerance
    factor = np.clip((nearest - tolerance) / scale, 0.0, 1.0)
    return factor if factor.ndim else float(factor)


def apply_color_sensitivity(
    image: np.ndarray,
    error_colors: Sequence,
    tolerance: float = 0.0,
    replacement=ROAD_COLOR,
    fade: float = 60.0,
) -> np.ndarray:
    """Fade pixels toward the replacement color as they come within `fade` of an error color."""
    if not error_colors:
        return image.copy()
    errors = np.asarray(error_colors, dtype=float).reshape(-1, 3)
    nearest = np.min(color_distance(image.astype(float)[..., None, :], errors), axis=-1)
    w = np.clip((nearest - tolerance) / fade, 0.0, 1.0)[..., None]
    out = w * image.astype(float) + (1.0 - w) * np.asarray(replacement, dtype=float)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
