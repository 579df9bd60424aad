"""Fog and night degradation of observation images."""

import math
from functools import lru_cache
from typing import Tuple

import numpy as np

from ..errors import InvalidSeverityError
from .profiles import FogParams, NightParams
from .sensing import SensingFrame

BLACK = (0, 0, 0)


def fog_alpha(delta: float, gamma: float) -> float:
    """Decay constant that puts the blend weight at `gamma` when the distance is `delta`."""
    if not delta > 0:
        raise InvalidSeverityError(f"Severity distance must be positive, got {delta}")
    if not 0.0 < gamma < 1.0:
        raise InvalidSeverityError(f"Severity value must lie in (0, 1), got {gamma}")
    return -delta / math.log(gamma)


def decay(distance: np.ndarray, alpha: float) -> np.ndarray:
    return np.exp(-np.asarray(distance, dtype=float) / alpha)


def distance_map(shape: Tuple[int, int], center: Tuple[float, float], pixel_size: float = 1.0) -> np.ndarray:
    """Euclidean distance of every pixel index from `center` (row, col), scaled by pixel size."""
    rows, cols = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
    return np.hypot(rows - center[0], cols - center[1]) * pixel_size


def blend(obs: np.ndarray, weights: np.ndarray, color) -> np.ndarray:
    """Per-pixel convex combination weights*obs + (1-weights)*color, rounded to uint8."""
    w = weights[..., None]
    out = w * obs.astype(float) + (1.0 - w) * np.asarray(color, dtype=float)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def apply_fog(
    obs: np.ndarray,
    params: FogParams,
    center: Tuple[float, float],
    pixel_size: float = 1.0,
) -> np.ndarray:
    """Blend toward the fog color with weight decaying in distance from `center`."""
    alpha = fog_alpha(params.severity_distance, params.severity_value)
    weights = decay(distance_map(obs.shape[:2], center, pixel_size), alpha)
    return blend(obs, weights, params.fog_color)


@lru_cache(maxsize=128)
def fog_weight_map(frame: SensingFrame, delta: float, gamma: float) -> np.ndarray:
    weights = decay(distance_map(frame.shape, frame.vehicle_pixel, frame.meters_per_pixel), fog_alpha(delta, gamma))
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=128)
def headlight_mask(frame: SensingFrame, depth: float, base_width: float, angle: float) -> np.ndarray:
    """Pixels inside the headlight trapezoid starting at the front bumper."""
    u, v = frame.uv_grid()
    bumper = frame.car_half_extent[0]
    ahead = u - bumper
    half_width = base_width / 2.0 + np.maximum(ahead, 0.0) * math.tan(angle)
    lit = (ahead >= 0.0) & (ahead <= depth) & (np.abs(v) <= half_width)
    lit.setflags(write=False)
    return lit


def night_weight_map(frame: SensingFrame, params: NightParams) -> np.ndarray:
    """Blend weights toward black: 1 under the headlights, exponential decay elsewhere."""
    return _night_weights(
        frame,
        params.severity_distance,
        params.severity_value,
        params.headlight_depth,
        params.headlight_base_width,
        params.expansion_angle,
    )


@lru_cache(maxsize=128)
def _night_weights(frame, delta, gamma, depth, base_width, angle) -> np.ndarray:
    weights = decay(distance_map(frame.shape, frame.vehicle_pixel, frame.meters_per_pixel), fog_alpha(delta, gamma))
    weights = np.where(headlight_mask(frame, depth, base_width, angle), 1.0, weights)
    weights.setflags(write=False)
    return weights


def apply_night(obs: np.ndarray, params: NightParams, frame: SensingFrame) -> np.ndarray:
    """Darken everything outside the headlight trapezoid."""
    return blend(obs, night_weight_map(frame, params), BLACK)


def apply_frame_fog(obs: np.ndarray, params: FogParams, frame: SensingFrame) -> np.ndarray:
    return blend(obs, fog_weight_map(frame, params.severity_distance, params.severity_value), params.fog_color)
