"""Context feature vector and observation resizing for the manager."""

import math
from typing import List, Optional

import numpy as np

from ..perception.profiles import SensingProfile

FEATURE_NAMES: List[str] = [
    "fog_distance",
    "fog_value",
    "night_distance",
    "night_value",
    "headlight_depth",
    "goal_distance",
    "goal_bearing_sin",
    "goal_bearing_cos",
    "speed",
    "delegation",
]
FEATURE_COUNT = len(FEATURE_NAMES)

SEVERITY_DISTANCE_SCALE = 100.0  # m
HEADLIGHT_DEPTH_SCALE = 50.0  # m
GOAL_DISTANCE_SCALE = 200.0  # m
SPEED_SCALE = 13.5  # m/s


def context_features(
    human_profile: SensingProfile,
    ai_profile: Optional[SensingProfile],
    goal_distance: float,
    goal_bearing: float,
    speed: float,
    delegation: int,
) -> np.ndarray:
    """Normalized context vector; absent contexts encode as 0.

    Weather and light come from the human's manager-facing profile, falling
    back to the AI's fog when the human has none.
    """
    fog = human_profile.fog or (ai_profile.fog if ai_profile is not None else None)
    night = human_profile.night
    values = np.zeros(FEATURE_COUNT, dtype=np.float32)
    if fog is not None:
        values[0] = fog.severity_distance / SEVERITY_DISTANCE_SCALE
        values[1] = fog.severity_value
    if night is not None:
        values[2] = night.severity_distance / SEVERITY_DISTANCE_SCALE
        values[3] = night.severity_value
        values[4] = night.headlight_depth / HEADLIGHT_DEPTH_SCALE
    values[5] = goal_distance / GOAL_DISTANCE_SCALE
    values[6] = math.sin(goal_bearing)
    values[7] = math.cos(goal_bearing)
    values[8] = speed / SPEED_SCALE
    values[9] = float(delegation)
    return np.clip(values, -1.0, 1.0)


def resize_observation(image: np.ndarray, size: int) -> np.ndarray:
    """Nearest-neighbour resize of an (H, W, 3) image to (size, size, 3)."""
    height, width = image.shape[:2]
    rows = np.minimum((np.arange(size) * height) // size, height - 1)
    cols = np.minimum((np.arange(size) * width) // size, width - 1)
    return np.ascontiguousarray(image[rows[:, None], cols[None, :]])
