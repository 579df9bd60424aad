"""Initialize perception package."""

from .color import (
    MAX_COLOR_DISTANCE,
    apply_color_sensitivity,
    color_distance,
    color_factor,
    representative_color,
)
from .contexts import apply_fog, apply_frame_fog, apply_night, decay, fog_alpha, headlight_mask
from .detection import (
    DetectionTracker,
    LikelihoodFactors,
    detection_factors,
    detection_likelihood,
    resolve_detection,
    sample_noisy_params,
)
from .pipeline import DriverPerception, PerceptionResult, degrade
from .profiles import (
    DEFAULT_FOG_COLOR,
    DetectionMode,
    DetectionSettings,
    Direction,
    FogParams,
    Mask,
    MaskPlacement,
    NightParams,
    NoiseBound,
    NoiseParams,
    SensingProfile,
    SensingRanges,
)
from .sensing import SensingFrame, apply_masks, crop_sensing_region, entity_footprint, mask_map

__all__ = [
    "MAX_COLOR_DISTANCE",
    "apply_color_sensitivity",
    "color_distance",
    "color_factor",
    "representative_color",
    "apply_fog",
    "apply_frame_fog",
    "apply_night",
    "decay",
    "fog_alpha",
    "headlight_mask",
    "DetectionTracker",
    "LikelihoodFactors",
    "detection_factors",
    "detection_likelihood",
    "resolve_detection",
    "sample_noisy_params",
    "DriverPerception",
    "PerceptionResult",
    "degrade",
    "DEFAULT_FOG_COLOR",
    "DetectionMode",
    "DetectionSettings",
    "Direction",
    "FogParams",
    "Mask",
    "MaskPlacement",
    "NightParams",
    "NoiseBound",
    "NoiseParams",
    "SensingProfile",
    "SensingRanges",
    "SensingFrame",
    "apply_masks",
    "crop_sensing_region",
    "entity_footprint",
    "mask_map",
]
