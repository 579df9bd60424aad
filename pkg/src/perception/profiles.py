"""Sensing profiles and context parameter models."""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

RGBTriple = Tuple[int, int, int]

DEFAULT_FOG_COLOR: RGBTriple = (191, 191, 191)


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    LEFT = "left"
    RIGHT = "right"


class MaskPlacement(str, Enum):
    VEHICLE_ADJACENT = "vehicle_adjacent"
    CENTERED = "centered"
    BOUNDARY_ADJACENT = "boundary_adjacent"


class DetectionMode(str, Enum):
    STOCHASTIC = "stochastic"
    THRESHOLD = "threshold"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class SensingRanges(_Frozen):
    """Observation distance in each direction, meters."""

    forward: float = Field(80.0, gt=0)
    backward: float = Field(20.0, gt=0)
    left: float = Field(45.0, gt=0)
    right: float = Field(45.0, gt=0)


class Mask(_Frozen):
    """An opaque band covering part of one directional sensing region."""

    direction: Direction = Direction.FORWARD
    placement: MaskPlacement = MaskPlacement.CENTERED
    area_fraction: float = Field(..., gt=0, le=1, description="Share of the region's depth covered")


class FogParams(_Frozen):
    """Exponential visibility decay toward a fog color."""

    severity_distance: float = Field(..., gt=0, description="Distance of the severity point, m")
    severity_value: float = Field(..., gt=0, lt=1, description="Blend weight at the severity point")
    fog_color: RGBTriple = DEFAULT_FOG_COLOR


class NightParams(_Frozen):
    """Decay toward black outside a headlight trapezoid."""

    severity_distance: float = Field(..., gt=0, description="Distance of the severity point, m")
    severity_value: float = Field(..., gt=0, lt=1, description="Blend weight at the severity point")
    headlight_depth: float = Field(30.0, ge=0, description="Lit distance ahead of the bumper, m")
    headlight_base_width: float = Field(2.0, gt=0, description="Lit width at the bumper, m")
    expansion_angle: float = Field(0.35, ge=0, lt=math.pi / 2, description="Half-angle of the light spread, rad")


class NoiseBound(_Frozen):
    """Truncated-normal perturbation of one parameter."""

    sigma: float = Field(..., ge=0)
    lo: float
    hi: float

    @model_validator(mode="after")
    def _ordered(self) -> "NoiseBound":
        if self.lo > self.hi:
            raise ValueError(f"lo ({self.lo}) exceeds hi ({self.hi})")
        return self


class NoiseParams(_Frozen):
    """Per-parameter noise, keyed like `fog.severity_value`."""

    bounds: Dict[str, NoiseBound] = Field(default_factory=dict)


class SensingProfile(_Frozen):
    """Everything that shapes one driver's perception."""

    ranges: SensingRanges = Field(default_factory=SensingRanges)
    masks: List[Mask] = Field(default_factory=list)
    fog: Optional[FogParams] = None
    night: Optional[NightParams] = None
    color_sensitivity: Optional[List[RGBTriple]] = None
    color_tolerance: float = Field(0.0, ge=0, description="Color distance below which an entity is invisible")
    noise: Optional[NoiseParams] = None
    image_resolution: int = Field(128, gt=0)

    @field_validator("color_sensitivity")
    @classmethod
    def _check_colors(cls, colors: Optional[List[RGBTriple]]) -> Optional[List[RGBTriple]]:
        if colors is not None:
            for color in colors:
                if any(not 0 <= c <= 255 for c in color):
                    raise ValueError(f"Color out of range: {color}")
        return colors

    def manager_view(self, values: Dict[str, float]) -> "SensingProfile":
        """Copy with fog/night severity replaced by perturbed values."""
        update = {}
        for context in ("fog", "night"):
            params = getattr(self, context)
            if params is None:
                continue
            changes = {
                key.split(".", 1)[1]: value for key, value in values.items() if key.startswith(f"{context}.")
            }
            if changes:
                update[context] = params.model_copy(update=changes)
        return self.model_copy(update=update)

    def severity_values(self) -> Dict[str, float]:
        """Current fog/night severity parameters keyed like NoiseParams."""
        values: Dict[str, float] = {}
        for context in ("fog", "night"):
            params = getattr(self, context)
            if params is not None:
                values[f"{context}.severity_distance"] = params.severity_distance
                values[f"{context}.severity_value"] = params.severity_value
        return values


class DetectionSettings(_Frozen):
    mode: DetectionMode = DetectionMode.STOCHASTIC
    threshold: float = Field(0.5, ge=0, le=1)
