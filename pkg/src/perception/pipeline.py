"""One driver's perception pass for a simulation step."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Set

import numpy as np

from ..world.render import Viewport
from ..world.state import Entity, EntityKind
from .color import apply_color_sensitivity
from .contexts import apply_frame_fog, apply_night, fog_weight_map, night_weight_map
from .detection import DetectionTracker, LikelihoodFactors, detection_factors
from .profiles import DetectionSettings, SensingProfile
from .sensing import SensingFrame, apply_masks, crop_sensing_region, mask_map

logger = logging.getLogger(__name__)


@dataclass
class PerceptionResult:
    """Context image, manager-facing image, likelihoods and detections for one step."""

    image: np.ndarray
    manager_image: np.ndarray
    factors: Dict[int, LikelihoodFactors]
    detected: Set[int]

    @property
    def likelihoods(self) -> Dict[int, float]:
        return {entity_id: f.likelihood for entity_id, f in self.factors.items()}


def degrade(obs: np.ndarray, profile: SensingProfile, frame: SensingFrame) -> np.ndarray:
    """Masks, then fog, then night."""
    out = apply_masks(obs, profile.masks, frame)
    if profile.fog is not None:
        out = apply_frame_fog(out, profile.fog, frame)
    if profile.night is not None:
        out = apply_night(out, profile.night, frame)
    return out


class DriverPerception:
    """Runs a sensing profile against the base rendering, keeping detection state across steps."""

    def __init__(
        self,
        profile: SensingProfile,
        car_half_extent=(2.25, 1.0),
        detection: Optional[DetectionSettings] = None,
    ):
        self.profile = profile
        self.detection = detection or DetectionSettings()
        self.frame = SensingFrame.build(profile.ranges, profile.image_resolution, tuple(car_half_extent))
        self.tracker = DetectionTracker(self.detection.mode, self.detection.threshold)
        self._masked = mask_map(self.frame, profile.masks)
        self._fog = (
            fog_weight_map(self.frame, profile.fog.severity_distance, profile.fog.severity_value)
            if profile.fog is not None
            else None
        )
        self._light = night_weight_map(self.frame, profile.night) if profile.night is not None else None

    def reset(self) -> None:
        self.tracker.reset()

    def perceive(
        self,
        base: np.ndarray,
        viewport: Viewport,
        base_meters_per_pixel: float,
        car: Entity,
        others: Iterable[Entity],
        rng: Optional[np.random.Generator],
        manager_profile: Optional[SensingProfile] = None,
    ) -> PerceptionResult:
        """Degrade the crop, score every other car and resolve detections.

        `manager_profile` substitutes perturbed severity parameters in the image
        the manager sees; detections always use this driver's own profile.
        """
        raw = crop_sensing_region(base, viewport, base_meters_per_pixel, car.center, car.heading, self.frame)
        image = degrade(raw, self.profile, self.frame)

        factors: Dict[int, LikelihoodFactors] = {}
        for other in sorted(others, key=lambda e: e.id):
            if other.id == car.id or other.kind != EntityKind.CAR:
                continue
            factors[other.id] = detection_factors(
                other,
                self.frame,
                car.center,
                car.heading,
                self._masked,
                image,
                self._fog,
                self._light,
                self.profile.color_sensitivity,
                self.profile.color_tolerance,
            )
        in_range = {entity_id for entity_id, f in factors.items() if f.in_range}
        detected = self.tracker.update({k: f.likelihood for k, f in factors.items()}, rng, in_range)

        manager_image = image if manager_profile is None else degrade(raw, manager_profile, self.frame)
        if self.profile.color_sensitivity:
            manager_image = apply_color_sensitivity(
                manager_image, self.profile.color_sensitivity, self.profile.color_tolerance
            )
        return PerceptionResult(image=image, manager_image=manager_image, factors=factors, detected=detected)
