"""Detection likelihoods, detection events and noisy parameter draws."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Set

import numpy as np

from ..errors import InvalidArgumentError
from ..world.geometry import Vec2
from ..world.state import Entity
from .color import color_factor, representative_color
from .profiles import DetectionMode, NoiseParams
from .sensing import SensingFrame, entity_footprint

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 10_000


@dataclass(frozen=True)
class LikelihoodFactors:
    """Multiplicative components of one entity's detection likelihood."""

    visible: float
    in_range: bool = True
    fog: float = 1.0
    light: float = 1.0
    color: float = 1.0

    @property
    def likelihood(self) -> float:
        return float(np.clip(self.visible * self.fog * self.light * self.color, 0.0, 1.0))


def detection_factors(
    entity: Entity,
    frame: SensingFrame,
    center: Vec2,
    heading: float,
    masked: np.ndarray,
    context_image: np.ndarray,
    fog_weights: Optional[np.ndarray] = None,
    light_weights: Optional[np.ndarray] = None,
    error_colors: Optional[Sequence] = None,
    color_tolerance: float = 0.0,
) -> LikelihoodFactors:
    """Likelihood factors over the entity's footprint in the sensing crop.

    Out-of-range entities get a visible share of 0; fog, light and color are
    averaged over the unmasked in-crop footprint.
    """
    rows, cols = entity_footprint(entity, frame, center, heading)
    total = rows.size
    in_crop = (rows >= 0) & (rows < frame.height) & (cols >= 0) & (cols < frame.width)
    rows, cols = rows[in_crop], cols[in_crop]
    if rows.size == 0:
        return LikelihoodFactors(visible=0.0, in_range=False)
    unmasked = ~masked[rows, cols]
    rows, cols = rows[unmasked], cols[unmasked]
    if rows.size == 0:
        return LikelihoodFactors(visible=0.0)
    visible = rows.size / total
    fog = float(fog_weights[rows, cols].mean()) if fog_weights is not None else 1.0
    light = float(light_weights[rows, cols].mean()) if light_weights is not None else 1.0
    color = 1.0
    if error_colors:
        rep = representative_color(context_image, (rows, cols))
        color = float(color_factor(rep, error_colors, color_tolerance))
    return LikelihoodFactors(visible=visible, fog=fog, light=light, color=color)


def detection_likelihood(*args, **kwargs) -> float:
    """Product of the mask, fog, light and color factors, clamped to [0, 1]."""
    return detection_factors(*args, **kwargs).likelihood


def resolve_detection(
    likelihood: float,
    mode: DetectionMode = DetectionMode.STOCHASTIC,
    rng: Optional[np.random.Generator] = None,
    threshold: float = 0.5,
) -> bool:
    """Turn a likelihood into a detection event."""
    if not 0.0 <= likelihood <= 1.0:
        raise InvalidArgumentError(f"Likelihood must lie in [0, 1], got {likelihood}")
    if DetectionMode(mode) == DetectionMode.THRESHOLD:
        return likelihood >= threshold
    if rng is None:
        raise InvalidArgumentError("Stochastic detection needs a random generator")
    return bool(rng.random() < likelihood)


@dataclass
class DetectionTracker:
    """Latches detections while an entity stays in range."""

    mode: DetectionMode = DetectionMode.STOCHASTIC
    threshold: float = 0.5
    _latched: Set[int] = field(default_factory=set)

    def reset(self) -> None:
        self._latched.clear()

    @property
    def latched(self) -> Set[int]:
        return set(self._latched)

    def update(
        self,
        likelihoods: Mapping[int, float],
        rng: Optional[np.random.Generator],
        in_range: Optional[Set[int]] = None,
    ) -> Set[int]:
        """Detected ids this step.

        Without `in_range`, entities with likelihood 0 count as out of range.
        """
        if in_range is None:
            in_range = {entity_id for entity_id, p in likelihoods.items() if p > 0.0}
        for entity_id in list(self._latched):
            if entity_id not in in_range:
                self._latched.discard(entity_id)
        for entity_id in sorted(likelihoods):
            p = likelihoods[entity_id]
            if entity_id in self._latched or p <= 0.0:
                continue
            if resolve_detection(p, self.mode, rng, self.threshold):
                self._latched.add(entity_id)
                logger.debug("Detected entity %s (p=%.3f)", entity_id, p)
        return set(self._latched)


def sample_noisy_params(
    center: Mapping[str, float],
    noise: Optional[NoiseParams],
    rng: np.random.Generator,
) -> Dict[str, float]:
    """Truncated-normal draw around each center value; unlisted keys pass through."""
    values = dict(center)
    if noise is None:
        return values
    for key in sorted(noise.bounds):
        if key not in center:
            continue
        bound = noise.bounds[key]
        mean = center[key]
        if not bound.lo <= mean <= bound.hi:
            raise InvalidArgumentError(f"{key}: center {mean} outside [{bound.lo}, {bound.hi}]")
        if bound.sigma == 0.0:
            continue
        for _ in range(MAX_REJECTIONS):
            draw = float(rng.normal(mean, bound.sigma))
            if bound.lo <= draw <= bound.hi:
                values[key] = draw
                break
        else:
            raise InvalidArgumentError(f"{key}: no draw landed in [{bound.lo}, {bound.hi}]")
    return values
