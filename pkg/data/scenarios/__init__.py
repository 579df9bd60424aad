"""Initialize scenarios package."""

from .case_parameters import (
    CONFLICT_VEHICLE,
    CONFLICT_VEHICLE_FOG_BAND,
    FOG_BAND_WEIGHTS,
    get_all_families,
    get_calibration_axis,
    get_case_parameters,
    get_noise_spec,
)

__all__ = [
    "CONFLICT_VEHICLE",
    "CONFLICT_VEHICLE_FOG_BAND",
    "FOG_BAND_WEIGHTS",
    "get_all_families",
    "get_calibration_axis",
    "get_case_parameters",
    "get_noise_spec",
]
