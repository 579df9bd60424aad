"""Context parameter sets for each scenario family and case."""

import copy

# Tokens resolved when a scenario is built
CONFLICT_VEHICLE = "conflict_vehicle"
CONFLICT_VEHICLE_FOG_BAND = "conflict_vehicle_fog_band"

# Masks
MASK_CASES = {
    "success": [
        {"direction": "forward", "placement": "boundary_adjacent", "area_fraction": 0.15},
    ],
    "error": [
        {"direction": "forward", "placement": "boundary_adjacent", "area_fraction": 0.95},
    ],
}

# Fog: severity distance in meters, severity value in (0, 1)
FOG_CASES = {
    "success": {"severity_distance": 60.0, "severity_value": 0.6},
    "error": {"severity_distance": 5.0, "severity_value": 0.01},
}

# Night: headlight geometry in meters / radians
NIGHT_CASES = {
    "success": {
        "severity_distance": 60.0,
        "severity_value": 0.5,
        "headlight_depth": 30.0,
        "headlight_base_width": 2.0,
        "expansion_angle": 0.35,
    },
    "error": {
        "severity_distance": 8.0,
        "severity_value": 0.01,
        "headlight_depth": 4.0,
        "headlight_base_width": 2.0,
        "expansion_angle": 0.1,
    },
}

# Color sensitivity: error colors are never the conflicting vehicle's color on the success side
COLOR_CASES = {
    "success": {"error_colors": [[0, 160, 0]], "tolerance": 0.0},
    "error": {"error_colors": [CONFLICT_VEHICLE], "tolerance": 80.0},
}

FOG_COLOR_CASES = {
    "success": {"error_colors": [[0, 160, 0]], "tolerance": 0.0},
    "error": {"error_colors": [CONFLICT_VEHICLE_FOG_BAND], "tolerance": 80.0},
}

# Steps of the fog tint band, as weights on the vehicle's own color
FOG_BAND_WEIGHTS = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2]

# Manager-facing perturbations: sigma and absolute truncation bounds
NOISE_SPECS = {
    "noisy_fog": {
        "success": {
            "fog.severity_distance": {"sigma": 10.0, "lo": 40.0, "hi": 80.0},
            "fog.severity_value": {"sigma": 0.1, "lo": 0.4, "hi": 0.8},
        },
        "error": {
            "fog.severity_distance": {"sigma": 2.0, "lo": 2.0, "hi": 10.0},
            "fog.severity_value": {"sigma": 0.01, "lo": 0.005, "hi": 0.05},
        },
    },
    "noisy_night": {
        "success": {
            "night.severity_distance": {"sigma": 10.0, "lo": 40.0, "hi": 80.0},
            "night.severity_value": {"sigma": 0.1, "lo": 0.3, "hi": 0.7},
        },
        "error": {
            "night.severity_distance": {"sigma": 2.0, "lo": 4.0, "hi": 12.0},
            "night.severity_value": {"sigma": 0.01, "lo": 0.005, "hi": 0.05},
        },
    },
}

# What each side of a family carries; "mask" sides use the case's mask set
FAMILY_CONTEXTS = {
    "mask": {"human": ["mask"], "ai": ["mask"]},
    "fog": {"human": ["success_mask", "fog"], "ai": ["mask"]},
    "night": {"human": ["success_mask", "night"], "ai": ["mask"]},
    "color": {"human": ["mask"], "ai": ["success_mask", "color"]},
    "fog_color": {"human": ["success_mask", "fog"], "ai": ["success_mask", "success_fog", "fog_color"]},
    "noisy_fog": {"human": ["success_mask", "fog"], "ai": ["mask"]},
    "noisy_night": {"human": ["success_mask", "night"], "ai": ["mask"]},
}

# Parameter swept by calibration for each (family, side), with its severity direction
CALIBRATION_AXES = {
    "mask": {"human": "area_fraction", "ai": "area_fraction"},
    "fog": {"human": "fog.severity_value", "ai": "area_fraction"},
    "night": {"human": "night.severity_value", "ai": "area_fraction"},
    "color": {"human": "area_fraction", "ai": "color_tolerance"},
    "fog_color": {"human": "fog.severity_value", "ai": "color_tolerance"},
    "noisy_fog": {"human": "fog.severity_value", "ai": "area_fraction"},
    "noisy_night": {"human": "night.severity_value", "ai": "area_fraction"},
}

# (least severe, most severe) value of each axis
AXIS_EXTREMES = {
    "area_fraction": (0.01, 1.0),
    "fog.severity_value": (0.99, 0.001),
    "night.severity_value": (0.99, 0.001),
    "color_tolerance": (0.0, 200.0),
}


def get_all_families():
    """Get every scenario family name."""
    return list(FAMILY_CONTEXTS)


def get_case_parameters(family: str, side: str, case: str):
    """Get the context parameters one side carries for a family and case."""
    if family not in FAMILY_CONTEXTS:
        raise ValueError(f"Unknown family: {family}")
    if side not in ("human", "ai"):
        raise ValueError(f"Unknown side: {side}")
    if case not in ("success", "error"):
        raise ValueError(f"Unknown case: {case}")

    params = {"masks": [], "fog": None, "night": None, "color": None}
    for context in FAMILY_CONTEXTS[family][side]:
        if context == "mask":
            params["masks"] = copy.deepcopy(MASK_CASES[case])
        elif context == "success_mask":
            params["masks"] = copy.deepcopy(MASK_CASES["success"])
        elif context == "fog":
            params["fog"] = dict(FOG_CASES[case])
        elif context == "success_fog":
            params["fog"] = dict(FOG_CASES["success"])
        elif context == "night":
            params["night"] = dict(NIGHT_CASES[case])
        elif context == "color":
            params["color"] = copy.deepcopy(COLOR_CASES[case])
        elif context == "fog_color":
            params["color"] = copy.deepcopy(FOG_COLOR_CASES[case])
    return params


def get_noise_spec(family: str, case: str):
    """Get the manager-facing noise bounds for a noisy family, or None."""
    spec = NOISE_SPECS.get(family)
    if spec is None:
        return None
    return copy.deepcopy(spec[case])


def get_calibration_axis(family: str, side: str):
    """Get the swept parameter and its (least, most) severe values."""
    axis = CALIBRATION_AXES[family][side]
    return axis, AXIS_EXTREMES[axis]
