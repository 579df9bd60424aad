"""Simulator configuration models and scenario selection."""

import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..driver.params import DriverParams
from ..errors import ConfigError
from ..manager.network import ManagerArchitecture
from ..manager.trainer import TrainingSettings
from ..perception.profiles import DetectionSettings, SensingRanges
from ..routing.network import DEFAULT_LAYOUTS, EnvironmentKind, RoadLayout
from ..utils.config import load_config

logger = logging.getLogger(__name__)

MANAGED_ID = 1
BACKGROUND_ID = 2
EXTRA_ID_START = 3

DEFAULT_INTERVALS = [10, 15, 20, 25, 30, 35, 40]


class Family(str, Enum):
    """Scenario families: which contexts degrade which driver."""

    MASK = "mask"
    FOG = "fog"
    NIGHT = "night"
    COLOR = "color"
    FOG_COLOR = "fog_color"
    NOISY_FOG = "noisy_fog"
    NOISY_NIGHT = "noisy_night"


class Case(str, Enum):
    SUCCESS = "success"
    ERROR = "error"


CASE_LABELS = ["S/S", "S/E", "E/S", "E/E"]
_LETTERS = {"S": Case.SUCCESS, "E": Case.ERROR}


def parse_case(label: str) -> Tuple[Case, Case]:
    """Split a case label like "S/E" into (human case, ai case)."""
    try:
        human, ai = label.strip().upper().split("/")
        return _LETTERS[human], _LETTERS[ai]
    except (KeyError, ValueError):
        raise ConfigError(f"Unknown case label: {label}") from None


def case_label(human_case: Case, ai_case: Case) -> str:
    return f"{Case(human_case).value[0].upper()}/{Case(ai_case).value[0].upper()}"


class SimulationSettings(BaseModel):
    dt: float = Field(0.1, gt=0, description="Time step, s")
    max_speed: float = Field(13.5, gt=0, le=13.5, description="Speed clamp, m/s")
    meters_per_pixel: float = Field(0.25, gt=0, description="Top-down render resolution, m/px")
    step_limit: int = Field(300, ge=1, description="Steps before an episode times out")


class VehicleSpec(BaseModel):
    """Route and appearance of one car."""

    start_node: str
    goal_node: str
    initial_speed: float = Field(0.0, ge=0, le=13.5, description="m/s")
    color: Tuple[int, int, int]

    @field_validator("color")
    @classmethod
    def _check_color(cls, color: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(not 0 <= c <= 255 for c in color):
            raise ValueError(f"Color out of range: {color}")
        return color


class ExtraVehicle(VehicleSpec):
    """Non-conflicting traffic spawned at a fixed arclength along its route."""

    spawn_offset: float = Field(0.0, ge=0, description="m along the route")


class EnvironmentSettings(BaseModel):
    layout: RoadLayout
    managed: VehicleSpec
    background: VehicleSpec
    extra_traffic: List[ExtraVehicle] = Field(default_factory=list)
    car_half_extent: Tuple[float, float] = Field((2.25, 1.0), description="Half length and half width, m")
    arrival_tolerance: float = Field(0.5, gt=0, description="Allowed gap between nominal arrival times, s")

    @field_validator("car_half_extent")
    @classmethod
    def _check_extent(cls, extent: Tuple[float, float]) -> Tuple[float, float]:
        if min(extent) <= 0:
            raise ValueError(f"car_half_extent must be positive, got {extent}")
        return extent


MANAGED_COLOR = (30, 90, 220)
BACKGROUND_COLOR = (220, 40, 40)


def default_environments() -> Dict[EnvironmentKind, EnvironmentSettings]:
    """Managed car turns left from the south arm; the background car crosses its arc."""
    managed = VehicleSpec(start_node="S_in_start", goal_node="W_out_end", color=MANAGED_COLOR)
    return {
        EnvironmentKind.T_INTERSECTION: EnvironmentSettings(
            layout=DEFAULT_LAYOUTS[EnvironmentKind.T_INTERSECTION],
            managed=managed,
            background=VehicleSpec(start_node="W_in_start", goal_node="E_out_end", color=BACKGROUND_COLOR),
        ),
        EnvironmentKind.FOUR_WAY: EnvironmentSettings(
            layout=DEFAULT_LAYOUTS[EnvironmentKind.FOUR_WAY],
            managed=managed,
            background=VehicleSpec(start_node="N_in_start", goal_node="S_out_end", color=BACKGROUND_COLOR),
        ),
    }


class PerceptionSettings(BaseModel):
    detection: DetectionSettings = Field(default_factory=DetectionSettings)
    ranges: SensingRanges = Field(default_factory=SensingRanges)
    image_resolution: int = Field(128, gt=0, description="Pixels along the longer sensing axis")


class EvaluationSettings(BaseModel):
    episodes: int = Field(100, ge=0, description="Episodes per case")
    intervals: List[int] = Field(default_factory=lambda: list(DEFAULT_INTERVALS))
    workers: int = Field(1, ge=1)

    @field_validator("intervals")
    @classmethod
    def _check_intervals(cls, intervals: List[int]) -> List[int]:
        if any(i < 1 for i in intervals):
            raise ValueError(f"Intervals must be positive integers, got {intervals}")
        return intervals


class CalibrationSettings(BaseModel):
    trial_seeds: int = Field(5, ge=1, description="Seeds per solo calibration run")
    bisection_iterations: int = Field(8, ge=0)


class SimulatorConfig(BaseModel):
    """Validated contents of the configuration file."""

    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    driver: DriverParams = Field(default_factory=DriverParams)
    environments: Dict[EnvironmentKind, EnvironmentSettings] = Field(default_factory=default_environments)
    perception: PerceptionSettings = Field(default_factory=PerceptionSettings)
    manager: ManagerArchitecture = Field(default_factory=ManagerArchitecture)
    training: TrainingSettings = Field(default_factory=TrainingSettings)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)
    calibration: CalibrationSettings = Field(default_factory=CalibrationSettings)

    @field_validator("environments", mode="before")
    @classmethod
    def _merge_environments(cls, value):
        # partial sections override the built-in environments
        if not isinstance(value, dict):
            return value
        merged = {kind.value: env.model_dump() for kind, env in default_environments().items()}
        for name, section in value.items():
            key = EnvironmentKind(name).value if isinstance(name, str) else name
            base = merged.get(key, {})
            merged[key] = _deep_merge(base, section or {})
        return merged

    def environment(self, kind: Union[str, EnvironmentKind]) -> EnvironmentSettings:
        kind = EnvironmentKind(kind)
        try:
            return self.environments[kind]
        except KeyError:
            raise ConfigError(f"Environment not configured: {kind.value}") from None


def _deep_merge(base: dict, update: dict) -> dict:
    out = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and key != "arm_lengths":
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_simulator_config(config_path: Union[str, Path, None] = None) -> SimulatorConfig:
    """Load and validate the simulator configuration file."""
    raw = load_config(config_path)
    try:
        config = SimulatorConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {exc}") from exc
    logger.debug("Loaded configuration with environments %s", [k.value for k in config.environments])
    return config


class ScenarioConfig(BaseModel):
    """One cell of the case matrix."""

    model_config = ConfigDict(frozen=True)

    environment: EnvironmentKind
    family: Family
    human_case: Case
    ai_case: Case
    seed: int = 0
    step_limit: int = Field(300, ge=1)
    overrides: Dict[str, float] = Field(
        default_factory=dict,
        description='Parameter overrides keyed "<side>.<axis>", e.g. "human.fog.severity_value"',
    )

    @model_validator(mode="after")
    def _check_overrides(self) -> "ScenarioConfig":
        for key in self.overrides:
            side = key.split(".", 1)[0]
            if side not in ("human", "ai") or "." not in key:
                raise ValueError(f"Override key must start with human. or ai.: {key}")
        return self

    @property
    def case(self) -> str:
        return case_label(self.human_case, self.ai_case)

    def with_case(self, label: str) -> "ScenarioConfig":
        human_case, ai_case = parse_case(label)
        return self.model_copy(update={"human_case": human_case, "ai_case": ai_case})


def scenario_for(
    environment: Union[str, EnvironmentKind],
    family: Union[str, Family],
    label: str,
    settings: Optional[SimulatorConfig] = None,
    seed: int = 0,
) -> ScenarioConfig:
    """ScenarioConfig from CLI-style names, mapping bad values to ConfigError."""
    human_case, ai_case = parse_case(label)
    try:
        return ScenarioConfig(
            environment=EnvironmentKind(environment),
            family=Family(family),
            human_case=human_case,
            ai_case=ai_case,
            seed=seed,
            step_limit=settings.simulation.step_limit if settings else 300,
        )
    except ValueError as exc:
        raise ConfigError(f"Invalid scenario {environment}/{family}/{label}: {exc}") from exc
