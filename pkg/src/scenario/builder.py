"""Scenario construction: map, cars, sensing profiles and conflict timing."""

import copy
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

from data.scenarios import (
    CONFLICT_VEHICLE,
    CONFLICT_VEHICLE_FOG_BAND,
    FOG_BAND_WEIGHTS,
    get_case_parameters,
    get_noise_spec,
)

from ..driver.params import DriverParams
from ..driver.policy import CLEAR, decide_acceleration
from ..errors import ConfigError, InvalidArgumentError, NoPathError
from ..perception.pipeline import DriverPerception
from ..perception.profiles import (
    DEFAULT_FOG_COLOR,
    FogParams,
    Mask,
    NightParams,
    NoiseBound,
    NoiseParams,
    SensingProfile,
)
from ..routing.layout import build_static_entities, map_viewport
from ..routing.network import RoadNetwork, build_network
from ..routing.paths import Path, path_crossings, shortest_path
from ..routing.tracking import planned_speed
from ..world.render import TopDownRenderer, Viewport
from ..world.state import CarKinematics, Entity, EntityKind, WorldState
from .config import (
    BACKGROUND_ID,
    EXTRA_ID_START,
    MANAGED_ID,
    EnvironmentSettings,
    ScenarioConfig,
    SimulatorConfig,
)

logger = logging.getLogger(__name__)

MAX_NOMINAL_STEPS = 10000


@dataclass(frozen=True)
class ConflictSchedule:
    """Where and when the managed and background cars meet under nominal driving."""

    managed_crossing: float
    background_crossing: float
    background_offset: float
    managed_arrival: float
    background_arrival: float

    @property
    def arrival_gap(self) -> float:
        return abs(self.managed_arrival - self.background_arrival)


@dataclass
class Scenario:
    """Everything an episode needs, built once per scenario config."""

    config: ScenarioConfig
    settings: SimulatorConfig
    network: RoadNetwork
    world: WorldState
    paths: Dict[int, Path]
    human_profile: SensingProfile
    ai_profile: SensingProfile
    schedule: ConflictSchedule
    viewport: Viewport
    renderer: TopDownRenderer
    crossing_pairs: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def managed_id(self) -> int:
        return MANAGED_ID

    @property
    def environment(self) -> EnvironmentSettings:
        return self.settings.environment(self.config.environment)

    @property
    def driver(self) -> DriverParams:
        return self.settings.driver

    @property
    def step_limit(self) -> int:
        return self.config.step_limit

    def perception(self, profile: SensingProfile) -> DriverPerception:
        return DriverPerception(profile, self.environment.car_half_extent, self.settings.perception.detection)


def nominal_travel(
    path: Path,
    start: float,
    initial_speed: float,
    params: DriverParams,
    dt: float,
    max_speed: float,
    distance: Optional[float] = None,
    duration: Optional[float] = None,
) -> Tuple[float, float]:
    """Unobstructed longitudinal run along a path: (time, distance covered).

    Stops once `distance` is covered or `duration` has elapsed, whichever is given.
    """
    if (distance is None) == (duration is None):
        raise ValueError("Give exactly one of distance or duration")
    s, speed, t = start, initial_speed, 0.0
    limits = params.speed_limits()
    for _ in range(MAX_NOMINAL_STEPS):
        if distance is not None and s - start >= distance:
            break
        if duration is not None and t >= duration - 1e-9:
            break
        target = planned_speed(path, s, params.planning_decel, limits)
        accel = decide_acceleration(
            CarKinematics(speed=speed), CLEAR, path.segment_kind_at(s), params, target, dt
        )
        speed = min(max(speed + accel * dt, 0.0), max_speed)
        s += speed * dt
        t += dt
    else:
        raise ConfigError(f"Nominal run did not finish within {MAX_NOMINAL_STEPS} steps")
    return t, s - start


def solve_conflict_schedule(
    managed: Path,
    background: Path,
    managed_speed: float,
    background_speed: float,
    params: DriverParams,
    dt: float,
    max_speed: float,
    tolerance: float = 0.5,
) -> ConflictSchedule:
    """Background start offset making both nominal arrivals at the crossing coincide."""
    crossings = path_crossings(managed, background)
    if not crossings:
        raise ConfigError("Managed and background routes never cross")
    s_managed, s_background = crossings[0]
    t_managed, _ = nominal_travel(managed, 0.0, managed_speed, params, dt, max_speed, distance=s_managed)

    offset = 0.0
    for _ in range(5):
        _, covered = nominal_travel(background, offset, background_speed, params, dt, max_speed, duration=t_managed)
        updated = s_background - covered
        if abs(updated - offset) < 1e-6:
            break
        offset = updated
    if offset < 0.0:
        raise ConfigError(
            f"Background arm too short: needs {s_background - offset:.1f} m before the crossing, has {s_background:.1f} m"
        )
    t_background, _ = nominal_travel(
        background, offset, background_speed, params, dt, max_speed, distance=s_background - offset
    )
    schedule = ConflictSchedule(s_managed, s_background, offset, t_managed, t_background)
    if schedule.arrival_gap > tolerance:
        raise ConfigError(
            f"Nominal arrivals differ by {schedule.arrival_gap:.2f} s (tolerance {tolerance} s)"
        )
    logger.debug(
        "Conflict at s=%.1f/%.1f, background offset %.1f m, arrivals %.1f/%.1f s",
        s_managed, s_background, offset, t_managed, t_background,
    )
    return schedule


def _fog_band(color, fog_color) -> List[List[int]]:
    return [
        [int(round(w * c + (1.0 - w) * f)) for c, f in zip(color, fog_color)]
        for w in FOG_BAND_WEIGHTS
    ]


def _resolve_colors(colors: List[Any], conflict_color, fog_color) -> List[Tuple[int, int, int]]:
    resolved: List[Tuple[int, int, int]] = []
    for color in colors:
        if color == CONFLICT_VEHICLE:
            resolved.append(tuple(conflict_color))
        elif color == CONFLICT_VEHICLE_FOG_BAND:
            resolved.extend(tuple(c) for c in _fog_band(conflict_color, fog_color))
        else:
            resolved.append(tuple(int(c) for c in color))
    return resolved


def _apply_override(params: Dict[str, Any], axis: str, value: float, key: str) -> None:
    if axis == "area_fraction":
        if not params["masks"]:
            raise ConfigError(f"Override {key}: this side carries no masks")
        for mask in params["masks"]:
            mask["area_fraction"] = value
    elif axis == "color_tolerance":
        if params["color"] is None:
            raise ConfigError(f"Override {key}: this side carries no color sensitivity")
        params["color"]["tolerance"] = value
    elif "." in axis:
        context, name = axis.split(".", 1)
        if context not in ("fog", "night") or params.get(context) is None:
            raise ConfigError(f"Override {key}: this side carries no {context} context")
        params[context][name] = value
    else:
        raise ConfigError(f"Unknown override: {key}")


def build_profile(
    config: ScenarioConfig,
    side: str,
    settings: SimulatorConfig,
    conflict_color,
) -> SensingProfile:
    """Sensing profile of one driver for the configured family and case."""
    case = config.human_case if side == "human" else config.ai_case
    try:
        params = get_case_parameters(config.family.value, side, case.value)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    params = copy.deepcopy(params)
    for key, value in config.overrides.items():
        key_side, axis = key.split(".", 1)
        if key_side == side:
            _apply_override(params, axis, value, key)

    noise = None
    if side == "human":
        spec = get_noise_spec(config.family.value, case.value)
        if spec is not None:
            noise = NoiseParams(bounds={k: NoiseBound(**v) for k, v in spec.items()})

    try:
        fog = FogParams(**params["fog"]) if params["fog"] else None
        color_sensitivity, tolerance = None, 0.0
        if params["color"]:
            fog_color = fog.fog_color if fog else DEFAULT_FOG_COLOR
            color_sensitivity = _resolve_colors(params["color"]["error_colors"], conflict_color, fog_color)
            tolerance = params["color"]["tolerance"]
        return SensingProfile(
            ranges=settings.perception.ranges,
            masks=[Mask(**m) for m in params["masks"]],
            fog=fog,
            night=NightParams(**params["night"]) if params["night"] else None,
            color_sensitivity=color_sensitivity,
            color_tolerance=tolerance,
            noise=noise,
            image_resolution=settings.perception.image_resolution,
        )
    except ValueError as exc:
        raise ConfigError(f"Invalid {side} parameters for {config.family.value}/{case.value}: {exc}") from exc


def _car(entity_id: int, path: Path, s: float, half_extent, color) -> Entity:
    return Entity(
        id=entity_id,
        kind=EntityKind.CAR,
        center=path.point_at(s),
        heading=path.heading_at(s),
        half_extent=tuple(half_extent),
        color=tuple(color),
        movable=True,
    )


def build_scenario(config: ScenarioConfig, settings: Optional[SimulatorConfig] = None) -> Scenario:
    """Map, cars, profiles and conflict schedule for one case-matrix cell."""
    settings = settings or SimulatorConfig()
    env = settings.environment(config.environment)
    sim = settings.simulation
    params = settings.driver
    network = build_network(config.environment, env.layout)

    try:
        managed_path = shortest_path(network, env.managed.start_node, env.managed.goal_node)
        background_path = shortest_path(network, env.background.start_node, env.background.goal_node)
        extra_paths = [shortest_path(network, v.start_node, v.goal_node) for v in env.extra_traffic]
    except (InvalidArgumentError, NoPathError) as exc:
        raise ConfigError(f"Invalid route in {config.environment.value}: {exc}") from exc

    schedule = solve_conflict_schedule(
        managed_path,
        background_path,
        env.managed.initial_speed,
        env.background.initial_speed,
        params,
        sim.dt,
        sim.max_speed,
        env.arrival_tolerance,
    )

    cars = [
        _car(MANAGED_ID, managed_path, 0.0, env.car_half_extent, env.managed.color),
        _car(BACKGROUND_ID, background_path, schedule.background_offset, env.car_half_extent, env.background.color),
    ]
    paths = {MANAGED_ID: managed_path, BACKGROUND_ID: background_path}
    speeds = {MANAGED_ID: env.managed.initial_speed, BACKGROUND_ID: env.background.initial_speed}
    for i, (vehicle, path) in enumerate(zip(env.extra_traffic, extra_paths)):
        car_id = EXTRA_ID_START + i
        if vehicle.spawn_offset >= path.length:
            raise ConfigError(f"Extra vehicle {car_id} spawns past its goal")
        cars.append(_car(car_id, path, vehicle.spawn_offset, env.car_half_extent, vehicle.color))
        paths[car_id] = path
        speeds[car_id] = vehicle.initial_speed

    static = build_static_entities(env.layout)
    world = WorldState(
        entities=tuple(static) + tuple(cars),
        car_kinematics={car_id: CarKinematics(speed=speed) for car_id, speed in speeds.items()},
        dt=sim.dt,
    )
    viewport = map_viewport(env.layout)
    renderer = TopDownRenderer(static, viewport, sim.meters_per_pixel)

    background_ids = sorted(car_id for car_id in paths if car_id != MANAGED_ID)
    crossing_pairs = [
        (a, b) for a, b in combinations(background_ids, 2) if path_crossings(paths[a], paths[b])
    ]

    scenario = Scenario(
        config=config,
        settings=settings,
        network=network,
        world=world,
        paths=paths,
        human_profile=build_profile(config, "human", settings, env.background.color),
        ai_profile=build_profile(config, "ai", settings, env.background.color),
        schedule=schedule,
        viewport=viewport,
        renderer=renderer,
        crossing_pairs=crossing_pairs,
    )
    logger.info(
        "Built %s/%s %s scenario (background offset %.1f m)",
        config.environment.value, config.family.value, config.case, schedule.background_offset,
    )
    return scenario

