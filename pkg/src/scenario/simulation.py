"""Episode loop: render, perceive, delegate, drive, step, check outcome."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..driver.policy import (
    ObserverRole,
    VehicleView,
    assign_right_of_way,
    background_visibility_filter,
    drive,
)
from ..errors import InvalidArgumentError
from ..manager.features import context_features, resize_observation
from ..manager.policies import DelegationPolicy, ScriptedPolicy
from ..manager.rewards import AI, HUMAN, DelegationTrace, episode_reward
from ..perception.detection import sample_noisy_params
from ..perception.pipeline import PerceptionResult
from ..routing.tracking import PathTracker
from ..utils.seeding import episode_streams
from ..world.dynamics import detect_collisions, step_world
from ..world.geometry import wrap_angle
from ..world.state import Entity, EntityKind
from .builder import Scenario
from .config import Case, ScenarioConfig

logger = logging.getLogger(__name__)

Observation = Dict[str, np.ndarray]
FrameCallback = Callable[[int, Dict[str, np.ndarray]], None]


class Outcome(str, Enum):
    GOAL = "goal"
    COLLISION = "collision"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class EpisodeRecord:
    """Result of one episode."""

    outcome: Outcome
    steps: int
    sudden_changes: int
    basic_changes: int
    reward: float
    avoidable: bool
    delegation: Tuple[int, ...]
    case: str
    seed: int
    environment: str = ""
    family: str = ""

    def __post_init__(self):
        if self.avoidable and self.outcome != Outcome.COLLISION:
            raise InvalidArgumentError("Only collisions can be avoidable")

    def to_row(self) -> Dict[str, object]:
        return {
            "environment": self.environment,
            "family": self.family,
            "case": self.case,
            "seed": self.seed,
            "outcome": self.outcome.value,
            "steps": self.steps,
            "basic_changes": self.basic_changes,
            "sudden_changes": self.sudden_changes,
            "reward": self.reward,
            "avoidable": self.avoidable,
        }


def classify_avoidable(record: Union[EpisodeRecord, Outcome, str], config: ScenarioConfig) -> bool:
    """A collision is avoidable when at least one driver had error-free parameters."""
    outcome = Outcome(record.outcome if isinstance(record, EpisodeRecord) else record)
    return outcome == Outcome.COLLISION and Case.SUCCESS in (config.human_case, config.ai_case)


def oracle_agent(config: ScenarioConfig) -> int:
    """The agent an all-knowing manager would pick: a success side, human first."""
    if config.human_case == Case.SUCCESS:
        return HUMAN
    if config.ai_case == Case.SUCCESS:
        return AI
    return HUMAN


def oracle_policy(config: ScenarioConfig) -> ScriptedPolicy:
    return ScriptedPolicy(oracle_agent(config))


class EpisodeSimulation:
    """One episode of a scenario, advanced one delegation decision at a time."""

    def __init__(self, scenario: Scenario, seed: int):
        self.scenario = scenario
        self.seed = int(seed)
        human_rng, ai_rng, noise_rng, policy_rng = episode_streams(self.seed, 4)
        self._rngs = {HUMAN: human_rng, AI: ai_rng}
        self.policy_rng = policy_rng

        self.state = scenario.world
        self.params = scenario.driver
        self.managed_id = scenario.managed_id
        self.trackers: Dict[int, PathTracker] = {
            car_id: PathTracker(path, self.params.goal_threshold) for car_id, path in scenario.paths.items()
        }
        for car in self.state.cars():
            self.trackers[car.id].update(car)

        self.perceptions = {
            HUMAN: scenario.perception(scenario.human_profile),
            AI: scenario.perception(scenario.ai_profile),
        }
        # perturbed severity parameters, drawn once per episode, only reach the manager
        self.manager_profile = None
        if scenario.human_profile.noise is not None:
            values = sample_noisy_params(
                scenario.human_profile.severity_values(), scenario.human_profile.noise, noise_rng
            )
            self.manager_profile = scenario.human_profile.manager_view(values)

        self.trace = DelegationTrace()
        self.outcome: Optional[Outcome] = None
        self.frames: Dict[str, np.ndarray] = {}
        self._results: Optional[Dict[int, PerceptionResult]] = None

    @property
    def done(self) -> bool:
        return self.outcome is not None

    @property
    def step_index(self) -> int:
        return self.trace.steps

    def managed_car(self) -> Entity:
        return self.state.entity(self.managed_id)

    def observe(self) -> Observation:
        """Render the world, run both drivers' perception and build the manager's observation."""
        if self.done:
            raise InvalidArgumentError("Episode is over")
        scenario = self.scenario
        base = scenario.renderer.render(self.state)
        car = self.managed_car()
        others = list(self.state.cars())
        mpp = scenario.settings.simulation.meters_per_pixel
        human = self.perceptions[HUMAN].perceive(
            base, scenario.viewport, mpp, car, others, self._rngs[HUMAN], self.manager_profile
        )
        ai = self.perceptions[AI].perceive(base, scenario.viewport, mpp, car, others, self._rngs[AI])
        self._results = {HUMAN: human, AI: ai}
        self.frames = {"world": base, "human": human.image, "ai": ai.image}

        goal = scenario.paths[self.managed_id].goal
        dx, dy = goal.x - car.center.x, goal.y - car.center.y
        features = context_features(
            self.manager_profile or scenario.human_profile,
            scenario.ai_profile,
            math.hypot(dx, dy),
            wrap_angle(math.atan2(dy, dx) - car.heading),
            self.state.kinematics(self.managed_id).speed,
            self.trace.current,
        )
        size = scenario.settings.manager.input_size
        return {
            "human": resize_observation(human.manager_image, size),
            "ai": resize_observation(ai.manager_image, size),
            "features": features,
        }

    def _view(self, car: Entity) -> VehicleView:
        tracker = self.trackers[car.id]
        return VehicleView(car, self.state.kinematics(car.id), tracker.path, tracker.progress)

    def _controls(self, car: Entity, detected: List[VehicleView], right_of_way=None, always_yield=False):
        accel, _ = drive(
            self._view(car), detected, self.params, right_of_way, always_yield, self.state.dt
        )
        steering = self.trackers[car.id].steering(
            car, self.state.kinematics(car.id), self.params.lookahead, self.params.recovery_distance
        )
        return accel, steering

    def advance(self, agent: int) -> Optional[Outcome]:
        """Apply one delegation decision and step the world; returns the outcome once terminal."""
        if self.done:
            raise InvalidArgumentError("Episode is over")
        if self._results is None:
            self.observe()
        self.trace.append(agent)
        cars = {car.id: car for car in self.state.cars()}

        controls: Dict[int, Tuple[float, float]] = {}
        managed = cars[self.managed_id]
        detected = [
            self._view(cars[car_id])
            for car_id in sorted(self._results[agent].detected)
            if car_id in cars and car_id != self.managed_id
        ]
        controls[self.managed_id] = self._controls(managed, detected, always_yield=True)

        background_ids = sorted(car_id for car_id in cars if car_id != self.managed_id)
        pairs = [(a, b) for a, b in self.scenario.crossing_pairs if a in cars and b in cars]
        right_of_way = assign_right_of_way(background_ids, pairs, self.managed_id)
        for car_id in background_ids:
            visible = background_visibility_filter(ObserverRole.BACKGROUND, cars.values(), self.managed_id)
            others = [self._view(other) for other in visible if other.id != car_id]
            controls[car_id] = self._controls(cars[car_id], others, right_of_way)

        self.state = step_world(self.state, controls, self.scenario.settings.simulation.max_speed)
        self._results = None
        for car in list(self.state.cars()):
            tracker = self.trackers[car.id]
            tracker.update(car)
            if car.id != self.managed_id and tracker.reached_goal(car):
                logger.debug("Car %s reached its goal and leaves the map", car.id)
                self.state = self.state.without(car.id)

        self.outcome = self._check_outcome()
        return self.outcome

    def _check_outcome(self) -> Optional[Outcome]:
        for a, b in detect_collisions(self.state):
            if self.managed_id not in (a, b):
                continue
            other = self.state.entity(b if a == self.managed_id else a)
            if other.kind in (EntityKind.CAR, EntityKind.BUILDING):
                return Outcome.COLLISION
        if self.trackers[self.managed_id].reached_goal(self.managed_car()):
            return Outcome.GOAL
        if self.trace.steps >= self.scenario.step_limit:
            return Outcome.TIMEOUT
        return None

    def record(self) -> EpisodeRecord:
        if not self.done:
            raise InvalidArgumentError("Episode is still running")
        config = self.scenario.config
        basic, sudden = self.trace.counts()
        return EpisodeRecord(
            outcome=self.outcome,
            steps=self.trace.steps,
            sudden_changes=sudden,
            basic_changes=basic,
            reward=episode_reward(self.outcome == Outcome.GOAL, self.trace.steps, sudden),
            avoidable=classify_avoidable(self.outcome, config),
            delegation=tuple(self.trace.agents),
            case=config.case,
            seed=self.seed,
            environment=config.environment.value,
            family=config.family.value,
        )


def run_episode(
    scenario: Scenario,
    policy: DelegationPolicy,
    seed: int,
    on_frame: Optional[FrameCallback] = None,
) -> EpisodeRecord:
    """Run one episode to its outcome under a delegation policy."""
    simulation = EpisodeSimulation(scenario, seed)
    policy.reset(simulation.policy_rng)
    while not simulation.done:
        step = simulation.step_index
        observation = simulation.observe()
        if on_frame is not None:
            on_frame(step, simulation.frames)
        simulation.advance(policy.select(observation, step))
    record = simulation.record()
    logger.debug("Episode seed=%s case=%s: %s after %d steps", seed, record.case, record.outcome.value, record.steps)
    return record
