"""Gymnasium environment around the delegation episode loop."""

import logging
from typing import Any, Dict, Optional, Sequence

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from ..errors import InvalidArgumentError
from ..manager.features import FEATURE_COUNT
from .builder import Scenario
from .simulation import EpisodeSimulation, Observation, Outcome

logger = logging.getLogger(__name__)


class DelegationEnv(gym.Env):
    """The manager's MDP: observe both drivers, pick one, receive the episode reward at the end.

    Each reset samples one of the given scenarios uniformly, so a list of the
    four case-matrix cells trains the manager on all of them.
    """

    metadata = {"render_modes": ["rgb_array"]}

    def __init__(self, scenarios: Sequence[Scenario], render_mode: Optional[str] = None):
        if not scenarios:
            raise InvalidArgumentError("DelegationEnv needs at least one scenario")
        self.scenarios = list(scenarios)
        self.render_mode = render_mode
        size = self.scenarios[0].settings.manager.input_size
        image = spaces.Box(low=0, high=255, shape=(size, size, 3), dtype=np.uint8)
        self.observation_space = spaces.Dict(
            {
                "human": image,
                "ai": image,
                "features": spaces.Box(low=-1.0, high=1.0, shape=(FEATURE_COUNT,), dtype=np.float32),
            }
        )
        self.action_space = spaces.Discrete(2)
        self.simulation: Optional[EpisodeSimulation] = None
        self._observation: Optional[Observation] = None

    @property
    def scenario(self) -> Optional[Scenario]:
        return self.simulation.scenario if self.simulation is not None else None

    def reset(self, seed: Optional[int] = None, options: Optional[Dict[str, Any]] = None):
        super().reset(seed=seed)
        options = options or {}
        index = options.get("scenario_index")
        if index is None:
            index = int(self.np_random.integers(0, len(self.scenarios)))
        episode_seed = int(options.get("episode_seed", self.np_random.integers(0, 2**32)))
        self.simulation = EpisodeSimulation(self.scenarios[index], episode_seed)
        self._observation = self.simulation.observe()
        return self._observation, {"case": self.simulation.scenario.config.case, "seed": episode_seed}

    def step(self, action):
        if self.simulation is None or self.simulation.done:
            raise InvalidArgumentError("Call reset() before step()")
        if not self.action_space.contains(int(action)):
            raise InvalidArgumentError(f"Invalid delegation action: {action}")
        outcome = self.simulation.advance(int(action))
        info: Dict[str, Any] = {"step": self.simulation.step_index}
        if outcome is None:
            self._observation = self.simulation.observe()
            return self._observation, 0.0, False, False, info

        record = self.simulation.record()
        info["record"] = record
        truncated = outcome == Outcome.TIMEOUT
        return self._observation, float(record.reward), not truncated, truncated, info

    def render(self):
        if self.simulation is None:
            return None
        return self.simulation.scenario.renderer.render(self.simulation.state)
