"""Delegation policies: greedy Q-network, scripted and random-interval managers."""

from dataclasses import dataclass
from typing import Dict, Optional, Protocol, Sequence

import numpy as np

from ..errors import InvalidArgumentError
from .network import ManagerNetwork, q_values
from .rewards import AI, HUMAN

Observation = Dict[str, np.ndarray]


def select_delegation(q: Sequence[float], epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy choice; greedy ties go to the lower index."""
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(0, 2))
    return int(np.argmax(np.asarray(q, dtype=float)))


@dataclass
class LinearEpsilon:
    """Linear anneal from `start` to `end` over `decay_episodes`, then constant."""

    start: float = 1.0
    end: float = 0.05
    decay_episodes: int = 1

    def __call__(self, episode: int) -> float:
        if episode >= self.decay_episodes:
            return self.end
        return self.start + (self.end - self.start) * episode / max(self.decay_episodes, 1)


class DelegationPolicy(Protocol):
    def reset(self, rng: np.random.Generator) -> None: ...

    def select(self, observation: Observation, step: int) -> int: ...


class GreedyManagerPolicy:
    """Argmax over the trained network's Q-values."""

    def __init__(self, net: ManagerNetwork):
        self.net = net
        self.net.eval()

    def reset(self, rng: np.random.Generator) -> None:
        pass

    def select(self, observation: Observation, step: int) -> int:
        q = q_values(self.net, observation["human"], observation["ai"], observation["features"])
        return select_delegation(q, 0.0, None)


class ScriptedPolicy:
    """Always delegates to one agent."""

    def __init__(self, agent: int):
        if agent not in (HUMAN, AI):
            raise InvalidArgumentError(f"Unknown agent: {agent}")
        self.agent = agent

    def reset(self, rng: np.random.Generator) -> None:
        pass

    def select(self, observation: Observation, step: int) -> int:
        return self.agent


class RandomIntervalPolicy:
    """Uniform choice at step 0 and every `interval` steps, held in between."""

    def __init__(self, interval: int, rng: Optional[np.random.Generator] = None):
        if interval < 1:
            raise InvalidArgumentError(f"interval must be at least 1, got {interval}")
        self.interval = interval
        self.rng = rng
        self._current = HUMAN

    def reset(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def is_decision_point(self, step: int) -> bool:
        return step % self.interval == 0

    def select(self, observation: Observation, step: int) -> int:
        if self.is_decision_point(step):
            if self.rng is None:
                raise InvalidArgumentError("Random manager needs a random generator")
            self._current = int(self.rng.integers(0, 2))
        return self._current


def random_manager(interval: int, rng: Optional[np.random.Generator] = None) -> RandomIntervalPolicy:
    return RandomIntervalPolicy(interval, rng)
