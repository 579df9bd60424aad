"""Experience replay with preallocated frame storage."""

from typing import Dict

import numpy as np

from ..errors import InvalidArgumentError


class ReplayBuffer:
    """Ring buffer of sequential transitions.

    Transitions are stored in the order they happen, so the next observation of
    a non-terminal transition lives in the following slot; the newest slot is
    not sampled until its successor arrives.
    """

    def __init__(self, capacity: int, image_size: int, feature_count: int):
        if capacity < 2:
            raise InvalidArgumentError(f"capacity must be at least 2, got {capacity}")
        self.capacity = capacity
        shape = (capacity, image_size, image_size, 3)
        self.human = np.zeros(shape, dtype=np.uint8)
        self.ai = np.zeros(shape, dtype=np.uint8)
        self.features = np.zeros((capacity, feature_count), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.dones = np.zeros(capacity, dtype=bool)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, observation: Dict[str, np.ndarray], action: int, reward: float, done: bool) -> None:
        i = self._next
        self.human[i] = observation["human"]
        self.ai[i] = observation["ai"]
        self.features[i] = observation["features"]
        self.actions[i] = action
        self.rewards[i] = reward
        self.dones[i] = done
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _valid_indices(self) -> np.ndarray:
        indices = np.arange(self._size) if self._size < self.capacity else np.arange(self.capacity)
        newest = (self._next - 1) % self.capacity
        if not self.dones[newest]:
            indices = indices[indices != newest]
        return indices

    def sample(self, batch_size: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        valid = self._valid_indices()
        if valid.size == 0:
            raise InvalidArgumentError("Replay buffer holds no complete transitions")
        idx = rng.choice(valid, size=batch_size, replace=valid.size < batch_size)
        nxt = (idx + 1) % self.capacity
        return {
            "human": self.human[idx],
            "ai": self.ai[idx],
            "features": self.features[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "dones": self.dones[idx],
            "next_human": self.human[nxt],
            "next_ai": self.ai[nxt],
            "next_features": self.features[nxt],
        }
