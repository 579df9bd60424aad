"""Terminal-reward deep Q-learning for the delegation manager."""

import copy
import logging
import math
from typing import Callable, List, Optional

import gymnasium as gym
import numpy as np
import pandas as pd
import torch
import torch.nn.functional as F
from pydantic import BaseModel, Field

from ..errors import TrainingDivergedError
from .network import ManagerNetwork, q_values, to_tensor_features, to_tensor_images
from .policies import LinearEpsilon, select_delegation
from .replay import ReplayBuffer

logger = logging.getLogger(__name__)

LEARNING_CURVE_COLUMNS = ["episode", "reward", "epsilon", "loss"]


class TrainingSettings(BaseModel):
    """Q-learning hyperparameters."""

    episodes: int = Field(2000, ge=1)
    learning_rate: float = Field(1e-4, gt=0)
    discount: float = Field(0.99, gt=0, le=1)
    replay_capacity: int = Field(50_000, ge=2)
    batch_size: int = Field(64, ge=1)
    target_sync: int = Field(1000, ge=1, description="Gradient steps between target-network copies")
    epsilon_start: float = Field(1.0, ge=0, le=1)
    epsilon_end: float = Field(0.05, ge=0, le=1)
    epsilon_decay_fraction: float = Field(0.6, gt=0, le=1)
    train_every: int = Field(4, ge=1, description="Environment steps per gradient step")
    warmup: int = Field(500, ge=1, description="Transitions collected before learning starts")
    grad_clip: float = Field(1.0, gt=0)


class DQNTrainer:
    """Epsilon-greedy data collection, replay sampling and periodic target sync."""

    def __init__(
        self,
        net: ManagerNetwork,
        settings: TrainingSettings,
        seed: int = 0,
        device: str = "cpu",
    ):
        self.net = net.to(device)
        self.settings = settings
        self.device = torch.device(device)
        self.target = copy.deepcopy(net).to(device)
        self.target.eval()
        self.optimizer = torch.optim.Adam(self.net.parameters(), lr=settings.learning_rate)
        arch = net.architecture
        self.buffer = ReplayBuffer(settings.replay_capacity, arch.input_size, arch.feature_count)
        self.rng = np.random.default_rng(seed)
        torch.manual_seed(seed)
        self.epsilon = LinearEpsilon(
            settings.epsilon_start,
            settings.epsilon_end,
            max(1, int(round(settings.epsilon_decay_fraction * settings.episodes))),
        )
        self.env_steps = 0
        self.gradient_steps = 0

    def sync_target(self) -> None:
        self.target.load_state_dict(self.net.state_dict())

    def optimize(self) -> float:
        batch = self.buffer.sample(self.settings.batch_size, self.rng)
        device = self.device
        human = to_tensor_images(batch["human"], device)
        ai = to_tensor_images(batch["ai"], device)
        features = to_tensor_features(batch["features"], device)
        actions = torch.as_tensor(batch["actions"], device=device)
        rewards = torch.as_tensor(batch["rewards"], device=device)
        dones = torch.as_tensor(batch["dones"], device=device, dtype=torch.float32)

        with torch.no_grad():
            next_q = self.target(
                to_tensor_images(batch["next_human"], device),
                to_tensor_images(batch["next_ai"], device),
                to_tensor_features(batch["next_features"], device),
            ).max(dim=1).values
            targets = rewards + self.settings.discount * (1.0 - dones) * next_q

        self.net.train()
        predicted = self.net(human, ai, features).gather(1, actions[:, None]).squeeze(1)
        loss = F.smooth_l1_loss(predicted, targets)
        if not torch.isfinite(loss):
            raise TrainingDivergedError(f"Non-finite loss at gradient step {self.gradient_steps}: {loss.item()}")
        self.optimizer.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(self.net.parameters(), self.settings.grad_clip)
        self.optimizer.step()
        self.gradient_steps += 1
        if self.gradient_steps % self.settings.target_sync == 0:
            self.sync_target()
        return float(loss.item())

    def run_episode(self, env: gym.Env, episode: int, seed: int):
        epsilon = self.epsilon(episode)
        observation, _ = env.reset(seed=seed)
        total, losses, done = 0.0, [], False
        while not done:
            q = q_values(self.net, observation["human"], observation["ai"], observation["features"])
            action = select_delegation(q, epsilon, self.rng)
            next_observation, reward, terminated, truncated, _ = env.step(action)
            done = terminated or truncated
            self.buffer.add(observation, action, reward, done)
            total += reward
            self.env_steps += 1
            if len(self.buffer) >= self.settings.warmup and self.env_steps % self.settings.train_every == 0:
                losses.append(self.optimize())
            observation = next_observation
        loss = float(np.mean(losses)) if losses else math.nan
        return total, epsilon, loss

    def train(
        self,
        env: gym.Env,
        episodes: Optional[int] = None,
        on_episode: Optional[Callable[[int, float, float, float], None]] = None,
    ) -> pd.DataFrame:
        """Train for the configured episodes and return the learning curve."""
        episodes = episodes or self.settings.episodes
        self.epsilon.decay_episodes = max(1, int(round(self.settings.epsilon_decay_fraction * episodes)))
        seeds = np.random.SeedSequence(int(self.rng.integers(2**32))).generate_state(episodes)
        rows: List[dict] = []
        for episode in range(episodes):
            reward, epsilon, loss = self.run_episode(env, episode, int(seeds[episode]))
            rows.append({"episode": episode, "reward": reward, "epsilon": epsilon, "loss": loss})
            if on_episode is not None:
                on_episode(episode, reward, epsilon, loss)
            if (episode + 1) % 100 == 0:
                recent = pd.DataFrame(rows[-100:])
                logger.info(
                    "Episode %d: mean reward %.1f, epsilon %.3f", episode + 1, recent["reward"].mean(), epsilon
                )
        self.net.eval()
        return pd.DataFrame(rows, columns=LEARNING_CURVE_COLUMNS)
