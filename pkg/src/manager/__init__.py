"""Initialize manager package."""

from .features import FEATURE_COUNT, FEATURE_NAMES, context_features, resize_observation
from .network import (
    CHECKPOINT_VERSION,
    NUM_ACTIONS,
    ManagerArchitecture,
    ManagerNetwork,
    load_checkpoint,
    q_values,
    save_checkpoint,
)
from .policies import (
    DelegationPolicy,
    GreedyManagerPolicy,
    LinearEpsilon,
    RandomIntervalPolicy,
    ScriptedPolicy,
    random_manager,
    select_delegation,
)
from .replay import ReplayBuffer
from .rewards import AGENT_NAMES, AI, HUMAN, DelegationTrace, episode_reward, recount_changes
from .trainer import LEARNING_CURVE_COLUMNS, DQNTrainer, TrainingSettings

__all__ = [
    "FEATURE_COUNT",
    "FEATURE_NAMES",
    "context_features",
    "resize_observation",
    "CHECKPOINT_VERSION",
    "NUM_ACTIONS",
    "ManagerArchitecture",
    "ManagerNetwork",
    "load_checkpoint",
    "q_values",
    "save_checkpoint",
    "DelegationPolicy",
    "GreedyManagerPolicy",
    "LinearEpsilon",
    "RandomIntervalPolicy",
    "ScriptedPolicy",
    "random_manager",
    "select_delegation",
    "ReplayBuffer",
    "AGENT_NAMES",
    "AI",
    "HUMAN",
    "DelegationTrace",
    "episode_reward",
    "recount_changes",
    "LEARNING_CURVE_COLUMNS",
    "DQNTrainer",
    "TrainingSettings",
]
