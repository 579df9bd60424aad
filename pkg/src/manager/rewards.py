"""Episode reward and delegation-change accounting."""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from ..errors import InvalidArgumentError

HUMAN = 0
AI = 1
AGENT_NAMES = {HUMAN: "human", AI: "ai"}

GOAL_REWARD = 100.0
FAILURE_REWARD = -100.0


def episode_reward(goal_reached: bool, steps: int, sudden_changes: int) -> float:
    """Terminal reward: +100 on reaching the goal, -100 otherwise, less steps and sudden changes."""
    if steps < 0 or sudden_changes < 0:
        raise InvalidArgumentError(f"Counts must be non-negative, got steps={steps}, sudden={sudden_changes}")
    base = GOAL_REWARD if goal_reached else FAILURE_REWARD
    return base - steps - sudden_changes


def recount_changes(sequence: Sequence[int]) -> Tuple[int, int]:
    """(basic, sudden) delegation changes; a sudden change is an A->B->A pattern."""
    if len(sequence) == 0:
        raise InvalidArgumentError("Delegation sequence is empty")
    basic = sum(1 for t in range(1, len(sequence)) if sequence[t] != sequence[t - 1])
    sudden = sum(
        1
        for t in range(1, len(sequence) - 1)
        if sequence[t - 1] != sequence[t] and sequence[t] != sequence[t + 1] and sequence[t + 1] == sequence[t - 1]
    )
    return basic, sudden


@dataclass
class DelegationTrace:
    """Per-step delegated agent with running change counts."""

    agents: List[int] = field(default_factory=list)

    def append(self, agent: int) -> None:
        if agent not in AGENT_NAMES:
            raise InvalidArgumentError(f"Unknown agent: {agent}")
        self.agents.append(int(agent))

    @property
    def steps(self) -> int:
        return len(self.agents)

    @property
    def current(self) -> int:
        return self.agents[-1] if self.agents else HUMAN

    def counts(self) -> Tuple[int, int]:
        if not self.agents:
            return 0, 0
        return recount_changes(self.agents)

    @property
    def basic_changes(self) -> int:
        return self.counts()[0]

    @property
    def sudden_changes(self) -> int:
        return self.counts()[1]

    def labels(self) -> List[str]:
        return [AGENT_NAMES[a] for a in self.agents]
