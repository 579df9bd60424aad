"""Episode fan-out for evaluations and random-manager sweeps."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field, model_validator

from ..errors import ConfigError
from ..manager.network import ManagerArchitecture, load_checkpoint
from ..manager.policies import DelegationPolicy, GreedyManagerPolicy, ScriptedPolicy, random_manager
from ..manager.rewards import AI, HUMAN
from ..models import ExperimentRepository
from ..routing.network import EnvironmentKind
from ..scenario.builder import Scenario, build_scenario
from ..scenario.config import CASE_LABELS, Family, ScenarioConfig, SimulatorConfig, scenario_for
from ..scenario.simulation import oracle_policy, run_episode
from ..utils.seeding import derive_seed

logger = logging.getLogger(__name__)


class PolicyKind(str, Enum):
    MANAGER = "manager"
    HUMAN = "human"
    AI = "ai"
    ORACLE = "oracle"
    RANDOM = "random"


class PolicySpec(BaseModel):
    """Picklable description of a delegation policy, rebuilt inside each worker."""

    kind: PolicyKind
    checkpoint: Optional[str] = None
    interval: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "PolicySpec":
        if self.kind == PolicyKind.MANAGER and not self.checkpoint:
            raise ValueError("The manager policy needs a checkpoint")
        if self.kind == PolicyKind.RANDOM and self.interval is None:
            raise ValueError("The random manager needs an interval")
        return self

    @property
    def label(self) -> str:
        return f"random_{self.interval}" if self.kind == PolicyKind.RANDOM else self.kind.value


@dataclass(frozen=True)
class EpisodeJob:
    index: int
    seed: int
    config: ScenarioConfig
    policy: PolicySpec


@lru_cache(maxsize=32)
def _scenario(settings_json: str, config_json: str) -> Scenario:
    settings = SimulatorConfig.model_validate_json(settings_json)
    return build_scenario(ScenarioConfig.model_validate_json(config_json), settings)


@lru_cache(maxsize=4)
def _manager(checkpoint: str, architecture_json: str) -> GreedyManagerPolicy:
    architecture = ManagerArchitecture.model_validate_json(architecture_json)
    return GreedyManagerPolicy(load_checkpoint(checkpoint, architecture))


def make_policy(spec: PolicySpec, config: ScenarioConfig, settings: SimulatorConfig) -> DelegationPolicy:
    """Instantiate a delegation policy for one scenario."""
    if spec.kind == PolicyKind.MANAGER:
        return _manager(spec.checkpoint, settings.manager.model_dump_json())
    if spec.kind == PolicyKind.HUMAN:
        return ScriptedPolicy(HUMAN)
    if spec.kind == PolicyKind.AI:
        return ScriptedPolicy(AI)
    if spec.kind == PolicyKind.ORACLE:
        return oracle_policy(config)
    return random_manager(spec.interval)


def _run_job(settings_json: str, job: EpisodeJob) -> Dict[str, Any]:
    settings = SimulatorConfig.model_validate_json(settings_json)
    scenario = _scenario(settings_json, job.config.model_dump_json())
    record = run_episode(scenario, make_policy(job.policy, job.config, settings), job.seed)
    row = record.to_row()
    row.update(
        {
            "episode_index": job.index,
            "policy": job.policy.label,
            "interval": job.policy.interval,
            "delegation_trace": list(record.delegation),
        }
    )
    return row


class EvaluationOrchestrator:
    """Runs episode jobs, optionally in a process pool, and stores the results."""

    def __init__(
        self,
        settings: SimulatorConfig,
        workers: int = 1,
        repository: Optional[ExperimentRepository] = None,
        run_id: Optional[int] = None,
    ):
        if workers < 1:
            raise ConfigError(f"workers must be at least 1, got {workers}")
        self.settings = settings
        self.workers = workers
        self.repository = repository
        self.run_id = run_id

    def jobs_for(
        self,
        environment: Union[str, EnvironmentKind],
        family: Union[str, Family],
        policies: Sequence[PolicySpec],
        episodes: int,
        seed: int,
        cases: Sequence[str] = tuple(CASE_LABELS),
    ) -> List[EpisodeJob]:
        """Episodes for every (case, policy) cell; seed_i derives from (seed, i) over the job index."""
        jobs: List[EpisodeJob] = []
        for label in cases:
            config = scenario_for(environment, family, label, self.settings)
            for policy in policies:
                for _ in range(episodes):
                    index = len(jobs)
                    jobs.append(EpisodeJob(index, derive_seed(seed, index), config, policy))
        return jobs

    def run(
        self,
        jobs: Sequence[EpisodeJob],
        on_result: Optional[Callable[[Dict[str, Any]], None]] = None,
    ) -> List[Dict[str, Any]]:
        """Run jobs and return rows ordered by job index."""
        settings_json = self.settings.model_dump_json()
        rows: List[Dict[str, Any]] = []
        if self.workers == 1 or len(jobs) <= 1:
            for job in jobs:
                rows.append(self._collect(_run_job(settings_json, job), on_result))
        else:
            logger.info("Running %d episodes on %d workers", len(jobs), self.workers)
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                chunksize = max(1, len(jobs) // (self.workers * 4))
                results = executor.map(_run_job, [settings_json] * len(jobs), jobs, chunksize=chunksize)
                for row in results:
                    rows.append(self._collect(row, on_result))
        rows.sort(key=lambda r: r["episode_index"])
        if self.repository is not None and self.run_id is not None and rows:
            self.repository.save_episodes([self._episode_data(row) for row in rows])
        return rows

    def _collect(self, row: Dict[str, Any], on_result) -> Dict[str, Any]:
        if on_result is not None:
            on_result(row)
        return row

    def _episode_data(self, row: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "environment": row["environment"],
            "family": row["family"],
            "case": row["case"],
            "policy": row["policy"],
            "interval": row["interval"],
            "episode_index": row["episode_index"],
            "seed": row["seed"],
            "outcome": row["outcome"],
            "steps": row["steps"],
            "basic_changes": row["basic_changes"],
            "sudden_changes": row["sudden_changes"],
            "reward": row["reward"],
            "avoidable": row["avoidable"],
            "delegation_trace": row["delegation_trace"],
        }
