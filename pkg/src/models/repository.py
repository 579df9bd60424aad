"""Data access layer for experiment storage and retrieval."""

from datetime import datetime
from typing import Any, Dict, List, Optional

from sqlalchemy import Integer, cast, func
from sqlalchemy.orm import Session

from .database import EpisodeResult, ExperimentRun


class ExperimentRepository:
    """Repository for managing experiment data."""

    def __init__(self, session: Session):
        self.session = session

    def create_run(
        self,
        command: str,
        seed: int,
        code_version: str,
        resolved_config: Optional[Dict[str, Any]] = None,
    ) -> ExperimentRun:
        """Create a new experiment run."""
        run = ExperimentRun(
            command=command,
            seed=seed,
            code_version=code_version,
            started_at=datetime.utcnow(),
            status="running",
            resolved_config=resolved_config,
        )
        self.session.add(run)
        self.session.commit()
        return run

    def complete_run(self, run_id: int, output_paths: Optional[Dict[str, str]] = None):
        """Mark a run as completed."""
        run = self.session.query(ExperimentRun).filter_by(id=run_id).first()
        if run:
            run.completed_at = datetime.utcnow()
            run.status = "completed"
            run.output_paths = output_paths
            self.session.commit()

    def fail_run(self, run_id: int, error_message: str):
        """Mark a run as failed."""
        run = self.session.query(ExperimentRun).filter_by(id=run_id).first()
        if run:
            run.completed_at = datetime.utcnow()
            run.status = "failed"
            run.error_message = error_message
            self.session.commit()

    def save_episode(self, episode_data: Dict[str, Any]) -> EpisodeResult:
        """Save one episode result."""
        episode = EpisodeResult(**episode_data)
        self.session.add(episode)
        self.session.commit()
        return episode

    def save_episodes(self, episodes: List[Dict[str, Any]]) -> int:
        """Save many episode results in one transaction."""
        self.session.add_all(EpisodeResult(**data) for data in episodes)
        self.session.commit()
        return len(episodes)

    def get_case_summary(self, run_id: int) -> List[Dict[str, Any]]:
        """Aggregate outcomes per case for a run."""
        rows = (
            self.session.query(
                EpisodeResult.case,
                func.count(EpisodeResult.id).label("episodes"),
                func.sum(cast(EpisodeResult.avoidable, Integer)).label("avoidable_collisions"),
                func.avg(EpisodeResult.basic_changes).label("mean_basic"),
                func.avg(EpisodeResult.sudden_changes).label("mean_sudden"),
                func.avg(EpisodeResult.reward).label("mean_reward"),
            )
            .filter(EpisodeResult.run_id == run_id)
            .group_by(EpisodeResult.case)
            .order_by(EpisodeResult.case)
            .all()
        )
        return [
            {
                "case": row.case,
                "episodes": row.episodes,
                "avoidable_collisions": int(row.avoidable_collisions or 0),
                "mean_basic": float(row.mean_basic),
                "mean_sudden": float(row.mean_sudden),
                "mean_reward": float(row.mean_reward),
            }
            for row in rows
        ]

    def get_episodes(self, run_id: int, case: Optional[str] = None) -> List[EpisodeResult]:
        """Get episode results of a run, optionally for one case."""
        query = self.session.query(EpisodeResult).filter(EpisodeResult.run_id == run_id)
        if case:
            query = query.filter(EpisodeResult.case == case)
        return query.order_by(EpisodeResult.episode_index).all()

    def get_run(self, run_id: int) -> Optional[ExperimentRun]:
        return self.session.query(ExperimentRun).filter_by(id=run_id).first()
