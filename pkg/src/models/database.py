"""Database models for experiment run and episode storage."""

from contextlib import contextmanager
from datetime import datetime
from typing import Iterator

from sqlalchemy import (
    Boolean, Column, DateTime, Float, ForeignKey, Integer, JSON, String, Text,
    create_engine
)
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, relationship, sessionmaker

Base = declarative_base()


class ExperimentRun(Base):
    """One CLI invocation: training, evaluation, sweep or calibration."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(50), nullable=False, index=True)
    seed = Column(Integer, nullable=False)
    code_version = Column(String(50), nullable=False)
    status = Column(String(50), nullable=False, default="running")
    started_at = Column(DateTime, nullable=False, default=datetime.utcnow)
    completed_at = Column(DateTime)

    resolved_config = Column(JSON)
    output_paths = Column(JSON)  # name -> file path
    error_message = Column(Text)

    # Relationships
    episodes = relationship("EpisodeResult", back_populates="run")


class EpisodeResult(Base):
    """Outcome of a single simulated episode."""

    __tablename__ = "episode_results"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False)

    # Scenario
    environment = Column(String(50), nullable=False, index=True)
    family = Column(String(50), nullable=False, index=True)
    case = Column(String(10), nullable=False, index=True)  # e.g. "S/E"
    policy = Column(String(50), nullable=False)
    interval = Column(Integer)  # random manager only
    episode_index = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)

    # Outcome
    outcome = Column(String(20), nullable=False)  # goal / collision / timeout
    steps = Column(Integer, nullable=False)
    basic_changes = Column(Integer, nullable=False)
    sudden_changes = Column(Integer, nullable=False)
    reward = Column(Float, nullable=False)
    avoidable = Column(Boolean, nullable=False, default=False)
    delegation_trace = Column(JSON)

    timestamp = Column(DateTime, nullable=False, default=datetime.utcnow)

    # Relationships
    run = relationship("ExperimentRun", back_populates="episodes")


def create_tables(database_url: str) -> Engine:
    """Create the run and episode tables that are missing; returns the engine."""
    engine = create_engine(database_url)
    Base.metadata.create_all(engine)
    return engine


def get_session(database_url: str) -> Session:
    """Open a session on the run database; the caller closes it."""
    return sessionmaker(bind=create_engine(database_url))()


@contextmanager
def session_scope(database_url: str) -> Iterator[Session]:
    """Session for one run; commits on a clean exit and rolls back when the block raises."""
    session = get_session(database_url)
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()
