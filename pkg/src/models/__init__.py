"""Initialize models package."""

from .database import (
    Base,
    ExperimentRun,
    EpisodeResult,
    create_tables,
    get_session,
    session_scope
)
from .repository import ExperimentRepository

__all__ = [
    "Base",
    "ExperimentRun",
    "EpisodeResult",
    "create_tables",
    "get_session",
    "session_scope",
    "ExperimentRepository"
]
