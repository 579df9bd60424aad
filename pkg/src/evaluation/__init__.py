"""Initialize evaluation package."""

from .orchestrator import EpisodeJob, EvaluationOrchestrator, PolicyKind, PolicySpec, make_policy
from .tables import (
    EPISODE_COLUMNS,
    RESULTS_COLUMNS,
    SWEEP_COLUMNS,
    episodes_frame,
    format_results,
    summarize_cases,
    summarize_sweep,
)
from .manifest import MANIFEST_NAME, RESULTS_SCHEMA_VERSION, RunManifest, load_manifest, write_manifest

__all__ = [
    "EpisodeJob",
    "EvaluationOrchestrator",
    "PolicyKind",
    "PolicySpec",
    "make_policy",
    "EPISODE_COLUMNS",
    "RESULTS_COLUMNS",
    "SWEEP_COLUMNS",
    "episodes_frame",
    "format_results",
    "summarize_cases",
    "summarize_sweep",
    "MANIFEST_NAME",
    "RESULTS_SCHEMA_VERSION",
    "RunManifest",
    "load_manifest",
    "write_manifest",
]
