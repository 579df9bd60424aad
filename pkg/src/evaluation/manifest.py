"""Run manifests: everything needed to reproduce a command's outputs."""

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field

from .. import __version__

logger = logging.getLogger(__name__)

RESULTS_SCHEMA_VERSION = "1"
MANIFEST_NAME = "manifest.yaml"


class RunManifest(BaseModel):
    """Command, resolved configuration, seeds and outputs of one run."""

    schema_version: str = RESULTS_SCHEMA_VERSION
    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict, description="Fully resolved configuration")
    seeds: List[int] = Field(default_factory=list)
    code_version: str = __version__
    started_at: datetime = Field(default_factory=datetime.utcnow)
    finished_at: Optional[datetime] = None
    status: str = "running"
    outputs: Dict[str, str] = Field(default_factory=dict, description="Output name -> file path")

    def add_output(self, name: str, path: Union[str, Path]) -> None:
        self.outputs[name] = str(path)

    def finish(self, status: str = "completed") -> None:
        self.finished_at = datetime.utcnow()
        self.status = status


def write_manifest(manifest: RunManifest, out_dir: Union[str, Path]) -> Path:
    """Write `<out_dir>/manifest.yaml`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_NAME
    with open(path, "w") as f:
        yaml.safe_dump(manifest.model_dump(mode="json"), f, sort_keys=False)
    logger.debug("Wrote manifest %s", path)
    return path


def load_manifest(path: Union[str, Path]) -> RunManifest:
    with open(path, "r") as f:
        return RunManifest.model_validate(yaml.safe_load(f))
