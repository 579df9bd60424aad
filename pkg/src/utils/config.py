"""Configuration management utilities."""

import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import ConfigError

load_dotenv()


class Settings(BaseSettings):
    """Process-level settings read from the environment or a .env file."""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    database_url: str = Field("sqlite:///./delegation.db", validation_alias="DATABASE_URL")
    delegation_config: str = Field("config.yaml", validation_alias="DELEGATION_CONFIG")
    delegation_workers: Optional[int] = Field(None, ge=1, validation_alias="DELEGATION_WORKERS")


def get_settings() -> Settings:
    return Settings()


def load_config(config_path: Union[str, Path, None] = None) -> Dict[str, Any]:
    """Load configuration from YAML file."""
    config_path = Path(config_path or get_settings().delegation_config)
    if not config_path.is_file():
        raise ConfigError(f"Config file not found: {config_path}")
    try:
        with open(config_path, "r") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError(f"Invalid YAML in {config_path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Top level of {config_path} must be a mapping")
    return data


def get_database_url() -> str:
    """Get database URL from environment."""
    return os.getenv("DATABASE_URL") or get_settings().database_url
