"""Initialize utils package."""

from .config import Settings, get_database_url, get_settings, load_config
from .seeding import derive_seed, episode_streams

__all__ = ["Settings", "get_database_url", "get_settings", "load_config", "derive_seed", "episode_streams"]
