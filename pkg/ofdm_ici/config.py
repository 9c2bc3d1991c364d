"""Configuration system for ofdm-ici.

Stores settings as JSON at ~/.config/ofdm-ici/config.json.
Environment overrides: OFDM_ICI_OUT (output directory), OFDM_ICI_THREADS
(worker thread count).
"""

import json
import logging
import os
from dataclasses import asdict, dataclass

logger = logging.getLogger(__name__)

CONFIG_DIR = os.path.join(os.path.expanduser("~"), ".config", "ofdm-ici")
CONFIG_FILE = os.path.join(CONFIG_DIR, "config.json")
USER_PROFILES_DIR = os.path.join(CONFIG_DIR, "profiles")

ENV_OUTPUT_DIR = "OFDM_ICI_OUT"
ENV_THREADS = "OFDM_ICI_THREADS"

OUTPUT_FORMATS = ("csv", "json")


@dataclass
class AppConfig:
    output_dir: str = "results"
    threads: int = 1
    output_format: str = "csv"  # "csv" or "json" (json also writes the csv)
    log_level: str = "INFO"
    # Scale presets: desk runs finish in minutes, full runs use the reference counts
    desk_realizations: int = 100
    desk_iterations: int = 10_000
    full_realizations: int = 1_000
    full_iterations: int = 1_000_000

    def scale(self, full_scale: bool) -> tuple[int, int]:
        """Return (realizations, iterations) for the requested scale."""
        if full_scale:
            return self.full_realizations, self.full_iterations
        return self.desk_realizations, self.desk_iterations

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AppConfig":
        # keys written by other versions are dropped
        known = {f.name for f in cls.__dataclass_fields__.values()}
        filtered = {k: v for k, v in data.items() if k in known}
        return cls(**filtered)


def _ensure_dirs():
    """Create config directories if they don't exist."""
    for d in (CONFIG_DIR, USER_PROFILES_DIR):
        os.makedirs(d, exist_ok=True)


def _apply_env(config: AppConfig) -> AppConfig:
    """Apply environment variable overrides in place."""
    out = os.environ.get(ENV_OUTPUT_DIR)
    if out:
        config.output_dir = out
    threads = os.environ.get(ENV_THREADS)
    if threads:
        try:
            value = int(threads)
        except ValueError:
            logger.warning("Ignoring %s=%r (not an integer)", ENV_THREADS, threads)
        else:
            if value >= 1:
                config.threads = value
            else:
                logger.warning("Ignoring %s=%d (must be >= 1)", ENV_THREADS, value)
    return config


def load_config() -> AppConfig:
    """Config file values over defaults, then environment overrides."""
    config = AppConfig()
    if os.path.exists(CONFIG_FILE):
        try:
            with open(CONFIG_FILE, "r", encoding="utf-8") as f:
                data = json.load(f)
            config = AppConfig.from_dict(data)
        except (OSError, ValueError, TypeError, AttributeError) as e:
            logger.warning("Config file %s unreadable, using defaults: %s", CONFIG_FILE, e)
    return _apply_env(config)


def _save_config(config: AppConfig):
    """Save configuration to disk."""
    _ensure_dirs()
    with open(CONFIG_FILE, "w", encoding="utf-8") as f:
        json.dump(config.to_dict(), f, indent=2)


# Singleton config instance
_config: AppConfig | None = None


def get_config() -> AppConfig:
    """Get the current configuration (lazy-loaded singleton)."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reload_config():
    """Force reload configuration from disk."""
    global _config
    _config = load_config()
