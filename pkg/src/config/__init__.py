"""Configuration module for the solvers and the command line."""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class ConfigError(ValueError):
    """Raised when an environment variable holds an unusable value."""


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


# Budget for every exhaustive enumeration (box volume / feasible-set size)
DRSOLVE_ENUM_GUARD = _int_env("DRSOLVE_ENUM_GUARD", 1_000_000)

# Worker processes used by `check` and `bench` when --workers is not given
DRSOLVE_WORKERS = _int_env("DRSOLVE_WORKERS", 1)

LOG_LEVEL = os.getenv("DRSOLVE_LOG_LEVEL", "INFO").upper()

# Base directory for log storage
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
LOG_DIR = os.getenv("DRSOLVE_LOG_DIR", os.path.join(BASE_DIR, "logs"))
