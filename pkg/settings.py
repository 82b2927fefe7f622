import json
import logging
import os
from typing import Any, Dict, Optional

# Resolve everything relative to this file so the tool works from any directory
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
SETTINGS_PATH = os.path.join(BASE_DIR, "settings.json")
TEMPLATES_DIR = os.path.join(BASE_DIR, "templates")
LOGS_DIR = os.path.join(BASE_DIR, "logs")

MAX_BRUTE_ENV = "NORMCHECK_MAX_BRUTE"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "log_level": "INFO",
    "max_brute": 10,
    "tolerance": 0.01,
    "sim_length": 1_000_000,
    "max_len": 3,
    "run_length": 64,
}

logger = logging.getLogger("Normcheck.Settings")
logger.propagate = True


def load_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """DEFAULT_SETTINGS overlaid with settings.json (if readable) and the environment."""
    path = path or SETTINGS_PATH
    merged = dict(DEFAULT_SETTINGS)
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                loaded = json.load(f)
            if isinstance(loaded, dict):
                merged.update(loaded)
            else:
                logger.warning(f"Ignoring {path}: top level is not an object")
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable settings file {path}: {e}")

    raw = os.environ.get(MAX_BRUTE_ENV)
    if raw:
        try:
            merged["max_brute"] = int(raw)
        except ValueError:
            logger.warning(f"Ignoring {MAX_BRUTE_ENV}={raw!r}: not an integer")
    return merged


def max_brute() -> int:
    return int(load_settings().get("max_brute", DEFAULT_SETTINGS["max_brute"]))
