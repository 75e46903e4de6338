"""Runtime settings for merozeta"""

import logging
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("MEROZETA_LOG_LEVEL", "INFO")
DEFAULT_FORMAT = os.getenv("MEROZETA_FORMAT", "text")


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")


@dataclass
class ResolveConfig:
    """Resolution engine settings"""

    max_blowups: int = field(default_factory=lambda: _env_int("MEROZETA_MAX_BLOWUPS", 20000))
    complete_dicriticals: bool = True  # False stops after the normal crossing phase


def setup_logging(level: str = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
