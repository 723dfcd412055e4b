"""
Environment settings and logging setup shared by the command-line entry points.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

SRC_DIR = Path(__file__).resolve().parent.parent
DEFAULT_SCENARIO = SRC_DIR / "scenarios" / "default.json"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    log_file: Optional[str] = None
    progress: bool = False
    default_scenario: Path = DEFAULT_SCENARIO


def load_settings() -> Settings:
    """Read SOLAR_CLEANER_* variables, after loading a .env file if there is one."""
    load_dotenv()
    level = os.getenv("SOLAR_CLEANER_LOG_LEVEL", "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "INFO"
    return Settings(
        log_level=level,
        log_file=os.getenv("SOLAR_CLEANER_LOG_FILE") or None,
        progress=os.getenv("SOLAR_CLEANER_PROGRESS", "0").strip().lower() in ("1", "true", "yes"),
        default_scenario=Path(os.getenv("SOLAR_CLEANER_DEFAULT_SCENARIO", str(DEFAULT_SCENARIO))),
    )


def configure_logging(settings: Settings) -> None:
    handlers = [logging.StreamHandler()]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
