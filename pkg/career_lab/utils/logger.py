"""Logging configuration."""

import logging
import sys
from pathlib import Path
from typing import List, Optional

from pythonjsonlogger import jsonlogger

from career_lab.core.config import settings

# third-party loggers capped at WARNING
QUIET_LOGGERS = ("joblib",)


def _formatter() -> logging.Formatter:
    if settings.log_format == "json":
        return jsonlogger.JsonFormatter(
            "%(asctime)s %(levelname)s %(name)s %(message)s",
            rename_fields={"asctime": "@timestamp", "levelname": "severity"},
            static_fields={"app": settings.app_name, "version": settings.version},
        )
    return logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Configure the root logger from settings.

    Console output goes to stderr; stdout is reserved for CSV/JSON results.
    ``level`` (the ``--log-level`` flag) overrides ``CAREER_LAB_LOG_LEVEL``.
    """
    level_name = (level or settings.log_level).upper()
    log_level = getattr(logging, level_name, logging.WARNING)
    formatter = _formatter()

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        Path(settings.log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_file))

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers = []
    for handler in handlers:
        handler.setLevel(log_level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    return root_logger
