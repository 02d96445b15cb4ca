"""
Logging utilities for machstem.
One stderr handler on the package logger so stdout stays machine-readable.
"""

import logging
import sys
from typing import Optional

from machstem.utils.config import get_config

PACKAGE_LOGGER = "machstem"


def configure_logging(level: Optional[str] = None) -> None:
    """Install the package handler, replacing any earlier one."""
    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    app_logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(app_logger.handlers):
        app_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    app_logger.addHandler(console_handler)
    app_logger.setLevel((level or get_config().log_level).upper())
    app_logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Get a child of the package logger."""
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}")
