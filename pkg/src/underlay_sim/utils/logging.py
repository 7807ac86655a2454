"""Logging setup for the underlay simulator."""

import logging
import sys
from typing import Any

import numpy as np

from ..exceptions import ConfigurationError

LOGGER_NAME = "underlay_sim"

# Chunks run on worker threads; debug records name the thread that ran them.
_DEBUG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(threadName)s] %(funcName)s:%(lineno)d - %(message)s"
_DEFAULT_FORMAT = "%(levelname)s - %(message)s"


def _resolve_level(level: str) -> int:
    resolved = logging.getLevelName(level.upper())
    if not isinstance(resolved, int):
        raise ConfigurationError(f"unknown log level {level!r}", field="log_level")
    return resolved


def setup_logging(level: str = "INFO", debug: bool = False) -> logging.Logger:
    """Configure the ``underlay_sim`` logger hierarchy.

    Records go to stderr so stdout stays free for CSV and specfun output.

    Args:
        level: Logging level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        debug: Force DEBUG with thread, function and line in every record

    Returns:
        The package root logger

    Raises:
        ConfigurationError: If the level name is unknown
    """
    numeric = logging.DEBUG if debug else _resolve_level(level)

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(numeric)
    logger.handlers.clear()

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(numeric)
    handler.setFormatter(
        logging.Formatter(
            fmt=_DEBUG_FORMAT if debug else _DEFAULT_FORMAT,
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )
    logger.addHandler(handler)
    return logger


def _format_value(value: Any) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def log_dict(logger: logging.Logger, level: int, message: str, data: dict[str, Any]) -> None:
    """Log ``message | key=value, ...`` with floats in six significant digits."""
    if not logger.isEnabledFor(level):
        return
    formatted = ", ".join(f"{k}={_format_value(v)}" for k, v in data.items())
    logger.log(level, f"{message} | {formatted}")
