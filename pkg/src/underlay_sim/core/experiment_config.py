"""Experiment files: TOML with section headers, flattened into ExperimentConfig."""

import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..exceptions import ConfigurationError, FileOperationError
from ..utils.file_utils import read_file_async
from .models import ExperimentConfig
from .presets import merge_defaults

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger("underlay_sim.experiment_config")


def flatten_sections(document: dict[str, Any]) -> dict[str, Any]:
    """Merge all tables of a TOML document into one mapping.

    Section names only group keys; a key defined in two sections is an error.

    Raises:
        ConfigurationError: On duplicate keys
    """
    flat: dict[str, Any] = {}

    def visit(table: dict[str, Any], prefix: str) -> None:
        for key, value in table.items():
            if isinstance(value, dict):
                visit(value, f"{prefix}{key}.")
                continue
            if key in flat:
                raise ConfigurationError(f"key '{key}' defined twice (last in [{prefix.rstrip('.')}])", field=key)
            flat[key] = value

    visit(document, "")
    return flat


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a flat mapping into an ExperimentConfig.

    Keys the mapping leaves out take the defaults of its figure preset.

    Raises:
        ConfigurationError: Naming the first offending field
    """
    try:
        return ExperimentConfig.model_validate(merge_defaults(data))
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        field = str(loc[0]) if loc else None
        raise ConfigurationError(f"invalid experiment config: {first.get('msg', e)}", field=field) from e


def parse_config(text: str) -> ExperimentConfig:
    """Parse TOML text into an ExperimentConfig.

    Raises:
        ConfigurationError: On TOML syntax errors or invalid values
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"malformed experiment file: {e}") from e
    return validate_config(flatten_sections(document))


async def load_config(path: Path) -> ExperimentConfig:
    """Load an experiment file without blocking the event loop.

    Args:
        path: TOML file

    Returns:
        Validated config with all dB values converted to linear

    Raises:
        ConfigurationError: If the file is missing or invalid
    """
    try:
        text = await read_file_async(path)
    except FileOperationError as e:
        raise ConfigurationError(f"cannot read experiment file {path}: {e}", field="config") from e
    config = parse_config(text)
    logger.debug(f"Loaded experiment '{config.experiment_id}' from {path}")
    return config
