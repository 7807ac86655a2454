"""Configuration management using Pydantic Settings."""

import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables (prefix ``UNDERLAY_``)."""

    model_config = SettingsConfigDict(
        env_prefix="UNDERLAY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Worker pool
    workers: int = Field(
        default=0,
        description="Monte Carlo worker threads (0 = one per CPU)",
        ge=0,
        le=512,
    )

    chunk_size: int = Field(
        default=8192,
        description="Runs per Monte Carlo chunk; fixed so results ignore the worker count",
        ge=256,
    )

    # Logging Configuration
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )

    debug: bool = Field(
        default=False,
        description="Enable debug mode with verbose output",
    )

    # Experiment defaults
    default_seed: int = Field(
        default=20240101,
        description="Seed used when an experiment does not name one",
        ge=0,
        lt=2**64,
    )

    default_runs: int = Field(
        default=100_000,
        description="Monte Carlo runs used when an experiment does not name them",
        ge=1_000,
    )

    output_dir: str = Field(
        default="results",
        description="Directory for CSV output when no explicit path is given",
    )

    # Numerical guards
    max_tx_power: float = Field(
        default=1e12,
        description="Cap on allocated SU power when the SU-to-PU gain underflows",
        gt=0.0,
    )

    quadrature_tol: float = Field(
        default=1e-8,
        description="Absolute tolerance of the semi-analytic capacity quadrature",
        gt=0.0,
    )

    def resolved_workers(self) -> int:
        """Number of worker threads to use."""
        return self.workers or (os.cpu_count() or 1)
