"""
Configuration management for the square-minors toolkit.

Runtime settings use Pydantic BaseSettings with the usual priority-based
loading:

Configuration Sources (in order of priority):
1. Environment variables (e.g. OUTPUT_DIR, WINDOW_VERTEX_BUDGET)
2. .env file
3. Default values

Features:
- Type-safe configuration with Pydantic validation
- Frozen configuration to prevent runtime modifications
- One place that sets up logging for the CLI entry point

Per-experiment parameters (family, radii, m range) do not live here; they are
an ExperimentConfig document (see models.py) that CLI flags can override.
"""

import logging

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


class Config(BaseSettings):
    """Configuration for square-minors runs."""

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", frozen=True, extra="ignore"
    )

    output_dir: str = Field(
        default="results", description="Default directory for reports and DOT files."
    )
    window_vertex_budget: int = Field(
        default=50_000, gt=0, description="Largest window a family may be cut to."
    )
    oracle_max_nodes: int = Field(
        default=1_000_000, gt=0, description="Default search-tree node cap."
    )
    oracle_time_cap: float = Field(
        default=60.0, gt=0, description="Default oracle time cap in seconds."
    )
    workers: int = Field(
        default=4, gt=0, description="Concurrent experiment rows."
    )
    log_level: str = Field(default="INFO", description="Root logging level.")
    check_stages: bool = Field(
        default=False,
        description="Verify every builder stage (debug runs).",
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {value!r}")
        return level

    @classmethod
    def load(cls) -> "Config":
        """
        Loads the configuration from environment variables and/or a .env file.
        """
        return cls()


def configure_logging(config: Config) -> None:
    """Sets up root logging once for a CLI run."""
    logging.basicConfig(level=config.log_level, format=LOG_FORMAT)
