"""
Configuration Management for flatcensus runs

This module provides centralized, type-safe configuration for the census
engine and its command line. Explicit values win over environment variables,
which win over defaults; the one exception is FLATCENSUS_WORKERS, which
overrides an explicit worker count.
"""

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from .census.models import CensusFilter
from .exceptions import (
    ConfigurationError,
    EnvironmentConfigurationError,
    InvalidConfigurationError,
    MissingConfigurationError,
)

__all__ = [
    "Command",
    "CensusMode",
    "OutputFormat",
    "ResourceLimits",
    "CheckpointPolicy",
    "RunConfig",
    "load_config",
    "workers_from_env",
    "ConfigurationError",
    "MissingConfigurationError",
    "InvalidConfigurationError",
    "EnvironmentConfigurationError",
]


class Command(Enum):
    """Supported command line operations"""
    CENSUS = "census"
    CLASSIFY = "classify"
    PREDICT = "predict"
    COMPARE = "compare"
    DT_COUNT = "dt-count"


class CensusMode(str, Enum):
    NAIVE = "naive"
    PRUNED = "pruned"

    @classmethod
    def from_string(cls, value: str) -> 'CensusMode':
        """Convert string to CensusMode, case-insensitive"""
        try:
            return cls(value.lower())
        except ValueError:
            raise InvalidConfigurationError(
                f"Invalid census mode: '{value}'. Must be one of {[e.value for e in cls]}"
            )


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"

    @classmethod
    def from_string(cls, value: str) -> 'OutputFormat':
        """Convert string to OutputFormat, case-insensitive"""
        try:
            return cls(value.lower())
        except ValueError:
            raise InvalidConfigurationError(
                f"Invalid output format: '{value}'. Must be one of {[e.value for e in cls]}"
            )


@dataclass(frozen=True)
class ResourceLimits:
    """Caps on enumeration work (None means unlimited)"""
    max_tables: Optional[int] = None

    def __post_init__(self):
        if self.max_tables is not None and self.max_tables <= 0:
            raise InvalidConfigurationError("max_tables must be positive")

    @classmethod
    def from_env(cls) -> 'ResourceLimits':
        """Load resource limits from environment variables"""
        raw = os.getenv("FLATCENSUS_MAX_TABLES", "")
        if not raw:
            return cls()
        try:
            return cls(max_tables=int(raw))
        except ValueError as e:
            raise InvalidConfigurationError(f"Invalid table limit: {e}", setting="FLATCENSUS_MAX_TABLES")


@dataclass(frozen=True)
class CheckpointPolicy:
    """Retry policy for shard checkpoint writes"""
    max_attempts: int = 3
    backoff_factor: float = 0.5

    @classmethod
    def from_env(cls) -> 'CheckpointPolicy':
        """Load checkpoint retry policy from environment variables"""
        try:
            return cls(
                max_attempts=int(os.getenv("FLATCENSUS_CHECKPOINT_RETRIES", "3")),
                backoff_factor=float(os.getenv("FLATCENSUS_CHECKPOINT_BACKOFF", "0.5")),
            )
        except ValueError as e:
            raise InvalidConfigurationError(
                f"Invalid checkpoint retry configuration: {e}", setting="FLATCENSUS_CHECKPOINT_RETRIES"
            )

    def __post_init__(self):
        if self.max_attempts < 1:
            raise InvalidConfigurationError("Checkpoint max_attempts must be at least 1")
        if self.backoff_factor < 0:
            raise InvalidConfigurationError("Checkpoint backoff_factor must be non-negative")


def workers_from_env(default: int) -> int:
    """Worker count from FLATCENSUS_WORKERS, falling back to ``default``."""
    raw = os.getenv("FLATCENSUS_WORKERS")
    if not raw:
        return default
    try:
        workers = int(raw)
    except ValueError:
        raise EnvironmentConfigurationError(f"Invalid worker count: {raw}", setting="FLATCENSUS_WORKERS")
    if workers < 1:
        raise EnvironmentConfigurationError("Worker count must be at least 1", setting="FLATCENSUS_WORKERS")
    return workers


@dataclass
class RunConfig:
    """Main configuration object for a flatcensus run"""
    command: Command
    g: int = 0
    n: int = 0
    max_area: int = 1
    mode: CensusMode = CensusMode.PRUNED
    filters: CensusFilter = field(default_factory=CensusFilter)
    workers: int = 1
    limits: ResourceLimits = field(default_factory=ResourceLimits)
    checkpoint: CheckpointPolicy = field(default_factory=CheckpointPolicy)
    checkpoint_dir: Optional[Path] = None
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    manifest_path: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV

    def validate(self) -> None:
        """Check the invariants shared by every census-like command."""
        if self.g < 0 or self.n < 0:
            raise InvalidConfigurationError("g and n must be non-negative")
        if 2 - 2 * self.g - self.n >= 0:
            raise InvalidConfigurationError(
                f"Surface class (g={self.g}, n={self.n}) is not hyperbolic: need 2 - 2g - n < 0"
            )
        if self.max_area < 1:
            raise InvalidConfigurationError("max_area must be at least 1")
        if self.workers < 1:
            raise InvalidConfigurationError("Worker count must be at least 1")


def load_config(command: Command | str, **overrides) -> RunConfig:
    """Build and validate a RunConfig from explicit values and the environment"""
    try:
        if isinstance(command, str):
            try:
                command = Command(command)
            except ValueError:
                raise InvalidConfigurationError(
                    f"Invalid command: {command}. Must be one of {[c.value for c in Command]}"
                )

        mode = overrides.pop("mode", CensusMode.PRUNED)
        if isinstance(mode, str):
            mode = CensusMode.from_string(mode)

        output_format = overrides.pop("output_format", OutputFormat.CSV)
        if isinstance(output_format, str):
            output_format = OutputFormat.from_string(output_format)

        try:
            limits = overrides.pop("limits", None) or ResourceLimits.from_env()
            checkpoint = overrides.pop("checkpoint", None) or CheckpointPolicy.from_env()
        except InvalidConfigurationError as e:
            raise EnvironmentConfigurationError(f"Environment configuration failed: {e.message}", setting=e.setting)

        workers = overrides.pop("workers", None)
        workers = workers_from_env(1 if workers is None else workers)

        for key in ("checkpoint_dir", "input_path", "output_path", "manifest_path"):
            if overrides.get(key) is not None:
                overrides[key] = Path(overrides[key])

        config = RunConfig(
            command=command,
            mode=mode,
            output_format=output_format,
            limits=limits,
            checkpoint=checkpoint,
            workers=workers,
            **overrides,
        )
        if command in (Command.CLASSIFY, Command.COMPARE, Command.DT_COUNT) and config.input_path is None:
            raise MissingConfigurationError(f"The {command.value} command needs an input file", setting=command.value)
        if command == Command.CENSUS:
            config.validate()
        elif config.workers < 1:
            raise InvalidConfigurationError("Worker count must be at least 1")
        return config

    except TypeError as e:
        raise InvalidConfigurationError(f"Unknown configuration field: {e}")
    except ValueError as e:
        raise InvalidConfigurationError(f"Configuration value error: {e}")
    except Exception as e:
        if isinstance(e, ConfigurationError):
            raise
        raise ConfigurationError(f"Unexpected configuration error: {e}")
