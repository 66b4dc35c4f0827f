"""Internal helper functions for logging setup and input files."""

import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .dt_lattice import PantsDecomposition
from .exceptions import EnvironmentConfigurationError, InvalidTableError
from .tiling import MarkedTiling

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def configure_logging(level: Optional[str] = None) -> int:
    """
    Configure the root logger on stderr.

    Args:
        level: Level name; falls back to FLATCENSUS_LOG_LEVEL, then WARNING

    Returns:
        The numeric level that was applied

    Raises:
        EnvironmentConfigurationError: If the level name is unknown
    """
    name = (level or os.getenv("FLATCENSUS_LOG_LEVEL") or "WARNING").upper()
    if name not in _LEVELS:
        raise EnvironmentConfigurationError(
            f"Invalid log level: {name}. Must be one of {list(_LEVELS)}", setting="FLATCENSUS_LOG_LEVEL"
        )
    numeric = getattr(logging, name)
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
    logger.debug(f"Logging configured at {name}")
    return numeric


def _read_json(path: Path | str) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ValueError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"Malformed JSON in {path}: {e}") from e


def load_marked_tiling(path: Path | str) -> MarkedTiling:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InvalidTableError(f"{path} does not describe a table")
    mt = MarkedTiling.from_dict(data)
    logger.debug(f"Loaded {mt.n_squares}-square table from {path}")
    return mt


def load_pants(path: Path | str) -> PantsDecomposition:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValueError(f"{path} does not describe a pants decomposition")
    return PantsDecomposition.from_dict(data)


def format_ratio(value: Optional[float]) -> str:
    """Human-readable float column with 15 significant digits."""
    return "" if value is None else f"{value:.15g}"


def fraction_fields(value: Optional[Fraction]) -> tuple[str, str]:
    if value is None:
        return "", ""
    return str(value.numerator), str(value.denominator)
