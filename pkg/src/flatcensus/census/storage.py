"""
Persistence for census results: CSV count tables, JSON manifests and shard checkpoints.

Counts are always written as separate numerator and denominator integers.
"""

import csv
import hashlib
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import tenacity

from ..config import CheckpointPolicy
from ..exceptions import CheckpointError
from .models import CensusFilter, CountTable, ShardResult, ShardSpec

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("area", "h_type", "v_type", "count_num", "count_den")


def write_counts_rows(ct: CountTable, handle: TextIO) -> None:
    writer = csv.writer(handle)
    writer.writerow(CSV_COLUMNS)
    for area, h_type, v_type, count in ct.rows():
        writer.writerow((area, h_type, v_type, count.numerator, count.denominator))


def write_counts_csv(ct: CountTable, path: Path | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        write_counts_rows(ct, handle)


def read_counts_csv(path: Path | str, g: int, n: int, complete_area: Optional[int] = None) -> CountTable:
    """Load a count table; without ``complete_area`` the largest area present is assumed complete."""
    ct = CountTable(g, n)
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"missing columns {sorted(missing)}")
            for row in reader:
                weight = Fraction(int(row["count_num"]), int(row["count_den"]))
                ct.add(int(row["area"]), row["h_type"], row["v_type"], weight)
    except (KeyError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Malformed census CSV {path}: {e}") from e
    areas = [area for area, _, _ in ct.counts]
    ct.complete_area = complete_area if complete_area is not None else max(areas, default=0)
    return ct


def counts_to_json(ct: CountTable) -> Dict[str, Any]:
    return {
        "g": ct.g,
        "n": ct.n,
        "complete_area": ct.complete_area,
        "counts": [
            {"area": a, "h_type": h, "v_type": v, "count_num": c.numerator, "count_den": c.denominator}
            for a, h, v, c in ct.rows()
        ],
    }


def _canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def shard_checksum(result: ShardResult) -> str:
    return hashlib.sha256(_canonical_json(result.to_dict()).encode("utf-8")).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
    os.replace(tmp, path)


def write_manifest(
    path: Path | str,
    ct: CountTable,
    mode: str,
    filters: CensusFilter,
    checksums: Dict[str, str],
) -> None:
    per_area: Dict[int, Fraction] = {}
    for area, _, _, count in ct.rows():
        per_area[area] = per_area.get(area, Fraction(0)) + count
    manifest = {
        "g": ct.g,
        "n": ct.n,
        "max_area": ct.complete_area,
        "mode": mode,
        "filter": filters.to_dict(),
        "totals": {
            str(area): {"count_num": t.numerator, "count_den": t.denominator}
            for area, t in sorted(per_area.items())
        },
        "shards": dict(sorted(checksums.items())),
    }
    _atomic_write(Path(path), json.dumps(manifest, indent=2, sort_keys=True))


def read_manifest(path: Path | str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"Cannot read census manifest {path}: {e}") from e


def census_scope(g: int, n: int, filters: CensusFilter) -> str:
    """Key of the census a shard belongs to: the surface class and a digest of the filters."""
    digest = hashlib.sha256(_canonical_json(filters.to_dict()).encode("utf-8")).hexdigest()[:12]
    return f"g{g}-n{n}-f{digest}"


class CheckpointStore:
    """One JSON file per finished shard, guarded by a sha256 checksum.

    With a ``scope`` (see :func:`census_scope`) the scope is part of every file
    name and of the stored payload, and a checkpoint from another scope is
    never returned.
    """

    def __init__(self, directory: Path | str, policy: Optional[CheckpointPolicy] = None, scope: str = ""):
        self.directory = Path(directory)
        self.policy = policy or CheckpointPolicy()
        self.scope = scope
        self.logger = logging.getLogger(__name__)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._retrying = tenacity.Retrying(
            wait=tenacity.wait_exponential(multiplier=self.policy.backoff_factor, min=0, max=10.0),
            stop=tenacity.stop_after_attempt(self.policy.max_attempts),
            retry=tenacity.retry_if_exception_type(OSError),
            before_sleep=tenacity.before_sleep_log(self.logger, logging.WARNING),
            reraise=True,
        )

    def path_for(self, spec: ShardSpec) -> Path:
        prefix = f"shard-{self.scope}-" if self.scope else "shard-"
        return self.directory / f"{prefix}{spec.name}.json"

    def load(self, spec: ShardSpec) -> Optional[ShardResult]:
        """The stored result, or None when absent or corrupt."""
        path = self.path_for(spec)
        if not path.exists():
            return None
        try:
            with open(path, encoding="utf-8") as handle:
                stored = json.load(handle)
            result = ShardResult.from_dict(stored["payload"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            self.logger.warning(f"Ignoring unreadable checkpoint {path}: {e}")
            return None
        if stored.get("scope", "") != self.scope:
            self.logger.warning(f"Checkpoint {path} belongs to census '{stored.get('scope', '')}', recomputing shard")
            return None
        if result.spec != spec or shard_checksum(result) != stored.get("checksum"):
            self.logger.warning(f"Checksum mismatch in checkpoint {path}, recomputing shard")
            return None
        return result

    def save(self, result: ShardResult) -> str:
        checksum = shard_checksum(result)
        text = json.dumps({"checksum": checksum, "scope": self.scope, "payload": result.to_dict()}, sort_keys=True)
        path = self.path_for(result.spec)
        try:
            self._retrying(_atomic_write, path, text)
        except OSError as e:
            raise CheckpointError(f"Failed to write checkpoint: {e}", path=str(path)) from e
        return checksum
