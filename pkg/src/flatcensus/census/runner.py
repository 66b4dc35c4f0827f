"""
Sharded execution of a census over areas 1..max_area.

Shards run in-process for a single worker and in a process pool otherwise.
Results are merged by exact rational addition, so the final table does not
depend on the schedule.
"""

import concurrent.futures
import logging
from pathlib import Path
from typing import Dict, Optional

from ..asymptotics import require_hyperbolic
from ..config import CensusMode, CheckpointPolicy, ResourceLimits
from ..exceptions import ResourceLimitExceeded
from .enumerate import plan_shards, run_shard
from .models import CensusFilter, CountTable, ShardResult, ShardSpec
from .storage import CheckpointStore, census_scope, shard_checksum


class CensusRunner:
    """
    Runs the shards of a census and merges their results.

    Shard checksums of the last run are kept in ``checksums`` for the manifest.
    """

    def __init__(
        self,
        g: int,
        n: int,
        mode: CensusMode | str = CensusMode.PRUNED,
        filters: Optional[CensusFilter] = None,
        workers: int = 1,
        limits: Optional[ResourceLimits] = None,
        checkpoint_dir: Optional[Path | str] = None,
        checkpoint: Optional[CheckpointPolicy] = None,
    ):
        require_hyperbolic(g, n)
        self.g = g
        self.n = n
        self.mode = CensusMode.from_string(mode) if isinstance(mode, str) else mode
        self.filters = filters or CensusFilter()
        self.workers = workers
        self.limits = limits or ResourceLimits()
        self.scope = census_scope(g, n, self.filters)
        self.store = (
            CheckpointStore(checkpoint_dir, checkpoint, scope=self.scope) if checkpoint_dir is not None else None
        )
        self.checksums: Dict[str, str] = {}
        self.examined = 0
        self.logger = logging.getLogger(__name__)

    def _record(self, result: ShardResult, table: CountTable) -> None:
        self.examined += result.examined
        max_tables = self.limits.max_tables
        if max_tables is not None and self.examined > max_tables:
            raise ResourceLimitExceeded(max_tables, self.examined)
        if self.store is not None and result.spec.name not in self.checksums:
            self.checksums[result.spec.name] = self.store.save(result)
        else:
            self.checksums.setdefault(result.spec.name, shard_checksum(result))
        table.add_shard(result)

    def _pending(self, shards: list[ShardSpec], table: CountTable) -> list[ShardSpec]:
        if self.store is None:
            return shards
        pending = []
        for spec in shards:
            stored = self.store.load(spec)
            if stored is None:
                pending.append(spec)
            else:
                self.checksums[spec.name] = shard_checksum(stored)
                self._record(stored, table)
        resumed = len(shards) - len(pending)
        if resumed:
            self.logger.info(f"Resumed {resumed} of {len(shards)} shards from checkpoints")
        return pending

    def _remaining(self) -> Optional[int]:
        max_tables = self.limits.max_tables
        return None if max_tables is None else max_tables - self.examined

    def _over_limit(self, e: ResourceLimitExceeded) -> ResourceLimitExceeded:
        """The shard-local limit error restated for the whole census."""
        return ResourceLimitExceeded(self.limits.max_tables, self.examined + e.examined)

    def _run_sequential(self, shards: list[ShardSpec], table: CountTable) -> None:
        for spec in shards:
            try:
                result = run_shard(spec, self.g, self.n, self.filters, self._remaining())
            except ResourceLimitExceeded as e:
                raise self._over_limit(e) from e
            self._record(result, table)

    def _run_parallel(self, shards: list[ShardSpec], table: CountTable) -> None:
        remaining = self._remaining()
        with concurrent.futures.ProcessPoolExecutor(max_workers=self.workers) as executor:
            futures = [executor.submit(run_shard, spec, self.g, self.n, self.filters, remaining) for spec in shards]
            try:
                for future in concurrent.futures.as_completed(futures):
                    try:
                        result = future.result()
                    except ResourceLimitExceeded as e:
                        raise self._over_limit(e) from e
                    self._record(result, table)
            except Exception:
                executor.shutdown(wait=False, cancel_futures=True)
                raise

    def run(self, max_area: int) -> CountTable:
        table = CountTable(self.g, self.n)
        self.checksums = {}
        self.examined = 0
        for area in range(1, max_area + 1):
            shards = plan_shards(self.mode.value, area, self.filters)
            self.logger.info(f"Area {area}: {len(shards)} shards scheduled ({self.mode.value})")
            pending = self._pending(shards, table)
            if self.workers > 1 and len(pending) > 1:
                self._run_parallel(pending, table)
            else:
                self._run_sequential(pending, table)
            table.complete_area = area
        self.logger.info(
            f"Census of (g={self.g}, n={self.n}) finished to area {max_area}: "
            f"{self.examined} tables, total {table.total()}"
        )
        return table


def census(
    g: int,
    n: int,
    max_area: int,
    mode: CensusMode | str = CensusMode.PRUNED,
    filters: Optional[CensusFilter] = None,
    workers: int = 1,
    checkpoint_dir: Optional[Path | str] = None,
    limits: Optional[ResourceLimits] = None,
) -> CountTable:
    """Weighted counts for every area up to ``max_area``."""
    runner = CensusRunner(
        g, n, mode=mode, filters=filters, workers=workers, limits=limits, checkpoint_dir=checkpoint_dir
    )
    return runner.run(max_area)
