"""
Enumeration of square-tiled surfaces by gluing tables.

A labelled table with N squares describes its surface in 2^N N! ways: the
squares can be renamed, and each square can be turned by a half turn
inside its own frame. The naive enumerator walks every pair of side
matchings and weighs each (table, marking) by 1/(2^N N!), which sums to
1/|Aut| per surface. Under those moves every horizontal row becomes a
plain cylinder row, so a horizontal matching is determined up to symmetry
by its row lengths; the pruned enumerator keeps one matching per partition
of N, weighs it by the size of its orbit, and searches vertical matchings
depth-first with connectivity and vertex-count pruning. Both feed the same
leaf processing, so they agree bucket by bucket.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterator, Optional

from ..curve_type import classify
from ..exceptions import ResourceLimitExceeded
from ..foliation import Direction, cylinders, trace_rows
from ..tiling import (
    GluingTable,
    MarkedTiling,
    canonical_form,
    glued_corner_pairs,
    is_connected,
    mark_assignments,
    side_corners,
)
from .models import CensusFilter, CountTable, ShardResult, ShardSpec

logger = logging.getLogger(__name__)

NAIVE = "naive"
PRUNED = "pruned"


def frame_group_order(area: int) -> int:
    """Number of labelled descriptions of a surface with ``area`` squares and no symmetry."""
    return 2 ** area * factorial(area)


def involutions(size: int) -> Iterator[tuple[int, ...]]:
    """Fixed-point-free involutions of range(size), in lexicographic order of partner arrays."""
    partners = [-1] * size

    def extend(first: int) -> Iterator[tuple[int, ...]]:
        while first < size and partners[first] >= 0:
            first += 1
        if first == size:
            yield tuple(partners)
            return
        for other in range(first + 1, size):
            if partners[other] < 0:
                partners[first], partners[other] = other, first
                yield from extend(first + 1)
                partners[first] = partners[other] = -1

    if size % 2 == 0:
        yield from extend(0)


@lru_cache(maxsize=16)
def all_involutions(size: int) -> tuple[tuple[int, ...], ...]:
    return tuple(involutions(size))


def double_factorial(n: int) -> int:
    return prod(range(n, 0, -2))


# --- horizontal orbit representatives ------------------------------------------

def row_lengths(h_pairs: tuple[int, ...]) -> tuple[int, ...]:
    """Lengths of the horizontal rows, longest first."""
    return tuple(sorted((len(row.states) for row in trace_rows(h_pairs)), reverse=True))


def horizontal_key(h_pairs: tuple[int, ...]) -> tuple[int, ...]:
    """Complete invariant of a horizontal matching under relabelings and per-square half turns."""
    return row_lengths(h_pairs)


def partitions(total: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``total`` into non-increasing parts, in reverse lexicographic order."""
    if largest is None:
        largest = total
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in partitions(total - first, first):
            yield (first, *rest)


def row_matching(lengths: tuple[int, ...]) -> tuple[int, ...]:
    """Horizontal matching whose rows are cylinders on consecutive squares of the given lengths."""
    partners = [-1] * (2 * sum(lengths))
    start = 0
    for length in lengths:
        for k in range(length):
            left = start + k
            right = start + (k + 1) % length
            partners[2 * left] = 2 * right + 1
            partners[2 * right + 1] = 2 * left
        start += length
    return tuple(partners)


def row_orbit_size(lengths: tuple[int, ...]) -> int:
    """Number of horizontal matchings with the given row lengths.

    The squares are arranged like a permutation with these cycle lengths,
    and each square outside the first of its row can face either way.
    """
    area = sum(lengths)
    multiplicities = Counter(lengths).values()
    arrangements = factorial(area) // (prod(lengths) * prod(factorial(m) for m in multiplicities))
    return arrangements * 2 ** (area - len(lengths))


@dataclass(frozen=True)
class HorizontalClass:
    h_pairs: tuple[int, ...]
    orbit_size: int
    row_lengths: tuple[int, ...]

    @property
    def n_rows(self) -> int:
        return len(self.row_lengths)


@lru_cache(maxsize=32)
def horizontal_representatives(area: int) -> tuple[HorizontalClass, ...]:
    """One matching per partition of ``area`` into row lengths, with the orbit size."""
    reps = tuple(
        HorizontalClass(row_matching(lengths), row_orbit_size(lengths), lengths) for lengths in partitions(area)
    )
    logger.debug(f"{len(reps)} horizontal classes at area {area}")
    return reps


def horizontal_pool(area: int, filters: CensusFilter) -> tuple[HorizontalClass, ...]:
    return tuple(rep for rep in horizontal_representatives(area) if filters.accepts_rows(rep.row_lengths))


# --- classification of leaves ----------------------------------------------------

@dataclass(frozen=True)
class SurfaceRecord:
    h_type: str
    v_type: str
    h_shapes: tuple[tuple[int, int], ...]


class SurfaceClassifier:
    """Memoizes horizontal and vertical types by canonical form."""

    def __init__(self, max_entries: int = 200_000):
        self.max_entries = max_entries
        self._memo: dict[bytes, SurfaceRecord] = {}
        self.hits = 0
        self.misses = 0

    def __call__(self, mt: MarkedTiling) -> SurfaceRecord:
        key = canonical_form(mt)
        record = self._memo.get(key)
        if record is not None:
            self.hits += 1
            return record
        self.misses += 1
        record = SurfaceRecord(
            h_type=classify(mt, Direction.HORIZONTAL).key,
            v_type=classify(mt, Direction.VERTICAL).key,
            h_shapes=tuple((c.circumference, c.height) for c in cylinders(mt, Direction.HORIZONTAL)),
        )
        if len(self._memo) >= self.max_entries:
            self._memo.clear()
        self._memo[key] = record
        return record


_shared_classifier = SurfaceClassifier()


@dataclass
class _Leaves:
    """Shared leaf processing for both enumerators."""
    g: int
    n: int
    filters: CensusFilter
    result: ShardResult
    max_tables: Optional[int]
    classifier: SurfaceClassifier

    def tick(self, count: int = 1) -> None:
        """Count ``count`` examined tables; the cap trips at the first table past it."""
        self.result.examined += count
        if self.max_tables is not None and self.result.examined > self.max_tables:
            self.result.examined = self.max_tables + 1
            raise ResourceLimitExceeded(self.max_tables, self.result.examined)

    def visit(self, h_pairs: tuple[int, ...], v_pairs: tuple[int, ...], weight: Fraction) -> None:
        self.tick()
        table = GluingTable(len(h_pairs) // 2, h_pairs, v_pairs)
        if not is_connected(table):
            return
        if 2 - len(table.cone.orbits) + table.n_squares != 2 * self.g:
            return
        for mt in mark_assignments(table, self.n):
            record = self.classifier(mt)
            if not self.filters.accepts_cylinders(record.h_shapes):
                continue
            if not self.filters.accepts_h_type(record.h_type):
                continue
            self.result.add(record.h_type, record.v_type, weight)


# --- naive enumeration -------------------------------------------------------------

class _VertexCount:
    """Vertex classes after the horizontal gluing, completed for one vertical matching at a time."""

    def __init__(self, h_pairs: tuple[int, ...]):
        parent = list(range(2 * len(h_pairs)))

        def find(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        for a, b in enumerate(h_pairs):
            if a < b:
                for c1, c2 in glued_corner_pairs(a, b, horizontal=True):
                    r1, r2 = find(c1), find(c2)
                    if r1 != r2:
                        parent[r1] = r2
        self.roots = [find(c) for c in range(len(parent))]
        self.classes = len(set(self.roots))

    def __call__(self, v_pairs: tuple[int, ...]) -> int:
        parent = self.roots[:]
        classes = self.classes

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in enumerate(v_pairs):
            if a < b:
                for c1, c2 in glued_corner_pairs(a, b, horizontal=False):
                    r1, r2 = find(c1), find(c2)
                    if r1 != r2:
                        parent[r1] = r2
                        classes -= 1
        return classes


def run_naive_shard(
    spec: ShardSpec, g: int, n: int, filters: CensusFilter, max_tables: Optional[int] = None
) -> ShardResult:
    """All vertical matchings against the h_index-th horizontal matching.

    Every vertical matching counts as examined. Tables are only built when
    the vertex count fits the genus and the filters accept the rows.
    """
    size = 2 * spec.area
    h_pairs = all_involutions(size)[spec.h_index]
    result = ShardResult(spec=spec)
    leaves = _Leaves(g, n, filters, result, max_tables, _shared_classifier)
    if not filters.accepts_rows(row_lengths(h_pairs)):
        leaves.tick(double_factorial(size - 1))
        return result
    weight = Fraction(1, frame_group_order(spec.area))
    vertex_count = _VertexCount(h_pairs)
    target = 2 - 2 * g + spec.area
    for v_pairs in all_involutions(size):
        if vertex_count(v_pairs) != target:
            leaves.tick()
            continue
        leaves.visit(h_pairs, v_pairs, weight)
    return result


# --- pruned enumeration ------------------------------------------------------------

class _RollbackUnionFind:
    """Union-find with per-root counters and an undo log (no path compression)."""

    def __init__(self, size: int, counters: list[list[int]]):
        self.parent = list(range(size))
        self.size = [1] * size
        self.counters = counters
        self.log: list[tuple] = []

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.log.append(("union", rb, ra))
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        for counter in self.counters:
            counter[ra] += counter[rb]
        return ra

    def add(self, root: int, counter: int, delta: int) -> None:
        self.log.append(("add", root, counter, delta))
        self.counters[counter][root] += delta

    def mark(self) -> int:
        return len(self.log)

    def undo(self, mark: int) -> None:
        while len(self.log) > mark:
            entry = self.log.pop()
            if entry[0] == "add":
                _, root, counter, delta = entry
                self.counters[counter][root] -= delta
            else:
                _, child, root = entry
                self.parent[child] = child
                self.size[root] -= self.size[child]
                for counter in self.counters:
                    counter[root] -= counter[child]


@dataclass(frozen=True)
class _Progress:
    closed: int
    poles: int
    open_classes: int


class VerticalSearch:
    """Depth-first search over vertical matchings for a fixed horizontal matching.

    A vertex class is closed once every corner in it has its vertical side
    glued, and open otherwise. Closed classes never change again and open
    classes can only merge or close, so the final vertex count lies between
    ``closed`` and ``closed + open``. A branch ends when the target vertex
    count leaves that range, when more angle-pi classes close than there
    are marked points, or when a closed group of squares is smaller than the
    whole table.
    """

    def __init__(self, h_pairs: tuple[int, ...], g: int, n: int):
        self.h_pairs = h_pairs
        self.n_squares = len(h_pairs) // 2
        self.n = n
        self.target_vertices = 2 - 2 * g + self.n_squares
        size = self.n_squares

        self.corners = _RollbackUnionFind(4 * size, [[1] * (4 * size)])
        self.squares = _RollbackUnionFind(size, [[2] * size])
        for a, b in enumerate(h_pairs):
            if a < b:
                self.squares.union(a >> 1, b >> 1)
                for c1, c2 in glued_corner_pairs(a, b, horizontal=True):
                    self.corners.union(c1, c2)
        self.corners.log.clear()
        self.squares.log.clear()
        open_classes = len({self.corners.find(c) for c in range(4 * size)})
        self.start = _Progress(closed=0, poles=0, open_classes=open_classes)
        self.v_pairs = [-1] * (2 * size)
        self.pruned = 0

    def _glue(self, a: int, b: int, progress: _Progress) -> Optional[_Progress]:
        """Pair vertical slots a and b; None when the branch is dead."""
        closed, poles, open_classes = progress.closed, progress.poles, progress.open_classes
        for c1, c2 in glued_corner_pairs(a, b, horizontal=False):
            if self.corners.find(c1) != self.corners.find(c2):
                self.corners.union(c1, c2)
                open_classes -= 1
        touched = set()
        for slot in (a, b):
            for corner in side_corners(slot, horizontal=False):
                root = self.corners.find(corner)
                self.corners.add(root, 0, -1)
                touched.add(root)
        for root in touched:
            if self.corners.counters[0][root] == 0:
                closed += 1
                open_classes -= 1
                if self.corners.size[root] == 2:
                    poles += 1
        if closed > self.target_vertices or closed + open_classes < self.target_vertices or poles > self.n:
            return None

        root = self.squares.union(a >> 1, b >> 1)
        self.squares.add(root, 0, -2)
        if self.squares.counters[0][root] == 0 and self.squares.size[root] < self.n_squares:
            return None
        return _Progress(closed, poles, open_classes)

    def _search(self, first: int, progress: _Progress, heads: Optional[list[int]]) -> Iterator[tuple[int, ...]]:
        v_pairs = self.v_pairs
        while first < len(v_pairs) and v_pairs[first] >= 0:
            first += 1
        if first == len(v_pairs):
            yield tuple(v_pairs)
            return
        candidates = heads if heads is not None else range(first + 1, len(v_pairs))
        for other in candidates:
            if v_pairs[other] >= 0:
                continue
            mark_c, mark_s = self.corners.mark(), self.squares.mark()
            v_pairs[first], v_pairs[other] = other, first
            state = self._glue(first, other, progress)
            if state is None:
                self.pruned += 1
            else:
                yield from self._search(first + 1, state, None)
            v_pairs[first] = v_pairs[other] = -1
            self.corners.undo(mark_c)
            self.squares.undo(mark_s)

    def matchings(self, v_head: Optional[int] = None) -> Iterator[tuple[int, ...]]:
        """Vertical matchings surviving the pruning, optionally with slot 0 paired to ``v_head``."""
        heads = None if v_head is None else [v_head]
        yield from self._search(0, self.start, heads)


def run_pruned_shard(
    spec: ShardSpec, g: int, n: int, filters: CensusFilter, max_tables: Optional[int] = None
) -> ShardResult:
    rep = horizontal_pool(spec.area, filters)[spec.h_index]
    result = ShardResult(spec=spec)
    leaves = _Leaves(g, n, filters, result, max_tables, _shared_classifier)
    weight = Fraction(rep.orbit_size, frame_group_order(spec.area))
    search = VerticalSearch(rep.h_pairs, g, n)
    for v_pairs in search.matchings(spec.v_head):
        leaves.visit(rep.h_pairs, v_pairs, weight)
    logger.debug(f"Shard {spec.name}: {result.examined} tables, {search.pruned} branches pruned")
    return result


def run_shard(
    spec: ShardSpec, g: int, n: int, filters: CensusFilter, max_tables: Optional[int] = None
) -> ShardResult:
    runner = run_naive_shard if spec.mode == NAIVE else run_pruned_shard
    return runner(spec, g, n, filters, max_tables)


def plan_shards(mode: str, area: int, filters: CensusFilter) -> list[ShardSpec]:
    if mode == NAIVE:
        return [ShardSpec(NAIVE, area, h_index) for h_index in range(len(all_involutions(2 * area)))]
    return [
        ShardSpec(PRUNED, area, h_index, v_head)
        for h_index in range(len(horizontal_pool(area, filters)))
        for v_head in range(1, 2 * area)
    ]


def _enumerate(
    mode: str, g: int, n: int, area: int, filters: Optional[CensusFilter], max_tables: Optional[int]
) -> CountTable:
    filters = filters or CensusFilter()
    table = CountTable(g, n)
    examined = 0
    for spec in plan_shards(mode, area, filters):
        remaining = None if max_tables is None else max_tables - examined
        try:
            result = run_shard(spec, g, n, filters, remaining)
        except ResourceLimitExceeded as e:
            raise ResourceLimitExceeded(max_tables, examined + e.examined) from e
        examined += result.examined
        table.add_shard(result)
    logger.debug(f"{mode} enumeration of (g={g}, n={n}) at area {area}: {examined} tables")
    return table


def enumerate_naive(
    g: int, n: int, area: int, filters: Optional[CensusFilter] = None, max_tables: Optional[int] = None
) -> CountTable:
    """Contribution of area exactly ``area``, walking every pair of matchings."""
    return _enumerate(NAIVE, g, n, area, filters, max_tables)


def enumerate_pruned(
    g: int, n: int, area: int, filters: Optional[CensusFilter] = None, max_tables: Optional[int] = None
) -> CountTable:
    """Same buckets as :func:`enumerate_naive`, from orbit representatives and a pruned search."""
    return _enumerate(PRUNED, g, n, area, filters, max_tables)
