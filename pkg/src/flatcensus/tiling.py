"""
Combinatorial model of square-tiled half-translation surfaces.

A surface with N unit squares is a pair of fixed-point-free involutions:
``h_pairs`` on the vertical-side slots (E_i = 2i, W_i = 2i+1) and ``v_pairs``
on the horizontal-side slots (N_i = 2i, S_i = 2i+1). Pairs of opposite sides
(E-W, N-S) are translation gluings, pairs of equal sides are half-turns.
Square corners are numbered 4i+0 = SW, 4i+1 = SE, 4i+2 = NE, 4i+3 = NW.
"""

import logging
import struct
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .exceptions import DisconnectedTableError, DomainError, InvalidTableError

logger = logging.getLogger(__name__)

SW, SE, NE, NW = 0, 1, 2, 3
E, W = 0, 1
N, S = 0, 1

# corners along each side, bottom to top / left to right
_H_SIDE_CORNERS = ((SE, NE), (SW, NW))
_V_SIDE_CORNERS = ((NW, NE), (SW, SE))

REGULAR_ANGLE = 4


class _UnionFind:
    """Union-find over ``range(size)`` with path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra

    def groups(self) -> list[list[int]]:
        buckets: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            buckets.setdefault(self.find(x), []).append(x)
        return sorted(buckets.values())


def side_corners(slot: int, horizontal: bool) -> tuple[int, int]:
    """The two corner ids on a side, in side order."""
    square, side = divmod(slot, 2)
    table = _H_SIDE_CORNERS if horizontal else _V_SIDE_CORNERS
    first, second = table[side]
    return 4 * square + first, 4 * square + second


def glued_corner_pairs(a: int, b: int, horizontal: bool) -> tuple[tuple[int, int], tuple[int, int]]:
    """Corner identifications induced by gluing slot ``a`` to slot ``b``.

    Translation gluings (opposite sides) match corners in side order,
    half-turn gluings (equal sides) match them in reverse order.
    """
    a0, a1 = side_corners(a, horizontal)
    b0, b1 = side_corners(b, horizontal)
    if (a & 1) != (b & 1):
        return (a0, b0), (a1, b1)
    return (a0, b1), (a1, b0)


class ViolationKind(str, Enum):
    FIXED_SLOT = "fixed slot"
    COVERAGE_GAP = "coverage gap"
    NOT_INVOLUTION = "not an involution"
    OUT_OF_RANGE = "out of range"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    direction: str
    slot: int

    def __str__(self) -> str:
        return f"{self.kind.value} ({self.direction} slot {self.slot})"


@dataclass(frozen=True)
class TableDiagnostics:
    """Result of :func:`validate_table`."""
    violations: tuple[Violation, ...]
    connected: bool

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


@dataclass(frozen=True)
class GluingTable:
    """Pairings of square sides; ``h_pairs[a]`` is the partner of slot ``a``."""
    n_squares: int
    h_pairs: tuple[int, ...]
    v_pairs: tuple[int, ...]

    def __post_init__(self):
        if self.n_squares < 1:
            raise InvalidTableError("A table needs at least one square")
        object.__setattr__(self, "h_pairs", tuple(self.h_pairs))
        object.__setattr__(self, "v_pairs", tuple(self.v_pairs))
        if len(self.h_pairs) != 2 * self.n_squares or len(self.v_pairs) != 2 * self.n_squares:
            raise InvalidTableError(
                f"Expected {2 * self.n_squares} slots per direction, got "
                f"{len(self.h_pairs)} and {len(self.v_pairs)}"
            )

    @classmethod
    def from_pairs(
        cls, n_squares: int, h_pairs: Iterable[Sequence[int]], v_pairs: Iterable[Sequence[int]]
    ) -> 'GluingTable':
        """Build a table from lists of slot pairs; missing slots become -1."""
        def partner_array(pairs: Iterable[Sequence[int]]) -> tuple[int, ...]:
            partners = [-1] * (2 * n_squares)
            for pair in pairs:
                if len(pair) != 2:
                    raise InvalidTableError(f"Pair {list(pair)} does not have two slots")
                a, b = int(pair[0]), int(pair[1])
                if not (0 <= a < 2 * n_squares and 0 <= b < 2 * n_squares):
                    raise InvalidTableError(f"Pair {[a, b]} refers to a slot outside 0..{2 * n_squares - 1}")
                partners[a] = b
                partners[b] = a
            return tuple(partners)

        return cls(n_squares, partner_array(h_pairs), partner_array(v_pairs))

    @classmethod
    def from_dict(cls, data: dict) -> 'GluingTable':
        try:
            return cls.from_pairs(int(data["n_squares"]), data["h_pairs"], data["v_pairs"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidTableError(f"Malformed table description: {e}") from e

    def to_dict(self) -> dict:
        return {
            "n_squares": self.n_squares,
            "h_pairs": _pairs_of(self.h_pairs),
            "v_pairs": _pairs_of(self.v_pairs),
        }

    @cached_property
    def cone(self) -> 'ConeData':
        return corner_orbits(self)


def _pairs_of(partners: Sequence[int]) -> list[list[int]]:
    return [[a, b] for a, b in enumerate(partners) if a < b or b < 0]


def _check_matching(partners: Sequence[int], direction: str) -> list[Violation]:
    violations = []
    size = len(partners)
    for a, b in enumerate(partners):
        if b < 0:
            violations.append(Violation(ViolationKind.COVERAGE_GAP, direction, a))
        elif b >= size:
            violations.append(Violation(ViolationKind.OUT_OF_RANGE, direction, a))
        elif b == a:
            violations.append(Violation(ViolationKind.FIXED_SLOT, direction, a))
        elif partners[b] != a:
            violations.append(Violation(ViolationKind.NOT_INVOLUTION, direction, a))
    return violations


def _square_components(table: GluingTable) -> _UnionFind:
    uf = _UnionFind(table.n_squares)
    for partners in (table.h_pairs, table.v_pairs):
        for a, b in enumerate(partners):
            if 0 <= b < len(partners):
                uf.union(a // 2, b // 2)
    return uf


def is_connected(table: GluingTable) -> bool:
    uf = _square_components(table)
    root = uf.find(0)
    return all(uf.find(i) == root for i in range(table.n_squares))


def validate_table(table: GluingTable) -> TableDiagnostics:
    """Report fixed slots, coverage gaps, broken involutions and connectivity."""
    violations = _check_matching(table.h_pairs, "h") + _check_matching(table.v_pairs, "v")
    return TableDiagnostics(violations=tuple(violations), connected=is_connected(table))


def _require_valid(table: GluingTable) -> None:
    diagnostics = validate_table(table)
    if not diagnostics.ok:
        raise InvalidTableError(
            f"Invalid gluing table: {', '.join(diagnostics.messages())}", diagnostics.violations
        )


@dataclass(frozen=True)
class ConeData:
    """Vertex classes of the square corners and their cone angles (in units of pi/2)."""
    orbits: tuple[tuple[int, ...], ...]
    angles: tuple[int, ...]

    @cached_property
    def vertex_of(self) -> dict[int, int]:
        """Map corner id -> vertex id (the minimal corner of its class)."""
        return {corner: orbit[0] for orbit in self.orbits for corner in orbit}

    @cached_property
    def orbit_of(self) -> dict[int, tuple[int, ...]]:
        return {orbit[0]: orbit for orbit in self.orbits}

    @cached_property
    def angle_of(self) -> dict[int, int]:
        return {orbit[0]: k for orbit, k in zip(self.orbits, self.angles)}

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(orbit[0] for orbit in self.orbits)

    @property
    def poles(self) -> tuple[int, ...]:
        """Vertices of angle pi."""
        return tuple(orbit[0] for orbit, k in zip(self.orbits, self.angles) if k == 2)

    def order(self, vertex: int) -> int:
        """Singularity order k/2 - 2 of a vertex."""
        return self.angle_of[vertex] // 2 - 2

    def gauss_bonnet_sum(self) -> int:
        return sum(k // 2 - 2 for k in self.angles)


def corner_orbits(table: GluingTable) -> ConeData:
    _require_valid(table)
    uf = _UnionFind(4 * table.n_squares)
    for horizontal, partners in ((True, table.h_pairs), (False, table.v_pairs)):
        for a, b in enumerate(partners):
            if a < b:
                for c1, c2 in glued_corner_pairs(a, b, horizontal):
                    uf.union(c1, c2)
    orbits = tuple(tuple(group) for group in uf.groups())
    angles = tuple(len(orbit) for orbit in orbits)
    odd = [orbit[0] for orbit, k in zip(orbits, angles) if k % 2]
    if odd:
        raise InvalidTableError(f"Vertex classes {odd} have odd corner count")
    return ConeData(orbits=orbits, angles=angles)


def genus(table: GluingTable) -> int:
    """Genus (2 - V + N) / 2, cross-checked against Gauss-Bonnet."""
    cone = table.cone
    if not is_connected(table):
        raise DisconnectedTableError(f"Table with {table.n_squares} squares is not connected")
    twice = 2 - len(cone.orbits) + table.n_squares
    g = twice // 2
    if twice % 2 or cone.gauss_bonnet_sum() != 4 * g - 4:
        raise InvalidTableError(
            f"Euler characteristic and cone angles disagree (V={len(cone.orbits)}, N={table.n_squares})"
        )
    return g


# --- symmetries of the square frame ---------------------------------------

def rotate90(table: GluingTable) -> GluingTable:
    """Quarter turn: new E/W sides are the old N/S sides, new N/S are old W/E."""
    h = table.v_pairs
    v = [0] * len(table.h_pairs)
    for s, t in enumerate(table.h_pairs):
        v[s ^ 1] = t ^ 1 if t >= 0 else t
    return GluingTable(table.n_squares, h, tuple(v))


def flip_squares(table: GluingTable, flips: Sequence[int]) -> GluingTable:
    """Half turn of each square i with ``flips[i] == 1`` inside its own frame.

    The surface and its quadratic differential are unchanged; only the
    description moves, turning translation gluings at a flipped square into
    half-turns and back.
    """
    if len(flips) != table.n_squares:
        raise InvalidTableError(f"Expected {table.n_squares} flip bits, got {len(flips)}")

    def flipped(partners: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(partners)
        for s, t in enumerate(partners):
            out[s ^ flips[s >> 1]] = t ^ flips[t >> 1] if t >= 0 else t
        return tuple(out)

    return GluingTable(table.n_squares, flipped(table.h_pairs), flipped(table.v_pairs))


def frame_flip(table: GluingTable) -> GluingTable:
    """Half turn of every square: E<->W and N<->S."""
    return flip_squares(table, (1,) * table.n_squares)


def relabel(table: GluingTable, perm: Sequence[int]) -> GluingTable:
    """Rename square i to perm[i]."""
    def moved(partners: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(partners)
        for s, t in enumerate(partners):
            out[2 * perm[s >> 1] + (s & 1)] = 2 * perm[t >> 1] + (t & 1)
        return tuple(out)

    return GluingTable(table.n_squares, moved(table.h_pairs), moved(table.v_pairs))


def rotate_corner(corner: int) -> int:
    return 4 * (corner // 4) + (corner % 4 - 1) % 4


def flip_corner(corner: int) -> int:
    return corner ^ 2


def refine_corner(corner: int) -> int:
    """Corner of the 2x2 refinement sitting at the same point as ``corner``."""
    return 4 * corner + corner % 4


def subdivide2(table: GluingTable) -> GluingTable:
    """Replace each square by a 2x2 block; sub-square 4i+q sits at corner q of square i."""
    _require_valid(table)
    h = [-1] * (8 * table.n_squares)
    v = [-1] * (8 * table.n_squares)

    for i in range(table.n_squares):
        base = 4 * i
        # inner gluings of the block
        for left, right in ((SW, SE), (NW, NE)):
            h[2 * (base + left) + E] = 2 * (base + right) + W
            h[2 * (base + right) + W] = 2 * (base + left) + E
        for low, high in ((SW, NW), (SE, NE)):
            v[2 * (base + low) + N] = 2 * (base + high) + S
            v[2 * (base + high) + S] = 2 * (base + low) + N

    for horizontal, partners, out in ((True, table.h_pairs, h), (False, table.v_pairs, v)):
        for a, b in enumerate(partners):
            if a < b:
                for c1, c2 in glued_corner_pairs(a, b, horizontal):
                    out[2 * c1 + (a & 1)] = 2 * c2 + (b & 1)
                    out[2 * c2 + (b & 1)] = 2 * c1 + (a & 1)

    return GluingTable(4 * table.n_squares, tuple(h), tuple(v))


# --- marked tilings ----------------------------------------------------------

@dataclass(frozen=True)
class MarkedTiling:
    """A connected gluing table together with a set of marked vertices."""
    table: GluingTable
    marked: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "marked", frozenset(self.marked))
        cone = self.table.cone
        unknown = sorted(self.marked - set(cone.vertex_ids))
        if unknown:
            raise InvalidTableError(f"Marked ids {unknown} are not vertex ids of the table")
        unmarked_poles = sorted(set(cone.poles) - self.marked)
        if unmarked_poles:
            raise InvalidTableError(f"Angle-pi vertices {unmarked_poles} must be marked")
        g = genus(self.table)
        if 2 - 2 * g - len(self.marked) >= 0:
            raise DomainError(
                f"Marked tiling of genus {g} with {len(self.marked)} marked points is not hyperbolic",
                g=g, n=len(self.marked),
            )

    @classmethod
    def from_dict(cls, data: dict) -> 'MarkedTiling':
        table = GluingTable.from_dict(data)
        return cls(table, frozenset(int(x) for x in data.get("marked", [])))

    def to_dict(self) -> dict:
        return {**self.table.to_dict(), "marked": sorted(self.marked)}

    @property
    def n_squares(self) -> int:
        return self.table.n_squares

    @property
    def cone(self) -> ConeData:
        return self.table.cone

    @cached_property
    def genus(self) -> int:
        return genus(self.table)

    @property
    def n_marked(self) -> int:
        return len(self.marked)

    def is_singular(self, vertex: int) -> bool:
        """True for cone points and marked points."""
        return self.cone.angle_of[vertex] != REGULAR_ANGLE or vertex in self.marked

    def _moved(self, table: GluingTable, corner_map) -> 'MarkedTiling':
        vertex_of = table.cone.vertex_of
        return MarkedTiling(table, frozenset(vertex_of[corner_map(c)] for c in self.marked))

    def rotate90(self) -> 'MarkedTiling':
        return self._moved(rotate90(self.table), rotate_corner)

    def frame_flip(self) -> 'MarkedTiling':
        return self._moved(frame_flip(self.table), flip_corner)

    def flip_squares(self, flips: Sequence[int]) -> 'MarkedTiling':
        return self._moved(flip_squares(self.table, flips), lambda c: c ^ (2 * flips[c >> 2]))

    def relabel(self, perm: Sequence[int]) -> 'MarkedTiling':
        return self._moved(relabel(self.table, perm), lambda c: 4 * perm[c // 4] + c % 4)

    def subdivide2(self) -> 'MarkedTiling':
        return self._moved(subdivide2(self.table), refine_corner)


def mark_assignments(table: GluingTable, n: int) -> list[MarkedTiling]:
    """All ways to mark n vertices so that every angle-pi vertex is marked."""
    if n < 0:
        raise DomainError("Number of marked points must be non-negative", n=n)
    g = genus(table)
    if 2 - 2 * g - n >= 0:
        logger.debug(f"No hyperbolic marking of a genus {g} table with {n} points")
        return []
    cone = table.cone
    poles = set(cone.poles)
    if len(poles) > n:
        return []
    free = [vertex for vertex in cone.vertex_ids if vertex not in poles]
    return [
        MarkedTiling(table, frozenset(poles.union(extra)))
        for extra in combinations(free, n - len(poles))
    ]


def stratum(mt: MarkedTiling) -> tuple[int, ...]:
    """Sorted singularity orders of the cone points and marked points."""
    cone = mt.cone
    return tuple(sorted(cone.order(v) for v in cone.vertex_ids if mt.is_singular(v)))


# --- canonical labelling and automorphisms ----------------------------------

Symmetry = tuple[tuple[int, ...], tuple[int, ...]]


def _bfs_frames(table: GluingTable, start: int, flip: int) -> tuple[list[int], list[int]]:
    """Breadth-first labels and flip bits rooted at ``start`` with frame bit ``flip``.

    Every square reached through a side is turned so that the side it was
    reached by becomes a translation gluing.
    """
    labels = [-1] * table.n_squares
    flips = [0] * table.n_squares
    labels[start] = 0
    flips[start] = flip
    order = [start]
    k = 0
    while k < len(order):
        square = order[k]
        k += 1
        for partners in (table.h_pairs, table.v_pairs):
            for side in (0, 1):
                partner = partners[2 * square + (side ^ flips[square])]
                neighbour = partner >> 1
                if labels[neighbour] < 0:
                    labels[neighbour] = len(order)
                    flips[neighbour] = (partner & 1) ^ side ^ 1
                    order.append(neighbour)
    if len(order) != table.n_squares:
        raise DisconnectedTableError("Canonical labelling needs a connected table")
    return labels, flips


def _labellings(mt: MarkedTiling):
    """Yield (labels, flips, encoding) for every start square and start frame.

    The first item is rooted at square 0 in its original frame.
    """
    table = mt.table
    size = mt.n_squares
    marked_orbits = [mt.cone.orbit_of[v] for v in mt.marked]
    for start in range(size):
        for flip in (0, 1):
            labels, flips = _bfs_frames(table, start, flip)

            def slot(s: int) -> int:
                return 2 * labels[s >> 1] + ((s & 1) ^ flips[s >> 1])

            h = [0] * (2 * size)
            v = [0] * (2 * size)
            for s in range(2 * size):
                h[slot(s)] = slot(table.h_pairs[s])
                v[slot(s)] = slot(table.v_pairs[s])
            marks = sorted(
                min(4 * labels[c >> 2] + ((c & 3) ^ (2 * flips[c >> 2])) for c in orbit) for orbit in marked_orbits
            )
            yield labels, flips, (size, *h, *v, len(marks), *marks)


def canonical_form(mt: MarkedTiling) -> bytes:
    """Minimal encoding over relabellings and per-square half turns, as bytes."""
    best = min(encoding for _, _, encoding in _labellings(mt))
    return struct.pack(f">{len(best)}H", *best)


@dataclass(frozen=True)
class AutGroup:
    """Automorphisms as (square permutation, flip bits) pairs.

    The element ``(perm, flips)`` turns square i by a half turn when
    ``flips[i]`` is set and then renames it ``perm[i]``.
    """
    elements: frozenset[Symmetry]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @staticmethod
    def compose(a: Symmetry, b: Symmetry) -> Symmetry:
        """``a`` after ``b``."""
        perm_a, flips_a = a
        perm_b, flips_b = b
        return (
            tuple(perm_a[perm_b[i]] for i in range(len(perm_b))),
            tuple(flips_b[i] ^ flips_a[perm_b[i]] for i in range(len(perm_b))),
        )

    def is_closed(self) -> bool:
        return all(self.compose(a, b) in self.elements for a in self.elements for b in self.elements)


def apply_symmetry(mt: MarkedTiling, element: tuple[Sequence[int], Sequence[int]]) -> MarkedTiling:
    perm, flips = element
    return mt.flip_squares(flips).relabel(perm)


def automorphisms(mt: MarkedTiling) -> AutGroup:
    """Stabilizer of the marked table under relabellings and per-square half turns.

    A symmetry of a connected table is fixed by the image of square 0 and
    its frame there, so comparing every rooted labelling with the one at
    square 0 enumerates the group exactly. The order divides 2^N N! and is
    at most 2N.
    """
    labellings = _labellings(mt)
    reference, reference_flips, target = next(labellings)
    inverse = [0] * mt.n_squares
    for square, label in enumerate(reference):
        inverse[label] = square

    size = mt.n_squares
    elements = {(tuple(range(size)), (0,) * size)}
    for labels, flips, encoding in labellings:
        if encoding == target:
            perm = tuple(inverse[labels[i]] for i in range(size))
            elements.add((perm, tuple(flips[i] ^ reference_flips[perm[i]] for i in range(size))))
    return AutGroup(frozenset(elements))


def connected_components(table: GluingTable) -> list[list[int]]:
    """Squares grouped by connected component (tolerates incomplete tables)."""
    return _square_components(table).groups()
