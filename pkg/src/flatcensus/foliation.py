"""
Horizontal and vertical cylinder decompositions of square-tiled surfaces.

Everything is computed in the horizontal direction; the vertical direction
is the horizontal direction of the quarter-turned surface, which keeps the
square labels.
"""

import logging
from dataclasses import dataclass
from enum import Enum

from .exceptions import AnnulusValidationError, InvalidTableError
from .tiling import E, N, S, W, MarkedTiling, _UnionFind, side_corners

logger = logging.getLogger(__name__)

State = tuple[int, int]


class Direction(str, Enum):
    """Direction of the straight-line flow"""
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"Direction.{self.name}"

    @classmethod
    def from_string(cls, value: str) -> 'Direction':
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"Invalid direction: '{value}'. Must be one of {[d.value for d in cls]}")


def oriented(mt: MarkedTiling, direction: Direction) -> MarkedTiling:
    """The marked tiling whose horizontal direction is ``direction`` of ``mt``."""
    return mt if direction == Direction.HORIZONTAL else mt.rotate90()


@dataclass(frozen=True)
class Row:
    """A closed leaf through square mid-lines: a cyclic sequence of (square, sign).

    Rows start at their smallest square, traversed with sign +1.
    """
    states: tuple[State, ...]

    def __len__(self) -> int:
        return len(self.states)

    @property
    def squares(self) -> tuple[int, ...]:
        return tuple(square for square, _ in self.states)

    def upper_slots(self) -> tuple[int, ...]:
        """Horizontal sides on the left of the direction of travel."""
        return tuple(2 * sq + (N if sign > 0 else S) for sq, sign in self.states)

    def lower_slots(self) -> tuple[int, ...]:
        return tuple(2 * sq + (S if sign > 0 else N) for sq, sign in self.states)


@dataclass(frozen=True)
class CoreCircle:
    """Mid-line of one row; lives on grid lines of the 2x2 refinement."""
    squares: tuple[int, ...]

    def refined_cut_slots(self) -> list[tuple[int, int]]:
        """Vertical-slot pairs of the refinement that run along this circle."""
        pairs = []
        for sq in self.squares:
            base = 4 * sq
            pairs.append((2 * (base + 0) + N, 2 * (base + 3) + S))
            pairs.append((2 * (base + 1) + N, 2 * (base + 2) + S))
        return pairs


@dataclass(frozen=True)
class Cylinder:
    direction: Direction
    circumference: int
    height: int
    rows: tuple[Row, ...]
    core: CoreCircle


@dataclass(frozen=True)
class CurveComponent:
    core: CoreCircle
    weight: int


@dataclass(frozen=True)
class CurveSystem:
    """Weighted core multi-curve of a cylinder decomposition."""
    direction: Direction
    components: tuple[CurveComponent, ...]

    def __post_init__(self):
        if any(c.weight < 1 for c in self.components):
            raise ValueError("Curve weights must be at least 1")
        seen: set[int] = set()
        for component in self.components:
            squares = set(component.core.squares)
            if squares & seen:
                raise ValueError("Core circles must be disjoint")
            seen |= squares

    def __len__(self) -> int:
        return len(self.components)


def _step(h_pairs: tuple[int, ...], state: State) -> State:
    square, sign = state
    partner = h_pairs[2 * square + (E if sign > 0 else W)]
    return partner >> 1, 1 if (partner & 1) == W else -1


def _canonical_row(states: list[State]) -> Row:
    start = min(range(len(states)), key=lambda k: states[k][0])
    if states[start][1] < 0:
        states = [(sq, -sign) for sq, sign in reversed(states)]
        start = len(states) - 1 - start
    return Row(tuple(states[start:] + states[:start]))


def trace_rows(h_pairs: tuple[int, ...]) -> list[Row]:
    """Orbits of the horizontal flow on (square, sign) states, one per row."""
    n_squares = len(h_pairs) // 2
    seen = [False] * n_squares
    rows = []
    for first in range(n_squares):
        if seen[first]:
            continue
        states = []
        state = (first, 1)
        while True:
            if seen[state[0]]:
                raise InvalidTableError(f"Square {state[0]} is traversed twice by one leaf")
            seen[state[0]] = True
            states.append(state)
            state = _step(h_pairs, state)
            if state == (first, 1):
                break
        rows.append(_canonical_row(states))
    return rows


def rows(mt: MarkedTiling, direction: Direction) -> list[Row]:
    return trace_rows(oriented(mt, direction).table.h_pairs)


def _boundary_is_regular(mt: MarkedTiling, slots: tuple[int, ...]) -> bool:
    vertex_of = mt.cone.vertex_of
    for slot in slots:
        for corner in side_corners(slot, horizontal=False):
            if mt.is_singular(vertex_of[corner]):
                return False
    return True


def _stack_order(members: list[int], adjacency: dict[int, list[int]]) -> list[int]:
    if len(members) == 1:
        return members
    ends = [r for r in members if len(adjacency.get(r, ())) == 1]
    order = [min(ends)]
    previous = -1
    while len(order) < len(members):
        current = order[-1]
        nxt = [r for r in adjacency[current] if r != previous]
        previous = current
        order.append(nxt[0])
    return order


def _horizontal_cylinders(mt: MarkedTiling, direction: Direction) -> list[Cylinder]:
    table = mt.table
    row_list = trace_rows(table.h_pairs)
    row_of = {}
    for index, row in enumerate(row_list):
        for sq in row.squares:
            row_of[sq] = index

    uf = _UnionFind(len(row_list))
    circles: dict[frozenset[int], tuple[int, int]] = {}
    for index, row in enumerate(row_list):
        for slots in (row.upper_slots(), row.lower_slots()):
            if not _boundary_is_regular(mt, slots):
                continue
            partners = tuple(table.v_pairs[s] for s in slots)
            neighbours = {row_of[p >> 1] for p in partners}
            if len(neighbours) != 1:
                raise AnnulusValidationError(
                    f"Regular circle of row {index} borders {len(neighbours)} rows", str(direction)
                )
            other = neighbours.pop()
            other_row = row_list[other]
            if set(partners) not in (set(other_row.upper_slots()), set(other_row.lower_slots())):
                raise AnnulusValidationError(
                    f"Regular circle of row {index} does not match a side of row {other}", str(direction)
                )
            if other == index:
                raise AnnulusValidationError(
                    f"Singularity-free circle of row {index} is glued to the same row", str(direction)
                )
            circles[frozenset(slots + partners)] = (index, other)
            uf.union(index, other)

    adjacency: dict[int, list[int]] = {}
    for a, b in circles.values():
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    cylinders = []
    for members in uf.groups():
        edges = sum(1 for a, _ in circles.values() if uf.find(a) == uf.find(members[0]))
        if edges != len(members) - 1:
            raise AnnulusValidationError(
                f"Rows {members} close up without a singular boundary", str(direction)
            )
        lengths = {len(row_list[r]) for r in members}
        if len(lengths) != 1:
            raise AnnulusValidationError(f"Rows {members} have lengths {sorted(lengths)}", str(direction))
        order = _stack_order(members, adjacency)
        stacked = tuple(row_list[r] for r in order)
        cylinders.append(Cylinder(
            direction=direction,
            circumference=lengths.pop(),
            height=len(members),
            rows=stacked,
            core=CoreCircle(stacked[len(stacked) // 2].squares),
        ))
    return cylinders


def cylinders(mt: MarkedTiling, direction: Direction) -> list[Cylinder]:
    """Maximal cylinders: rows merged across circles without singular or marked vertices."""
    result = _horizontal_cylinders(oriented(mt, direction), direction)
    logger.debug(
        f"{direction} cylinders of {mt.n_squares}-square surface: "
        f"{[(c.circumference, c.height) for c in result]}"
    )
    return result


def core_multicurve(mt: MarkedTiling, direction: Direction) -> CurveSystem:
    return CurveSystem(
        direction=direction,
        components=tuple(CurveComponent(core=c.core, weight=c.height) for c in cylinders(mt, direction)),
    )


def cylinder_report(mt: MarkedTiling) -> dict:
    report = {}
    for direction in Direction:
        report[direction.value] = [
            {"circumference": c.circumference, "height": c.height, "core": list(c.core.squares)}
            for c in cylinders(mt, direction)
        ]
    return report
