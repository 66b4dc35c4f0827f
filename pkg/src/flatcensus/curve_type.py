"""
Topological types of weighted multi-curves.

A core multi-curve is cut out of the 2x2 refinement of the surface; the cut
components and the curves joining them form a weighted dual graph whose
normalized canonical form is the type key used by the census.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import permutations, product
from random import Random
from typing import Optional, Sequence

from .exceptions import CurveSystemError, DanglingBoundaryError, DomainError, NormalizationError
from .foliation import CurveSystem, Direction, core_multicurve, oriented, trace_rows
from .tiling import MarkedTiling, _UnionFind, glued_corner_pairs, side_corners

logger = logging.getLogger(__name__)

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class CutComponent:
    """One piece of the cut surface; ``curves`` lists the curve of each boundary circle."""
    genus: int
    n_marked: int
    curves: tuple[int, ...]

    @property
    def n_boundary(self) -> int:
        return len(self.curves)


@dataclass(frozen=True)
class DualGraph:
    """Vertices are (genus, marked count); edges are (end, end, weight) with end <= end."""
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(sorted((min(a, b), max(a, b), w) for a, b, w in self.edges)))
        size = len(self.vertices)
        for a, b, w in self.edges:
            if not (0 <= a < size and 0 <= b < size):
                raise ValueError(f"Edge ({a}, {b}) refers to a missing vertex")
            if w < 1:
                raise ValueError(f"Edge weight {w} must be at least 1")
        if any(g < 0 or n < 0 for g, n in self.vertices):
            raise ValueError("Vertex genus and marked count must be non-negative")

    def degree(self, vertex: int) -> int:
        return sum((a == vertex) + (b == vertex) for a, b, _ in self.edges)

    def euler_characteristic(self) -> int:
        return sum(2 - 2 * g - self.degree(v) for v, (g, _) in enumerate(self.vertices))

    @property
    def n_marked(self) -> int:
        return sum(n for _, n in self.vertices)


@dataclass(frozen=True, order=True)
class TopType:
    """Canonical ASCII key of a normalized dual graph."""
    key: str

    def __str__(self) -> str:
        return self.key

    def encoded(self) -> bytes:
        return self.key.encode("ascii")

    @classmethod
    def from_string(cls, value: str) -> 'TopType':
        if not value.startswith("V:") or "|E:" not in value:
            raise ValueError(f"Not a type key: '{value}'")
        return cls(value)


# --- cutting -----------------------------------------------------------------

def _check_core_system(mt: MarkedTiling, cs: CurveSystem) -> None:
    row_sets = {frozenset(row.squares) for row in trace_rows(oriented(mt, cs.direction).table.h_pairs)}
    for index, component in enumerate(cs.components):
        if frozenset(component.core.squares) not in row_sets:
            raise CurveSystemError(
                f"Curve {index} runs through squares {list(component.core.squares)}, which are not a {cs.direction} row"
            )


def cut_along(mt: MarkedTiling, cs: CurveSystem) -> list[CutComponent]:
    """Cut the refinement of ``mt`` along the cores of ``cs``."""
    _check_core_system(mt, cs)
    refined = oriented(mt, cs.direction).subdivide2()
    table = refined.table
    v_pairs = list(table.v_pairs)

    curve_of_square = {}
    for index, component in enumerate(cs.components):
        for pair in component.core.refined_cut_slots():
            for slot in pair:
                v_pairs[slot] = -1
        for square in component.core.squares:
            curve_of_square[square] = index

    size = table.n_squares
    squares = _UnionFind(size)
    corners = _UnionFind(4 * size)
    # edge_count holds twice the edges per square: a free side is a whole edge
    edge_count = [0] * size
    for horizontal, partners in ((True, table.h_pairs), (False, v_pairs)):
        for a, b in enumerate(partners):
            if b < 0:
                edge_count[a >> 1] += 2
            elif a < b:
                squares.union(a >> 1, b >> 1)
                edge_count[a >> 1] += 1
                edge_count[b >> 1] += 1
                for c1, c2 in glued_corner_pairs(a, b, horizontal):
                    corners.union(c1, c2)

    open_slots = [s for s, partner in enumerate(v_pairs) if partner < 0]
    circles = _UnionFind(len(open_slots))
    slot_at_corner: dict[int, int] = {}
    for index, slot in enumerate(open_slots):
        for corner in side_corners(slot, horizontal=False):
            root = corners.find(corner)
            if root in slot_at_corner:
                circles.union(index, slot_at_corner[root])
            else:
                slot_at_corner[root] = index

    component_of = {root: k for k, root in enumerate(sorted({squares.find(i) for i in range(size)}))}
    n_components = len(component_of)
    faces = [0] * n_components
    edges2 = [0] * n_components
    vertex_sets: list[set[int]] = [set() for _ in range(n_components)]
    for square in range(size):
        k = component_of[squares.find(square)]
        faces[k] += 1
        edges2[k] += edge_count[square]
        for corner in range(4 * square, 4 * square + 4):
            vertex_sets[k].add(corners.find(corner))

    circle_curves: list[list[int]] = [[] for _ in range(n_components)]
    for group in circles.groups():
        slot = open_slots[group[0]]
        curve = curve_of_square[(slot >> 1) // 4]
        circle_curves[component_of[squares.find(slot >> 1)]].append(curve)

    marked = [0] * n_components
    for vertex in refined.marked:
        marked[component_of[squares.find(vertex // 4)]] += 1

    result = []
    for k in range(n_components):
        chi = len(vertex_sets[k]) - edges2[k] // 2 + faces[k]
        twice_genus = 2 - chi - len(circle_curves[k])
        if twice_genus < 0 or twice_genus % 2:
            raise CurveSystemError(f"Cut component {k} has inconsistent Euler characteristic {chi}")
        result.append(CutComponent(
            genus=twice_genus // 2,
            n_marked=marked[k],
            curves=tuple(sorted(circle_curves[k])),
        ))
    logger.debug(f"Cut {len(cs)} curves into components {result}")
    return result


def dual_graph(components: Sequence[CutComponent], cs: CurveSystem) -> DualGraph:
    owners: dict[int, list[int]] = {k: [] for k in range(len(cs))}
    for vertex, component in enumerate(components):
        for curve in component.curves:
            owners.setdefault(curve, []).append(vertex)
    edges = []
    for curve, ends in sorted(owners.items()):
        if len(ends) != 2:
            raise DanglingBoundaryError(curve, len(ends))
        edges.append((ends[0], ends[1], cs.components[curve].weight))
    return DualGraph(
        vertices=tuple((c.genus, c.n_marked) for c in components),
        edges=tuple(edges),
    )


# --- normalization and canonical keys ----------------------------------------

def _contractible(dg: DualGraph) -> list[int]:
    found = []
    for v, (g, n) in enumerate(dg.vertices):
        if g == 0 and n == 0 and dg.degree(v) == 2:
            if any(a == v and b == v for a, b, _ in dg.edges):
                raise NormalizationError(v)
            found.append(v)
    return found


def _contract(dg: DualGraph, vertex: int) -> DualGraph:
    incident = [e for e in dg.edges if vertex in e[:2]]
    rest = [e for e in dg.edges if vertex not in e[:2]]
    (a1, b1, w1), (a2, b2, w2) = incident
    first = b1 if a1 == vertex else a1
    second = b2 if a2 == vertex else a2

    def shift(v: int) -> int:
        return v - 1 if v > vertex else v

    edges = [(shift(a), shift(b), w) for a, b, w in rest]
    edges.append((shift(first), shift(second), w1 + w2))
    vertices = dg.vertices[:vertex] + dg.vertices[vertex + 1:]
    return DualGraph(vertices=vertices, edges=tuple(edges))


def normalize(dg: DualGraph, rng: Optional[Random] = None) -> DualGraph:
    """Contract unmarked annulus vertices, merging parallel cylinder cores."""
    while True:
        candidates = _contractible(dg)
        if not candidates:
            return dg
        vertex = rng.choice(candidates) if rng is not None else candidates[0]
        dg = _contract(dg, vertex)


def _vertex_invariant(dg: DualGraph, v: int) -> tuple:
    ends = sorted((w, a == b) for a, b, w in dg.edges if v in (a, b))
    return (*dg.vertices[v], tuple(ends))


def top_type(dg: DualGraph) -> TopType:
    """Canonical key by minimizing over orderings inside blocks of equal vertex invariants."""
    invariants = [_vertex_invariant(dg, v) for v in range(len(dg.vertices))]
    order = sorted(range(len(dg.vertices)), key=lambda v: invariants[v])
    blocks: list[list[int]] = []
    for v in order:
        if blocks and invariants[blocks[-1][0]] == invariants[v]:
            blocks[-1].append(v)
        else:
            blocks.append([v])

    best = None
    for arrangement in product(*(permutations(block) for block in blocks)):
        position = {}
        for v in (v for block in arrangement for v in block):
            position[v] = len(position)
        edges = sorted(
            (min(position[a], position[b]), max(position[a], position[b]), w) for a, b, w in dg.edges
        )
        if best is None or edges < best:
            best = edges

    vertices = ";".join(f"{g},{n}" for g, n in (dg.vertices[v] for v in order))
    edges = ";".join(f"{a}-{b}:{w}" for a, b, w in best or [])
    return TopType(f"V:{vertices}|E:{edges}")


def is_separating(mt: MarkedTiling, cs: CurveSystem) -> bool:
    if len(cs) != 1:
        raise CurveSystemError(f"Separation is defined for one curve, got {len(cs)}")
    return len(cut_along(mt, cs)) == 2


def classify_system(mt: MarkedTiling, cs: CurveSystem) -> TopType:
    return top_type(normalize(dual_graph(cut_along(mt, cs), cs)))


def classify(mt: MarkedTiling, direction: Direction | str) -> TopType:
    if isinstance(direction, str):
        direction = Direction.from_string(direction)
    return classify_system(mt, core_multicurve(mt, direction))


# --- simple closed curve families --------------------------------------------

class CurveKind(str, Enum):
    NONSEPARATING = "nonseparating"
    SEPARATING = "separating"

    @classmethod
    def from_string(cls, value: str) -> 'CurveKind':
        try:
            return cls(value.lower().replace("-", ""))
        except ValueError:
            raise ValueError(f"Invalid curve kind: '{value}'. Must be one of {[k.value for k in cls]}")


def simple_curve_type(
    g: int,
    n: int,
    kind: CurveKind | str,
    weight: int = 1,
    genus_split: int = 0,
    marked_split: int = 0,
) -> TopType:
    """Type key of a weighted simple closed curve on a genus-g surface with n marked points.

    A separating curve cuts off a side of genus ``genus_split`` carrying
    ``marked_split`` marked points.
    """
    if isinstance(kind, str):
        kind = CurveKind.from_string(kind)
    if 2 - 2 * g - n >= 0:
        raise DomainError(f"Surface class (g={g}, n={n}) is not hyperbolic", g=g, n=n)
    if kind == CurveKind.NONSEPARATING:
        if g < 1:
            raise DomainError("A genus-0 surface has no non-separating curves", g=g, n=n)
        dg = DualGraph(vertices=((g - 1, n),), edges=((0, 0, weight),))
    else:
        sides = ((genus_split, marked_split), (g - genus_split, n - marked_split))
        for side_g, side_n in sides:
            if side_g < 0 or side_n < 0 or 2 - 2 * side_g - side_n - 1 >= 0:
                raise DomainError(
                    f"Separating split ({genus_split}, {marked_split}) of (g={g}, n={n}) bounds a disk",
                    g=g, n=n,
                )
        dg = DualGraph(vertices=sides, edges=((0, 1, weight),))
    return top_type(dg)
