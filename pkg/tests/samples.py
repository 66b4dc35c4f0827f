"""Sample surfaces shared by the test modules"""

from pathlib import Path
from random import Random

from flatcensus.census.enumerate import all_involutions
from flatcensus.tiling import GluingTable, MarkedTiling, is_connected, mark_assignments

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# one-square torus
T1 = GluingTable.from_pairs(1, [[0, 1]], [[0, 1]])
# two-square pillowcase, four angle-pi corners
P2 = GluingTable.from_pairs(2, [[0, 3], [1, 2]], [[0, 2], [1, 3]])
# genus 2, one horizontal cylinder with a non-separating core
G4 = GluingTable.from_pairs(4, [[0, 3], [2, 5], [4, 7], [6, 1]], [[0, 3], [1, 2], [4, 7], [5, 6]])
# genus 2, one horizontal cylinder whose top and bottom close up by half-turns
S4 = GluingTable.from_pairs(4, [[0, 3], [2, 5], [4, 7], [6, 1]], [[0, 4], [2, 6], [1, 5], [3, 7]])
# two stacked squares forming a torus
V2 = GluingTable.from_pairs(2, [[0, 1], [2, 3]], [[0, 3], [1, 2]])
TWO_TORI = GluingTable.from_pairs(2, [[0, 1], [2, 3]], [[0, 1], [2, 3]])

TORUS = MarkedTiling(T1, frozenset({0}))
PILLOW = MarkedTiling(P2, frozenset({0, 1, 2, 3}))
GENUS2 = MarkedTiling(G4)
SEPARATED = MarkedTiling(S4)
STACKED = MarkedTiling(V2, frozenset({0}))


def small_tables(max_area: int):
    """Every connected table with at most ``max_area`` squares."""
    for area in range(1, max_area + 1):
        for h_pairs in all_involutions(2 * area):
            for v_pairs in all_involutions(2 * area):
                table = GluingTable(area, h_pairs, v_pairs)
                if is_connected(table):
                    yield table


def markings(table: GluingTable, max_points: int = 5):
    for n in range(max_points + 1):
        yield from mark_assignments(table, n)


def random_matching(rng: Random, size: int) -> tuple[int, ...]:
    slots = list(range(size))
    rng.shuffle(slots)
    partners = [0] * size
    for a, b in zip(slots[::2], slots[1::2]):
        partners[a], partners[b] = b, a
    return tuple(partners)


def sampled_tables(area: int, count: int, seed: int = 0):
    """``count`` connected tables of the given area drawn with a seeded generator."""
    rng = Random(seed)
    found = 0
    while found < count:
        table = GluingTable(area, random_matching(rng, 2 * area), random_matching(rng, 2 * area))
        if is_connected(table):
            found += 1
            yield table
