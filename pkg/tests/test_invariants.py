"""Invariants of tables, cylinders, curve types and automorphisms on sampled larger surfaces"""

from math import factorial
from random import Random

import pytest

from flatcensus.curve_type import classify, cut_along, dual_graph, normalize
from flatcensus.foliation import Direction, core_multicurve, cylinders
from flatcensus.tiling import automorphisms, canonical_form, genus, rotate90

from samples import markings, sampled_tables

AREAS = [4, 5, 6]


def marked_samples(area: int, count: int = 25):
    for table in sampled_tables(area, count, seed=area):
        yield from markings(table, max_points=4)


@pytest.mark.slow
@pytest.mark.parametrize("area", AREAS)
class TestSampledInvariants:
    """Checks that hold for every connected table, run on seeded samples"""

    def test_cone_angles_and_genus(self, area):
        for table in sampled_tables(area, 200, seed=area):
            cone = table.cone
            assert all(k % 2 == 0 for k in cone.angles)
            g = genus(table)
            assert cone.gauss_bonnet_sum() == 4 * g - 4
            assert genus(rotate90(table)) == g

    def test_cylinders_cover_the_area(self, area):
        for mt in marked_samples(area):
            for direction in Direction:
                cyls = cylinders(mt, direction)
                assert sum(c.circumference * c.height for c in cyls) == area

    def test_dual_graph_bookkeeping(self, area):
        for mt in marked_samples(area):
            for direction in Direction:
                cs = core_multicurve(mt, direction)
                normal = normalize(dual_graph(cut_along(mt, cs), cs))
                assert normal.euler_characteristic() == 2 - 2 * mt.genus
                assert normal.n_marked == mt.n_marked

    def test_automorphism_group(self, area):
        for mt in marked_samples(area, count=10):
            group = automorphisms(mt)
            assert group.is_closed()
            assert group.order <= 2 * area
            assert (2 ** area * factorial(area)) % group.order == 0

    def test_descriptions_of_one_surface_agree(self, area):
        rng = Random(area)
        for mt in marked_samples(area, count=10):
            perm = list(range(area))
            rng.shuffle(perm)
            flips = [rng.randrange(2) for _ in range(area)]
            moved = mt.flip_squares(flips).relabel(perm)
            assert canonical_form(moved) == canonical_form(mt)
            assert classify(moved, Direction.HORIZONTAL) == classify(mt, Direction.HORIZONTAL)
            assert classify(mt.rotate90(), Direction.VERTICAL) == classify(mt.frame_flip(), Direction.HORIZONTAL)
