"""Tests for cutting, dual graphs, normalization and type keys"""

from random import Random

import pytest

from flatcensus.curve_type import (
    CurveKind,
    CutComponent,
    DualGraph,
    TopType,
    classify,
    cut_along,
    dual_graph,
    is_separating,
    normalize,
    simple_curve_type,
    top_type,
)
from flatcensus.exceptions import CurveSystemError, DanglingBoundaryError, DomainError, NormalizationError
from flatcensus.foliation import CoreCircle, CurveComponent, CurveSystem, Direction, core_multicurve

from samples import GENUS2, PILLOW, SEPARATED, STACKED, TORUS, markings, small_tables

TORUS_KEY = "V:0,1|E:0-0:1"
GENUS2_KEY = "V:1,0|E:0-0:1"
PILLOW_KEY = "V:0,2;0,2|E:0-1:1"
STACKED_KEY = "V:0,1|E:0-0:2"
SEPARATED_KEY = "V:1,0;1,0|E:0-1:1"


def horizontal(mt):
    return core_multicurve(mt, Direction.HORIZONTAL)


class TestCutAlong:
    """Test cutting the refined surface along core curves"""

    def test_torus_cuts_to_a_marked_annulus(self):
        assert cut_along(TORUS, horizontal(TORUS)) == [CutComponent(genus=0, n_marked=1, curves=(0, 0))]

    def test_genus_two_stays_connected(self):
        assert cut_along(GENUS2, horizontal(GENUS2)) == [CutComponent(genus=1, n_marked=0, curves=(0, 0))]

    def test_pillowcase_splits_the_poles(self):
        pieces = cut_along(PILLOW, horizontal(PILLOW))
        assert pieces == [CutComponent(genus=0, n_marked=2, curves=(0,))] * 2
        assert all(piece.n_boundary == 1 for piece in pieces)

    def test_separating_genus_two_core(self):
        pieces = cut_along(SEPARATED, horizontal(SEPARATED))
        assert sorted((p.genus, p.n_marked) for p in pieces) == [(1, 0), (1, 0)]

    def test_core_must_be_a_row(self):
        cs = CurveSystem(Direction.HORIZONTAL, (CurveComponent(CoreCircle((0, 1)), 1),))
        with pytest.raises(CurveSystemError, match="not a"):
            cut_along(GENUS2, cs)


class TestDualGraph:
    """Test dual graph construction and validation"""

    def test_genus_two_loop(self):
        cs = horizontal(GENUS2)
        dg = dual_graph(cut_along(GENUS2, cs), cs)
        assert dg == DualGraph(vertices=((1, 0),), edges=((0, 0, 1),))

    def test_pillowcase_edge(self):
        cs = horizontal(PILLOW)
        dg = dual_graph(cut_along(PILLOW, cs), cs)
        assert dg.vertices == ((0, 2), (0, 2))
        assert dg.edges == ((0, 1, 1),)
        assert dg.n_marked == 4

    def test_edge_weight_is_cylinder_height(self):
        cs = horizontal(STACKED)
        dg = dual_graph(cut_along(STACKED, cs), cs)
        assert dg.edges == ((0, 0, 2),)

    def test_dangling_boundary(self):
        cs = horizontal(GENUS2)
        with pytest.raises(DanglingBoundaryError, match="Curve 0 has 1 boundary circles") as excinfo:
            dual_graph([CutComponent(genus=1, n_marked=0, curves=(0,))], cs)
        assert excinfo.value.circles == 1

    def test_unused_curve_is_dangling(self):
        cs = CurveSystem(
            Direction.HORIZONTAL,
            (CurveComponent(CoreCircle((0,)), 1), CurveComponent(CoreCircle((1,)), 1)),
        )
        with pytest.raises(DanglingBoundaryError, match="Curve 1 has 0"):
            dual_graph([CutComponent(genus=0, n_marked=1, curves=(0, 0))], cs)

    def test_edge_to_missing_vertex(self):
        with pytest.raises(ValueError, match="missing vertex"):
            DualGraph(vertices=((1, 0),), edges=((0, 1, 1),))

    def test_zero_weight(self):
        with pytest.raises(ValueError, match="at least 1"):
            DualGraph(vertices=((1, 0),), edges=((0, 0, 0),))

    def test_edges_are_sorted_with_ordered_ends(self):
        dg = DualGraph(vertices=((0, 1), (1, 0)), edges=((1, 0, 2), (0, 0, 1)))
        assert dg.edges == ((0, 0, 1), (0, 1, 2))
        assert dg.degree(0) == 3
        assert dg.euler_characteristic() == (2 - 3) + (2 - 2 - 1)


class TestNormalize:
    """Test contraction of unmarked annuli"""

    def test_annulus_between_two_pieces(self):
        dg = DualGraph(vertices=((1, 0), (0, 0), (1, 0)), edges=((0, 1, 1), (1, 2, 2)))
        assert normalize(dg) == DualGraph(vertices=((1, 0), (1, 0)), edges=((0, 1, 3),))

    def test_chain_of_annuli(self):
        dg = DualGraph(
            vertices=((1, 0), (0, 0), (0, 0), (1, 0)),
            edges=((0, 1, 1), (1, 2, 1), (2, 3, 1)),
        )
        result = normalize(dg)
        assert result.edges == ((0, 1, 3),)
        assert len(result.vertices) == 2

    def test_idempotent(self):
        dg = DualGraph(vertices=((1, 0), (0, 0), (1, 0)), edges=((0, 1, 1), (1, 2, 2)))
        once = normalize(dg)
        assert normalize(once) == once

    def test_normal_graph_unchanged(self):
        dg = DualGraph(vertices=((0, 2), (0, 2)), edges=((0, 1, 1),))
        assert normalize(dg) is dg

    def test_loop_at_annulus(self):
        dg = DualGraph(vertices=((0, 0), (1, 1)), edges=((0, 0, 1),))
        with pytest.raises(NormalizationError, match="vertex 0"):
            normalize(dg)

    def test_confluent_under_random_orders(self):
        dg = DualGraph(
            vertices=((1, 0), (0, 0), (0, 0), (0, 3), (0, 0), (1, 1)),
            edges=((0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 3), (4, 5, 1), (0, 5, 4)),
        )
        keys = {top_type(normalize(dg, Random(seed))) for seed in range(20)}
        assert keys == {top_type(normalize(dg))}
        assert len(normalize(dg).vertices) == 3


class TestTopType:
    """Test canonical type keys"""

    def test_relabelled_graphs_share_a_key(self):
        first = DualGraph(vertices=((0, 1), (1, 0)), edges=((0, 1, 1), (1, 1, 2)))
        second = DualGraph(vertices=((1, 0), (0, 1)), edges=((0, 1, 1), (0, 0, 2)))
        assert top_type(first) == top_type(second)
        assert top_type(first).key == "V:0,1;1,0|E:0-1:1;1-1:2"

    def test_weights_are_part_of_the_key(self):
        light = DualGraph(vertices=((1, 0),), edges=((0, 0, 1),))
        heavy = DualGraph(vertices=((1, 0),), edges=((0, 0, 2),))
        assert top_type(light) != top_type(heavy)

    def test_from_string(self):
        assert TopType.from_string(GENUS2_KEY).encoded() == GENUS2_KEY.encode("ascii")
        assert str(TopType(PILLOW_KEY)) == PILLOW_KEY

    def test_from_string_invalid(self):
        with pytest.raises(ValueError, match="Not a type key"):
            TopType.from_string("genus two")


class TestClassify:
    """Test type keys of core multi-curves"""

    @pytest.mark.parametrize(
        "mt, key",
        [
            (TORUS, TORUS_KEY),
            (GENUS2, GENUS2_KEY),
            (PILLOW, PILLOW_KEY),
            (STACKED, STACKED_KEY),
            (SEPARATED, SEPARATED_KEY),
        ],
    )
    def test_horizontal_keys(self, mt, key):
        assert classify(mt, Direction.HORIZONTAL).key == key

    def test_direction_from_string(self):
        assert classify(PILLOW, "vertical").key == PILLOW_KEY

    def test_genus_two_and_pillowcase_differ(self):
        assert classify(GENUS2, Direction.HORIZONTAL) != classify(PILLOW, Direction.HORIZONTAL)

    def test_invariant_under_relabel_flip_and_rotation(self):
        for mt in (PILLOW, GENUS2, STACKED, SEPARATED):
            expected = classify(mt, Direction.HORIZONTAL)
            assert classify(mt.frame_flip(), Direction.HORIZONTAL) == expected
            assert classify(mt.relabel(list(reversed(range(mt.n_squares)))), Direction.HORIZONTAL) == expected
            assert classify(mt.rotate90(), Direction.VERTICAL) == classify(mt.frame_flip(), Direction.HORIZONTAL)

    def test_euler_and_marked_bookkeeping(self):
        for table in small_tables(3):
            for mt in markings(table):
                for direction in Direction:
                    cs = core_multicurve(mt, direction)
                    dg = dual_graph(cut_along(mt, cs), cs)
                    assert dg.euler_characteristic() == 2 - 2 * mt.genus
                    assert dg.n_marked == mt.n_marked
                    normal = normalize(dg)
                    assert normal.euler_characteristic() == 2 - 2 * mt.genus
                    assert normal.n_marked == mt.n_marked

    def test_cores_never_bound_disks(self):
        for table in small_tables(3):
            for mt in markings(table):
                for direction in Direction:
                    cs = core_multicurve(mt, direction)
                    dg = dual_graph(cut_along(mt, cs), cs)
                    for v, (g, n) in enumerate(dg.vertices):
                        assert (g, n, dg.degree(v)) not in {(0, 0, 1), (0, 1, 1)}


class TestIsSeparating:
    """Test separation of single core curves"""

    def test_non_separating(self):
        assert not is_separating(GENUS2, horizontal(GENUS2))
        assert not is_separating(TORUS, horizontal(TORUS))

    def test_separating(self):
        assert is_separating(PILLOW, horizontal(PILLOW))
        assert is_separating(SEPARATED, horizontal(SEPARATED))

    def test_multi_component_input(self):
        cs = CurveSystem(
            Direction.HORIZONTAL,
            (CurveComponent(CoreCircle((0,)), 1), CurveComponent(CoreCircle((1,)), 1)),
        )
        with pytest.raises(CurveSystemError, match="one curve, got 2"):
            is_separating(STACKED, cs)


class TestSimpleCurveType:
    """Test keys of simple closed curve families"""

    def test_matches_census_keys(self):
        assert simple_curve_type(1, 1, "nonseparating").key == TORUS_KEY
        assert simple_curve_type(2, 0, CurveKind.NONSEPARATING).key == GENUS2_KEY
        assert simple_curve_type(0, 4, "separating", marked_split=2).key == PILLOW_KEY
        assert simple_curve_type(2, 0, "separating", genus_split=1).key == SEPARATED_KEY

    def test_weight(self):
        assert simple_curve_type(1, 1, "non-separating", weight=2).key == STACKED_KEY

    def test_split_sides_are_unordered(self):
        assert simple_curve_type(0, 5, "separating", marked_split=2) == simple_curve_type(
            0, 5, "separating", marked_split=3
        )

    def test_genus_zero_has_no_non_separating_curve(self):
        with pytest.raises(DomainError, match="no non-separating"):
            simple_curve_type(0, 4, "nonseparating")

    def test_not_hyperbolic(self):
        with pytest.raises(DomainError, match="not hyperbolic"):
            simple_curve_type(1, 0, "nonseparating")

    def test_split_bounding_a_disk(self):
        with pytest.raises(DomainError, match="bounds a disk"):
            simple_curve_type(0, 4, "separating", marked_split=1)

    def test_invalid_kind(self):
        with pytest.raises(ValueError, match="Invalid curve kind"):
            simple_curve_type(2, 0, "diagonal")
