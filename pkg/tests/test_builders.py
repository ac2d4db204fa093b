"""Bifiltration builders on small hand-checked instances.

The workhorse is L3: three collinear points at x = 0, 1, 3 with the counting
measure. All expected masses, staircases, and Betti numbers below were
computed by hand from the distance matrix [[0,1,3],[1,0,2],[3,2,0]].
"""

import math

import numpy as np
import pytest

from dcech import (
    BifilteredComplex,
    DegreeBifiltration,
    DimensionMismatch,
    DiscreteMeasure,
    DistanceToMeasureBifiltration,
    DowkerBifiltrationPair,
    DowkerConditionViolation,
    DowkerDissimilarity,
    FiniteMetricSpace,
    IndexOutOfRange,
    MonotonicityError,
    NonPositiveP,
    SimplicialComplex,
    Staircase,
    TableBifiltration,
    ambient_dc_finite,
    betti,
    cover_nerve,
    degree_bifiltration,
    dowker_dual,
    dtm_bifiltration,
    intrinsic_dc,
    measure_bifiltration_points,
    measure_dowker_reindex,
    nerve_bifiltration,
    rectangle_complex,
    restrict_to_support,
)


@pytest.fixture
def l3():
    return FiniteMetricSpace.from_points([(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)])


@pytest.fixture
def l3_counting(l3):
    dowker = DowkerDissimilarity.from_metric(l3)
    return dowker, DegreeBifiltration(dowker, DiscreteMeasure.counting(3))


class TestDowkerDissimilarity:
    def test_shape_and_levels(self):
        d = DowkerDissimilarity(np.array([[0.0, 1.0], [2.0, math.inf]]))
        assert (d.nx, d.ny) == (2, 2)
        assert d.r_values() == (0.0, 1.0, 2.0)

    def test_ball_masks(self):
        d = DowkerDissimilarity(np.array([[0.0, 1.0], [2.0, math.inf]]))
        assert d.ball_mask(0, 0.5) == 0b01
        assert d.ball_mask(0, 1.0) == 0b11
        assert d.ball_mask(1, 1.999) == 0b00
        assert d.ball_mask(1, 2.0) == 0b01
        # only r = inf reaches entries at inf; huge finite radii do not
        assert d.ball_mask(1, 1e300) == 0b01
        assert d.ball_mask(1, math.inf) == 0b11

    def test_common_ball_mask(self):
        d = DowkerDissimilarity(np.array([[0.0, 1.0], [2.0, math.inf]]))
        assert d.common_ball_mask([0, 1], 2.0) == 0b01
        assert d.common_ball_mask([0, 1], 1.0) == 0b00
        assert d.common_ball_mask([0], 1.0) == 0b11
        assert d.common_ball_mask([0, 1], math.inf) == 0b11

    def test_index_errors(self):
        d = DowkerDissimilarity(np.array([[0.0, 1.0]]))
        with pytest.raises(IndexOutOfRange):
            d.ball_mask(1, 0.0)
        with pytest.raises(IndexOutOfRange):
            d.common_ball_mask([0, 1], 0.0)

    def test_rejects_bad_matrices(self):
        with pytest.raises(DimensionMismatch):
            DowkerDissimilarity(np.array([0.0, 1.0]))
        with pytest.raises(DimensionMismatch):
            DowkerDissimilarity(np.array([[0.0, -1.0]]))
        with pytest.raises(DimensionMismatch):
            DowkerDissimilarity(np.array([[0.0, math.nan]]))

    def test_matrix_is_read_only(self):
        d = DowkerDissimilarity(np.array([[0.0, 1.0]]))
        with pytest.raises(ValueError):
            d.matrix[0, 0] = 5.0

    def test_from_metric_submatrix(self, l3):
        d = DowkerDissimilarity.from_metric(l3, rows=[0, 2], cols=[1])
        assert d.matrix.tolist() == [[1.0], [2.0]]
        with pytest.raises(IndexOutOfRange):
            DowkerDissimilarity.from_metric(l3, rows=[3])


class TestDegreeBifiltration:
    def test_masses_on_l3(self, l3_counting):
        _, f = l3_counting
        assert f.value((0, 2), 2.0) == 1.0  # only the middle point reaches both
        assert f.value((0, 2), 1.999) == 0.0
        assert f.value((1,), 2.0) == 3.0
        assert f.value((0,), 0.0) == 1.0
        assert f.value((0,), 1.0) == 2.0
        assert f.value((0,), 3.0) == 3.0
        assert f.value((0, 1, 2), 2.0) == 1.0

    def test_weighted(self, l3):
        dowker = DowkerDissimilarity.from_metric(l3)
        f = degree_bifiltration(dowker, DiscreteMeasure((0.5, 2.0, 0.25)))
        assert f.value((0, 2), 2.0) == 2.0
        assert f.value((0,), 1.0) == 2.5

    def test_antitone_in_sigma(self, l3_counting):
        _, f = l3_counting
        for r in (0.0, 1.0, 2.0, 3.0):
            assert f.value((0, 1), r) <= min(f.value((0,), r), f.value((1,), r))

    def test_breakpoints(self, l3_counting):
        _, f = l3_counting
        assert f.r_breakpoints() == (0.0, 1.0, 2.0, 3.0)

    def test_weight_count_must_match(self, l3):
        dowker = DowkerDissimilarity.from_metric(l3)
        with pytest.raises(DimensionMismatch):
            DegreeBifiltration(dowker, DiscreteMeasure((1.0, 1.0)))


class TestDistanceToMeasure:
    def test_p1_values_on_l3(self, l3):
        dowker = DowkerDissimilarity.from_metric(l3)
        f = dtm_bifiltration(dowker, DiscreteMeasure.counting(3), 1.0)
        # ball of point 0 at r=1 is {0, 1}; distances 0 and 1 contribute 1
        assert f.value((0,), 1.0) == 1.0
        # ball of point 1 at r=3 is everything; distances 1 + 0 + 2
        assert f.value((1,), 3.0) == 3.0
        assert f.value((0,), 0.0) == 0.0

    def test_p2(self, l3):
        dowker = DowkerDissimilarity.from_metric(l3)
        f = DistanceToMeasureBifiltration(dowker, DiscreteMeasure.counting(3), 2.0)
        assert f.value((1,), 3.0) == pytest.approx(math.sqrt(5.0))

    def test_rejects_nonpositive_p(self, l3):
        dowker = DowkerDissimilarity.from_metric(l3)
        for p in (0.0, -1.0):
            with pytest.raises(NonPositiveP):
                dtm_bifiltration(dowker, DiscreteMeasure.counting(3), p)

    def test_inf_entries(self):
        dowker = DowkerDissimilarity(np.array([[0.0, math.inf]]))
        f = dtm_bifiltration(dowker, DiscreteMeasure((1.0, 1.0)), 1.0)
        assert f.value((0,), 5.0) == 0.0
        assert f.value((0,), math.inf) == math.inf
        # a zero-weight point never contributes, even at distance inf
        g = dtm_bifiltration(dowker, DiscreteMeasure((1.0, 0.0)), 1.0)
        assert g.value((0,), math.inf) == 0.0


class TestTableBifiltration:
    def test_lookup(self):
        f = TableBifiltration(
            2,
            (0.0, 1.0),
            {(0,): (1.0, 2.0), (1,): (0.0, 1.0), (0, 1): (0.0, 1.0)},
        )
        assert f.value((0,), 0.5) == 1.0
        assert f.value((0,), 1.0) == 2.0
        assert f.value((0,), math.inf) == 2.0
        assert f.value((1,), -0.5) == 0.0
        assert f.r_breakpoints() == (0.0, 1.0)

    def test_missing_simplex_is_zero(self):
        f = TableBifiltration(3, (0.0,), {(0,): (1.0,)})
        assert f.value((2,), 0.0) == 0.0

    def test_grid_validation(self):
        with pytest.raises(MonotonicityError):
            TableBifiltration(1, (1.0, 2.0), {})
        with pytest.raises(MonotonicityError):
            TableBifiltration(1, (0.0, 2.0, 1.0), {})
        with pytest.raises(MonotonicityError):
            TableBifiltration(1, (0.0, 0.0), {})

    def test_value_validation(self):
        with pytest.raises(DimensionMismatch):
            TableBifiltration(1, (0.0, 1.0), {(0,): (1.0,)})
        with pytest.raises(MonotonicityError):
            TableBifiltration(1, (0.0, 1.0), {(0,): (-1.0, 0.0)})
        with pytest.raises(MonotonicityError):
            TableBifiltration(1, (0.0, 1.0), {(0,): (2.0, 1.0)})

    def test_face_domination(self):
        with pytest.raises(MonotonicityError):
            TableBifiltration(2, (0.0,), {(0, 1): (1.0,)})
        with pytest.raises(MonotonicityError):
            TableBifiltration(
                2,
                (0.0, 1.0),
                {(0,): (2.0, 2.0), (1,): (2.0, 2.0), (0, 1): (1.0, 3.0)},
            )

    def test_universe_bound(self):
        with pytest.raises(IndexOutOfRange):
            TableBifiltration(1, (0.0,), {(1,): (1.0,)})


class TestDowkerBifiltrationPair:
    def test_accepts_degree(self, l3_counting):
        dowker, f = l3_counting
        DowkerBifiltrationPair(dowker, f)

    def test_rejects_value_on_empty_ball(self):
        dowker = DowkerDissimilarity(np.array([[1.0]]))
        f = TableBifiltration(1, (0.0, 1.0), {(0,): (1.0, 1.0)})
        with pytest.raises(DowkerConditionViolation):
            DowkerBifiltrationPair(dowker, f)

    def test_rejects_universe_mismatch(self, l3_counting):
        dowker, f = l3_counting
        other = DowkerDissimilarity(np.array([[0.0, 1.0]]))
        with pytest.raises(DimensionMismatch):
            DowkerBifiltrationPair(other, f)


class TestNerveBifiltration:
    def test_exact_staircases_on_l3(self, l3_counting):
        _, f = l3_counting
        nerve = nerve_bifiltration(f)
        expected = {
            (0,): ((0.0, 1.0), (1.0, 2.0), (3.0, 3.0)),
            (1,): ((0.0, 1.0), (1.0, 2.0), (2.0, 3.0)),
            (2,): ((0.0, 1.0), (2.0, 2.0), (3.0, 3.0)),
            (0, 1): ((0.0, 0.0), (1.0, 2.0), (3.0, 3.0)),
            (0, 2): ((0.0, 0.0), (2.0, 1.0), (3.0, 3.0)),
            (1, 2): ((0.0, 0.0), (2.0, 2.0), (3.0, 3.0)),
            (0, 1, 2): ((0.0, 0.0), (2.0, 1.0), (3.0, 3.0)),
        }
        assert {s: st.steps for s, st in nerve.entries.items()} == expected

    def test_slice_and_full_skeleton(self, l3_counting):
        _, f = l3_counting
        nerve = nerve_bifiltration(f)
        at = nerve.complex_at(1.0, 1.0)
        assert at.simplices == frozenset({(0,), (1,), (2,), (0, 1)})
        assert betti(at, 1) == (2, 0)
        # any m <= 0 turns the nerve into the full skeleton
        assert len(nerve.complex_at(0.0, 0.0).simplices) == 7
        assert len(nerve.complex_at(-1.0, 0.0).simplices) == 7

    def test_universe_relabel(self, l3_counting):
        _, f = l3_counting
        nerve = nerve_bifiltration(f, universe=(10, 11, 12))
        assert nerve.universe == (10, 11, 12)
        assert (10, 12) in nerve.entries
        with pytest.raises(DimensionMismatch):
            nerve_bifiltration(f, universe=(10, 11))

    def test_large_universe_warns(self):
        dowker = DowkerDissimilarity(np.zeros((21, 1)))
        f = DegreeBifiltration(dowker, DiscreteMeasure.counting(1))
        with pytest.warns(UserWarning):
            nerve_bifiltration(f, dim_cap=0)


class TestDowkerDual:
    def test_exact_staircases_on_l3(self, l3_counting):
        dowker, f = l3_counting
        dual = dowker_dual(dowker, f)
        expected = {
            (0,): ((0.0, 1.0), (1.0, 2.0), (2.0, 3.0)),
            (1,): ((0.0, 1.0), (1.0, 2.0), (2.0, 3.0)),
            (2,): ((0.0, 1.0), (2.0, 3.0)),
            (0, 1): ((1.0, 2.0), (2.0, 3.0)),
            (0, 2): ((2.0, 3.0),),
            (1, 2): ((2.0, 3.0),),
            (0, 1, 2): ((2.0, 3.0),),
        }
        assert {s: st.steps for s, st in dual.entries.items()} == expected

    def test_never_witnessed_simplex_is_absent(self):
        dowker = DowkerDissimilarity(np.array([[0.0, math.inf], [math.inf, 0.0]]))
        f = DegreeBifiltration(dowker, DiscreteMeasure.counting(2))
        dual = dowker_dual(dowker, f)
        assert set(dual.entries) == {(0,), (1,)}

    def test_y_ids(self, l3_counting):
        dowker, f = l3_counting
        dual = dowker_dual(dowker, f, y_ids=(5, 6, 7))
        assert dual.universe == (5, 6, 7)
        assert (5, 7) in dual.entries
        with pytest.raises(DimensionMismatch):
            dowker_dual(dowker, f, y_ids=(5,))

    def test_universe_mismatch(self, l3_counting):
        dowker, _ = l3_counting
        other = DegreeBifiltration(
            DowkerDissimilarity(np.array([[0.0]])), DiscreteMeasure.counting(1)
        )
        with pytest.raises(DimensionMismatch):
            dowker_dual(dowker, other)


class TestIntrinsicAndAmbient:
    def test_intrinsic_l3_counting(self, l3):
        K = intrinsic_dc(l3, DiscreteMeasure.counting(3))
        K.validate()
        assert K.universe == (0, 1, 2)
        assert len(K.entries) == 7
        assert K.staircase((0, 1, 2)).steps == ((2.0, 3.0),)
        assert K.staircase((0,)).steps == ((0.0, 1.0), (1.0, 2.0), (2.0, 3.0))

    def test_full_support_ambient_equals_intrinsic(self, l3):
        mu = DiscreteMeasure((0.5, 1.5, 1.0))
        K = intrinsic_dc(l3, mu)
        A = ambient_dc_finite(l3, mu)
        assert K.universe == A.universe
        assert {s: st.steps for s, st in K.entries.items()} == {
            s: st.steps for s, st in A.entries.items()
        }

    def test_zero_weight_witness_separates_them(self, l3):
        # the middle point carries no mass but still witnesses the pair {0, 2}
        mu = DiscreteMeasure((1.0, 0.0, 1.0))
        A = ambient_dc_finite(l3, mu)
        K = intrinsic_dc(l3, mu)
        assert A.universe == (0, 2) and K.universe == (0, 2)
        assert A.staircase((0, 2)).steps == ((2.0, 2.0),)
        assert K.staircase((0, 2)).steps == ((3.0, 2.0),)
        # sandwich: ambient presence implies intrinsic presence at 2r
        assert K.present((0, 2), 2.0, 4.0)

    def test_measure_alignment(self, l3):
        with pytest.raises(DimensionMismatch):
            intrinsic_dc(l3, DiscreteMeasure((1.0, 1.0)))
        with pytest.raises(DimensionMismatch):
            ambient_dc_finite(l3, DiscreteMeasure((1.0, 1.0)))


class TestRectangleComplex:
    def test_dense_corner_is_a_cone(self, l3_counting):
        dowker, f = l3_counting
        R = rectangle_complex(dowker, f, 3.0, 2.0)
        # only the middle witness reaches mass 3; its row spans a full simplex
        assert R.simplices == SimplicialComplex.closure_of([(3, 4, 5)]).simplices
        assert betti(R, 2) == (1, 0, 0)

    def test_diagonal_at_r0(self, l3_counting):
        dowker, f = l3_counting
        R = rectangle_complex(dowker, f, 1.0, 0.0)
        assert R.simplices == frozenset({(0,), (4,), (8,)})
        assert betti(R, 1) == (3, 0)


class TestMeasurePointsAndCoverNerve:
    def test_measure_bifiltration_points(self, l3):
        mu = DiscreteMeasure.counting(3)
        assert measure_bifiltration_points(l3, mu, 2.0, 1.0) == frozenset({0, 1})
        assert measure_bifiltration_points(l3, mu, 3.0, 2.0) == frozenset({1})
        assert measure_bifiltration_points(l3, mu, 1.0, 0.0) == frozenset({0, 1, 2})
        with pytest.raises(DimensionMismatch):
            measure_bifiltration_points(l3, DiscreteMeasure((1.0,)), 1.0, 0.0)

    def test_cover_nerve_matches_ambient_slices(self, l3):
        mu = DiscreteMeasure.counting(3)
        A = ambient_dc_finite(l3, mu)
        for m, r in [(1.0, 0.0), (1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (3.0, 2.0), (3.0, 3.0)]:
            nerve = cover_nerve(l3, mu, m, r)
            assert nerve.simplices == A.complex_at(m, r).simplices, (m, r)


class TestRestrictAndReindex:
    def test_restrict_keeps_entry_staircases(self, l3):
        K = intrinsic_dc(l3, DiscreteMeasure.counting(3))
        R = restrict_to_support(K, [0, 1])
        assert R.universe == (0, 1)
        assert set(R.entries) == {(0,), (1,), (0, 1)}
        # downward closure makes the envelope collapse to the original entry
        for sigma in R.entries:
            assert R.entries[sigma].steps == K.entries[sigma].steps
        R.validate()

    def test_restrict_general_envelope(self):
        K = BifilteredComplex(
            (0, 1),
            {
                (0,): Staircase(((0.0, 1.0),)),
                (1,): Staircase(((0.0, 2.0),)),
                (0, 1): Staircase(((1.0, 1.0),)),
            },
        )
        R = restrict_to_support(K, [0])
        # (0,) inherits the max of its own entry and the edge's
        assert R.entries[(0,)].steps == ((0.0, 1.0),)
        R2 = restrict_to_support(
            BifilteredComplex(
                (0, 1),
                {
                    (0,): Staircase(((0.0, 1.0),)),
                    (1,): Staircase(((0.0, 1.0),)),
                    (0, 1): Staircase(((1.0, 1.0),)),
                },
            ),
            [1],
        )
        assert R2.entries[(1,)].steps == ((0.0, 1.0),)

    def test_reindex_halves_radii(self, l3):
        K = intrinsic_dc(l3, DiscreteMeasure.counting(3))
        H = measure_dowker_reindex(K)
        assert H.staircase((0, 1, 2)).steps == ((1.0, 3.0),)
        for sigma, st in K.entries.items():
            for r in (0.0, 0.5, 1.0, 1.5, 2.0):
                assert H.value(sigma, r) == K.value(sigma, 2.0 * r)
