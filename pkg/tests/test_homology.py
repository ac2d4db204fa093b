"""Mod-2 homology, slice persistence, and bottleneck distance.

Betti fixtures are classical complexes with known mod-2 homology; random
complexes are cross-checked against the dense row-reduction oracle, and the
bottleneck search against exhaustive partial matchings.
"""

import math
import random
from itertools import combinations

import pytest

from dcech import (
    Barcode,
    DiscreteMeasure,
    FiniteMetricSpace,
    MonotonePath,
    NotAnInclusion,
    SimplicialComplex,
    UnsupportedDimension,
    betti,
    betti_table,
    bottleneck_distance,
    diagonal_barcode,
    inclusion_induces_iso,
    intrinsic_dc,
    slice_persistence,
)
from .oracles import bars_alive, betti_dense, bottleneck_brute

RT2 = math.sqrt(2.0)

# minimal 7-vertex torus triangulation: faces {i, i+1, i+3} and {i, i+2, i+3}
TORUS_FACES = [
    tuple(sorted(((i + a) % 7, (i + b) % 7, (i + c) % 7)))
    for i in range(7)
    for a, b, c in ((0, 1, 3), (0, 2, 3))
]

# minimal 6-vertex projective plane triangulation
RP2_FACES = [
    (0, 1, 3), (0, 1, 4), (0, 2, 3), (0, 2, 5), (0, 4, 5),
    (1, 2, 4), (1, 2, 5), (1, 3, 5), (2, 3, 4), (3, 4, 5),
]


def closure(faces):
    return SimplicialComplex.closure_of(faces)


class TestBetti:
    def test_circle(self):
        hollow = closure([(0, 1), (1, 2), (0, 2)])
        assert betti(hollow, 2) == (1, 1, 0)

    def test_sphere(self):
        boundary = closure(list(combinations(range(4), 3)))
        assert betti(boundary, 2) == (1, 0, 1)

    def test_torus(self):
        assert betti(closure(TORUS_FACES), 2) == (1, 2, 1)

    def test_projective_plane_mod2(self):
        assert betti(closure(RP2_FACES), 2) == (1, 1, 1)

    def test_two_components(self):
        assert betti(closure([(0, 1), (2, 3)]), 1) == (2, 0)

    def test_empty(self):
        assert betti(SimplicialComplex((0, 1), frozenset()), 1) == (0, 0)

    def test_solid_tetrahedron_truncated_degree(self):
        solid = closure([(0, 1, 2, 3)])
        assert betti(solid, 1) == (1, 0)
        assert betti(solid, 2) == (1, 0, 0)

    def test_rejects_negative_degree(self):
        with pytest.raises(UnsupportedDimension):
            betti(closure([(0,)]), -1)

    def test_matches_dense_oracle(self):
        rng = random.Random(5)
        for _ in range(40):
            n = rng.randint(3, 7)
            tops = [
                tuple(sorted(rng.sample(range(n), rng.randint(1, min(4, n)))))
                for _ in range(rng.randint(1, 6))
            ]
            K = closure(tops)
            assert betti(K, 2) == betti_dense(K.simplices, 2)


class TestBettiTable:
    @pytest.fixture
    def l3_intrinsic(self):
        space = FiniteMetricSpace.from_points([(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)])
        return intrinsic_dc(space, DiscreteMeasure.counting(3))

    def test_default_grids(self, l3_intrinsic):
        table = betti_table(l3_intrinsic)
        assert table.m_grid == (1.0, 1.5, 2.0, 2.5, 3.0)
        assert table.r_grid == (0.0, 0.5, 1.0, 1.5, 2.0)
        assert table.max_degree == 2
        assert [v[0] for v in table.values[0]] == [3, 3, 2, 2, 1]

    def test_explicit_grids(self, l3_intrinsic):
        table = betti_table(l3_intrinsic, m_grid=[1.0], r_grid=[0.0, 1.0, 2.0], max_degree=0)
        assert table.values == (((3,), (2,), (1,)),)
        assert table.at(0, 2) == (1,)


class TestSlicePersistence:
    def test_l3_constant_mass_slice(self):
        space = FiniteMetricSpace.from_points([(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)])
        K = intrinsic_dc(space, DiscreteMeasure.counting(3))
        path = MonotonePath.at_constant_m(1.0, [0.0, 1.0, 2.0])
        bars = slice_persistence(K, path)
        assert bars.degree(0) == ((0.0, 1.0), (0.0, 2.0), (0.0, math.inf))
        assert bars.degree(1) == ()

    def test_square_hollow_shell(self):
        space = FiniteMetricSpace.from_points(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )
        K = intrinsic_dc(space, DiscreteMeasure.counting(4))
        # at r=1 every pair and triple has a corner witness but the full
        # simplex does not: the slice passes through a hollow 3-simplex shell
        assert betti(K.complex_at(1.0, 1.0), 2) == (1, 0, 1)
        path = MonotonePath.at_constant_m(1.0, [0.0, 0.5, 1.0, RT2, 2.0])
        bars = slice_persistence(K, path)
        assert bars.degree(0) == (
            (0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, math.inf)
        )
        assert bars.degree(1) == ()
        assert bars.degree(2) == ((1.0, RT2),)

    def test_alive_counts_match_betti(self):
        space = FiniteMetricSpace.from_points(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )
        K = intrinsic_dc(space, DiscreteMeasure.counting(4))
        rs = [0.0, 0.5, 1.0, RT2, 2.0]
        bars = slice_persistence(K, MonotonePath.at_constant_m(1.0, rs))
        for r in rs:
            bv = betti(K.complex_at(1.0, r), 2)
            for k in range(3):
                assert bars_alive(bars.degree(k), r) == bv[k], (k, r)


class TestDiagonalBarcode:
    def test_matches_slice_on_shared_grid(self):
        space = FiniteMetricSpace.from_points(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )
        K = intrinsic_dc(space, DiscreteMeasure.counting(4))
        got = diagonal_barcode(K, 2.0, 0.0, 2)
        path = MonotonePath.diagonal(2.0, 0.0, [0.0, 1.0, RT2, 2.0])
        want = slice_persistence(K, path, 2)
        assert got.intervals == want.intervals
        assert got.degree(0) == ((1.0, math.inf),)
        assert got.degree(2) == ((1.0, RT2),)


class TestInclusionInducesIso:
    def test_identity_like(self):
        circle = closure([(0, 1), (1, 2), (0, 2)])
        pendant = closure([(0, 1), (1, 2), (0, 2), (0, 3)])
        assert inclusion_induces_iso(circle, pendant, 1) == (True, True)

    def test_merged_components(self):
        sub = closure([(0,), (1,)])
        full = closure([(0, 1)])
        assert inclusion_induces_iso(sub, full, 1) == (False, True)

    def test_filled_cycle(self):
        circle = closure([(0, 1), (1, 2), (0, 2)])
        disk = closure([(0, 1, 2)])
        assert inclusion_induces_iso(circle, disk, 1) == (True, False)

    def test_new_component_born(self):
        sub = closure([(0,)])
        full = closure([(0,), (1, 2)])
        assert inclusion_induces_iso(sub, full, 1) == (False, True)

    def test_rejects_non_inclusion(self):
        with pytest.raises(NotAnInclusion):
            inclusion_induces_iso(closure([(0, 1)]), closure([(0,), (1,)]), 1)


class TestBottleneck:
    def test_known_values(self):
        assert bottleneck_distance([(0.0, 2.0)], []) == 1.0
        assert bottleneck_distance([(0.0, 2.0)], [(0.5, 2.5)]) == 0.5
        assert bottleneck_distance([(0.0, math.inf)], [(1.0, math.inf)]) == 1.0
        assert bottleneck_distance([(0.0, math.inf)], []) == math.inf
        assert bottleneck_distance([(0.0, 4.0), (0.0, 1.0)], [(0.2, 3.8)]) == 0.5
        assert bottleneck_distance([(1.0, 1.0)], []) == 0.0
        assert bottleneck_distance([], []) == 0.0

    def test_matches_brute_force(self):
        rng = random.Random(19)
        for _ in range(60):
            def bars():
                out = []
                for _ in range(rng.randint(0, 4)):
                    b = round(rng.uniform(0, 2), 2)
                    if rng.random() < 0.15:
                        out.append((b, math.inf))
                    else:
                        out.append((b, b + round(rng.uniform(0.1, 2), 2)))
                return out

            b0, b1 = bars(), bars()
            assert bottleneck_distance(b0, b1) == pytest.approx(
                bottleneck_brute(b0, b1)
            ), (b0, b1)

    def test_metric_properties(self):
        rng = random.Random(31)
        for _ in range(20):
            def bars():
                out = []
                for _ in range(rng.randint(1, 3)):
                    b = round(rng.uniform(0, 2), 1)
                    out.append((b, b + round(rng.uniform(0.1, 1.5), 1)))
                return out

            x, y, z = bars(), bars(), bars()
            dxy = bottleneck_distance(x, y)
            assert dxy == bottleneck_distance(y, x)
            assert bottleneck_distance(x, x) == 0.0
            assert dxy <= bottleneck_distance(x, z) + bottleneck_distance(z, y) + 1e-12


class TestBarcode:
    def test_normalization(self):
        bc = Barcode({1: [(2.0, 3.0), (0.0, 1.0)]})
        assert bc.degree(1) == ((0.0, 1.0), (2.0, 3.0))
        assert bc.degree(0) == ()
        assert bc.degrees() == (1,)
