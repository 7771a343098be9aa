"""
Tests for convex sets of measures and their Hausdorff distance

Core claims:
    - Distance to a hull is realized by an explicit mixture
    - The Hausdorff distance is symmetric and vanishes on equal hulls
    - On two-point spaces it matches a dense mixture grid
    - Canonical generator lists drop duplicates and interior generators
    - The Hausdorff distance satisfies the triangle inequality
    - Mixtures of a hull are never farther from another hull than its worst generator
    - Singletons of Dirac measures embed the space isometrically
"""

import numpy as np
import pytest
from pytest import approx

from utils.errors import ArgumentError
from utils.measure_hyperspace import (
    ConvexMeasureSet,
    canonicalize,
    ccp_pushforward,
    directed_hausdorff,
    dirac_embedding,
    dirac_set,
    dist_point_to_hull,
    hausdorff_ccp,
)
from utils.oracles import two_point_hausdorff
from utils.metric_core import PointMap, euclidean_space
from utils.sampling import SHORT_MAP_KINDS, grid_space, random_generators, random_short_map, random_space
from utils.transport import DiscreteMeasure, dirac


def _hull(space, *rows):
    return ConvexMeasureSet.from_weights(space, rows)


class TestConvexMeasureSet:
    def test_needs_a_generator(self, two_point_space):
        with pytest.raises(ArgumentError):
            ConvexMeasureSet(two_point_space, ())

    def test_generators_share_a_space(self, two_point_space, line_space):
        with pytest.raises(ArgumentError):
            ConvexMeasureSet(two_point_space, (dirac(two_point_space, 0), dirac(line_space, 0)))

    def test_weight_matrix(self, two_point_space):
        A = _hull(two_point_space, [1.0, 0.0], [0.25, 0.75])
        assert len(A) == 2
        assert A.weight_matrix.tolist() == [[1.0, 0.0], [0.25, 0.75]]


class TestHullDistance:
    def test_point_to_hull(self, two_point_space):
        B = _hull(two_point_space, [1.0, 0.0], [0.25, 0.75])
        result = dist_point_to_hull(dirac(two_point_space, 1), B)
        assert result.value == approx(0.25)
        assert result.mixture == approx([0.0, 1.0], abs=1e-9)

    def test_member_of_hull(self, two_point_space):
        B = _hull(two_point_space, [1.0, 0.0], [0.0, 1.0])
        mu = DiscreteMeasure(two_point_space, [0.6, 0.4])
        assert dist_point_to_hull(mu, B).value == approx(0.0, abs=1e-9)

    def test_hausdorff_of_nested_hulls(self, two_point_space):
        A = dirac_set(two_point_space, 0)
        B = _hull(two_point_space, [1.0, 0.0], [0.0, 1.0])
        assert hausdorff_ccp(A, B) == approx(1.0)
        assert directed_hausdorff(A, B)[0] == approx(0.0, abs=1e-9)
        value, index = directed_hausdorff(B, A)
        assert value == approx(1.0)
        assert index == 1

    def test_concurrent_matches_sequential(self, rng):
        space = random_space(rng, 7)
        A = ConvexMeasureSet(space, random_generators(rng, space, 3, 4))
        B = ConvexMeasureSet(space, random_generators(rng, space, 2, 4))
        assert hausdorff_ccp(A, B, concurrent=True) == approx(hausdorff_ccp(A, B))

    def test_symmetric_and_zero_on_self(self, rng):
        space = random_space(rng, 6)
        A = ConvexMeasureSet(space, random_generators(rng, space, 3))
        B = ConvexMeasureSet(space, random_generators(rng, space, 3))
        assert hausdorff_ccp(A, A) == approx(0.0, abs=1e-9)
        assert hausdorff_ccp(A, B) == approx(hausdorff_ccp(B, A), abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_two_point_grid(self, seed, two_point_space):
        rng = np.random.default_rng(seed)
        a_rows = rng.dirichlet(np.ones(2), size=2)
        b_rows = rng.dirichlet(np.ones(2), size=3)
        A = ConvexMeasureSet.from_weights(two_point_space, a_rows)
        B = ConvexMeasureSet.from_weights(two_point_space, b_rows)
        expected = two_point_hausdorff(1.0, a_rows, b_rows)
        assert hausdorff_ccp(A, B) == approx(expected, abs=2e-3)

    @pytest.mark.parametrize("seed", range(6))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(400 + seed)
        space = random_space(rng, int(rng.integers(3, 8)))
        A, B, C = (ConvexMeasureSet(space, random_generators(rng, space, int(rng.integers(1, 4)))) for _ in range(3))
        assert hausdorff_ccp(A, C) <= hausdorff_ccp(A, B) + hausdorff_ccp(B, C) + 1e-7

    @pytest.mark.parametrize("seed", range(6))
    def test_mixtures_are_no_farther_than_generators(self, seed):
        rng = np.random.default_rng(500 + seed)
        space = random_space(rng, int(rng.integers(3, 8)))
        A = ConvexMeasureSet(space, random_generators(rng, space, 3))
        B = ConvexMeasureSet(space, random_generators(rng, space, 2))
        worst = max(dist_point_to_hull(g, B).value for g in A.generators)
        for _ in range(5):
            mixture = DiscreteMeasure(space, rng.dirichlet(np.ones(len(A))) @ A.weight_matrix)
            assert dist_point_to_hull(mixture, B).value <= worst + 1e-7
        assert directed_hausdorff(A, B)[0] == approx(worst, abs=1e-9)

class TestCanonicalize:
    def test_drops_duplicates_and_interior(self, two_point_space):
        A = _hull(two_point_space, [1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [1.0, 0.0])
        canon = canonicalize(A)
        assert len(canon) == 2
        assert hausdorff_ccp(A, canon) == approx(0.0, abs=1e-9)

    def test_singleton_survives(self, two_point_space):
        assert len(canonicalize(dirac_set(two_point_space, 1))) == 1


class TestDiracAndPushforward:
    def test_dirac_embedding_is_isometric(self, line_space):
        singletons = dirac_embedding(line_space)
        for i, j in [(0, 1), (0, 4), (2, 3)]:
            assert hausdorff_ccp(singletons[i], singletons[j]) == approx(line_space.dist[i, j])

    @pytest.mark.parametrize("kind", SHORT_MAP_KINDS)
    @pytest.mark.parametrize("seed", range(3))
    def test_pushforward_is_short(self, kind, seed):
        rng = np.random.default_rng(seed)
        space = grid_space(rng, 8)
        f = random_short_map(rng, space, kind)
        A = ConvexMeasureSet(space, random_generators(rng, space, 2, 3))
        B = ConvexMeasureSet(space, random_generators(rng, space, 3, 3))
        before = hausdorff_ccp(A, B)
        after = hausdorff_ccp(ccp_pushforward(f, A), ccp_pushforward(f, B))
        assert after <= before + 1e-7

    def test_pushforward_wrong_space(self, two_point_space, line_space):
        f = random_short_map(np.random.default_rng(0), line_space)
        with pytest.raises(ArgumentError):
            ccp_pushforward(f, dirac_set(two_point_space, 0))

    def test_constant_map_gives_a_single_dirac(self, rng, line_space):
        point = euclidean_space([[5.0]], labels=("y0",))
        f = PointMap(source=line_space, target=point, assignment=(0,) * line_space.size)
        image = ccp_pushforward(f, ConvexMeasureSet(line_space, random_generators(rng, line_space, 3)))
        assert len(image) == 1
        assert image.weight_matrix == approx(np.array([[1.0]]))

    def test_merged_points_collapse_their_hull(self, line_space):
        # a and b both go to c; everything else stays put
        f = PointMap(source=line_space, target=line_space, assignment=(2, 2, 2, 3, 4))
        image = ccp_pushforward(f, _hull(line_space, [1.0, 0, 0, 0, 0], [0, 1.0, 0, 0, 0]))
        assert len(image) == 1
        assert image.weight_matrix.tolist() == [[0.0, 0.0, 1.0, 0.0, 0.0]]
