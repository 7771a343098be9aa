"""
Tests for barycenters, polytopes and the min-norm-point map

Core claims:
    - The Wolfe solver returns the exact nearest point with a nonnegative certificate
    - Hausdorff distances of polytopes match hand values
    - Barycenters of measure hulls are the hull of generator barycenters, and the map is short
    - The polytope Hausdorff distance satisfies the triangle inequality
    - The fixed thin-segment pair stretches distances by about 9.95
    - Probe runs are reproducible and independent of the worker count
"""

import numpy as np
import pytest
from pytest import approx

from utils.errors import ArgumentError, ValidationError
from utils.euclid_convex import (
    FIXED_PROBE_PAIR,
    EmbeddedMeasure,
    Polytope,
    ProbeFamily,
    barycenter,
    barycenter_image,
    hausdorff_polytopes,
    min_norm_certificate,
    min_norm_point,
    nearest_point,
    pi_lemma_probe,
    pi_ratio,
)
from utils.measure_hyperspace import ConvexMeasureSet, hausdorff_ccp
from utils.metric_core import FiniteMetricSpace, euclidean_space
from utils.oracles import segment_min_norm
from utils.sampling import random_generators, random_space


class TestPolytope:
    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            Polytope(3, [[0.0, 1.0]])

    def test_empty(self):
        with pytest.raises(ArgumentError):
            Polytope.of(np.zeros((0, 2)))

    def test_of_infers_dimension(self):
        assert Polytope.of([[1.0, 2.0, 3.0]]).dim == 3


class TestMinNormPoint:
    def test_segment(self):
        y = min_norm_point(Polytope.of([[-1.0, 0.0], [0.0, 1.0]]))
        assert y == approx([-0.5, 0.5])

    def test_tilted_segment(self):
        y = min_norm_point(Polytope.of(FIXED_PROBE_PAIR[1]))
        assert y == approx([0.0990099, 0.990099], abs=1e-6)

    def test_origin_inside(self):
        square = Polytope.of([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        assert min_norm_point(square) == approx([0.0, 0.0], abs=1e-9)

    def test_vertex_is_nearest(self):
        y = min_norm_point(Polytope.of([[2.0, 1.0], [3.0, 3.0], [4.0, 1.0]]))
        assert y == approx([2.0, 1.0])

    def test_query_point(self):
        y = nearest_point([[0.0, 0.0], [2.0, 0.0]], query=[1.0, 5.0])
        assert y == approx([1.0, 0.0])

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_certificate_is_nonnegative(self, dim, rng):
        for _ in range(10):
            vertices = rng.uniform(-1, 3, size=(rng.integers(2, 9), dim))
            y = min_norm_point(Polytope.of(vertices))
            assert min_norm_certificate(y, vertices) >= -1e-9

    def test_matches_segment_grid(self, rng):
        for _ in range(10):
            p, q = rng.uniform(-2, 2, size=(2, 3))
            y = min_norm_point(Polytope.of([p, q]))
            assert y == approx(segment_min_norm(p, q, step=1e-5), abs=1e-4)


class TestHausdorffPolytopes:
    def test_point_against_square(self):
        point = Polytope.of([[0.0, 0.0]])
        square = Polytope.of([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        assert hausdorff_polytopes(point, square) == approx(np.sqrt(2))

    def test_fixed_pair(self):
        A, B = (Polytope.of(v) for v in FIXED_PROBE_PAIR)
        assert hausdorff_polytopes(A, B) == approx(0.01, abs=1e-9)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    @pytest.mark.parametrize("seed", range(5))
    def test_triangle_inequality(self, dim, seed):
        rng = np.random.default_rng([dim, seed])
        # integer vertices give repeated and collinear points
        A, B, C = (Polytope(dim, rng.integers(-3, 4, size=(int(rng.integers(1, 6)), dim))) for _ in range(3))
        assert hausdorff_polytopes(A, C) <= hausdorff_polytopes(A, B) + hausdorff_polytopes(B, C) + 1e-7

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            hausdorff_polytopes(Polytope.of([[0.0]]), Polytope.of([[0.0, 0.0]]))


class TestBarycenter:
    def test_weighted_mean(self):
        mu = EmbeddedMeasure(points=[[0.0, 0.0], [4.0, 0.0]], weights=[0.75, 0.25])
        assert barycenter(mu) == approx([1.0, 0.0])

    def test_rejects_bad_weights(self):
        with pytest.raises(ValidationError):
            EmbeddedMeasure(points=[[0.0], [1.0]], weights=[0.5, 0.6])

    def test_barycenter_image(self):
        space = euclidean_space([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
        A = ConvexMeasureSet.from_weights(space, [[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
        image = barycenter_image(A)
        assert image.vertices == approx(np.array([[1.0, 0.0], [0.0, 2.0]]))

    @pytest.mark.parametrize("seed", range(6))
    def test_barycenter_image_is_short(self, seed):
        rng = np.random.default_rng(600 + seed)
        space = random_space(rng, int(rng.integers(3, 8)))
        A = ConvexMeasureSet(space, random_generators(rng, space, int(rng.integers(1, 4))))
        B = ConvexMeasureSet(space, random_generators(rng, space, int(rng.integers(1, 4))))
        images = hausdorff_polytopes(barycenter_image(A), barycenter_image(B))
        assert images <= hausdorff_ccp(A, B) + 1e-7

    def test_barycenter_image_needs_coordinates(self):
        bare = FiniteMetricSpace(labels=("a", "b"), dist=np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(ArgumentError):
            barycenter_image(ConvexMeasureSet.from_weights(bare, [[1.0, 0.0]]))


class TestProbe:
    def test_fixed_pair_ratio(self):
        A, B = (Polytope.of(v) for v in FIXED_PROBE_PAIR)
        assert pi_ratio(A, B) == approx(9.9504, abs=1e-3)

    def test_zero_distance_is_skipped(self):
        A = Polytope.of([[1.0, 1.0]])
        assert pi_ratio(A, A) is None

    def test_fixed_pair_violates_shortness(self):
        report = pi_lemma_probe(5, seed=1)
        assert report.fixed_ratio >= 5.0
        assert report.shortness_violated
        assert report.records[0]["trial"] == "fixed"

    def test_records_carry_both_polytopes(self):
        report = pi_lemma_probe(6, seed=2, family=ProbeFamily(kind="thin_segments"))
        fixed = report.records[0]
        assert fixed["A"]["vertices"] == FIXED_PROBE_PAIR[0].tolist()
        assert fixed["B"]["vertices"] == FIXED_PROBE_PAIR[1].tolist()
        for record in report.records[1:]:
            A, B = Polytope.of(record["A"]["vertices"]), Polytope.of(record["B"]["vertices"])
            assert record["ratio"] == approx(pi_ratio(A, B))
        assert "A" in report.to_dict()["records"][-1]

    def test_identical_family_skips_every_trial(self):
        report = pi_lemma_probe(8, seed=3, family=ProbeFamily(kind="identical"))
        assert report.skipped == 8
        assert report.family_max_ratio == 0.0

    def test_translated_singletons_are_isometric(self):
        report = pi_lemma_probe(20, seed=3, family=ProbeFamily(kind="translated_singletons", dim=3))
        assert report.family_max_ratio == approx(1.0)

    def test_workers_do_not_change_records(self):
        family = ProbeFamily(kind="random", dim=3)
        serial = pi_lemma_probe(30, seed=11, family=family)
        parallel = pi_lemma_probe(30, seed=11, family=family, workers=4)
        assert serial.records == parallel.records

    def test_unknown_family(self):
        with pytest.raises(ArgumentError):
            pi_lemma_probe(2, seed=0, family=ProbeFamily(kind="spheres"))

    def test_needs_trials(self):
        with pytest.raises(ArgumentError):
            pi_lemma_probe(0, seed=0)
