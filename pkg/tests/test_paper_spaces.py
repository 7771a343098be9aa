"""
Tests for the graph families and assembled truncations

Core claims:
    - G_{n,k} has the literal edge set: n*2^(n-1) inner edges plus 2^n doubling edges
    - Inner edges flip one coordinate, spokes join x to 2x, and outer corners share no edge
    - The path metric matches hand-computed distances on G_{2,1}
    - X' distances, projections and the closed-form chain bound are exact
    - Assemblies are metric spaces carrying the right tags and glue disagreements
"""

import math

import numpy as np
import pytest
from pytest import approx

from utils.errors import ArgumentError, PreconditionError, ResourceError
from utils.metric_core import FiniteMetricSpace, euclidean_space, lipschitz_constant, verify_metric
from utils.paper_spaces import (
    AssemblyParams,
    build_assembly,
    build_gnk,
    chain_bound_closed_form,
    gnk_metric,
    point_label,
    projection_map,
    xprime_distance,
)


def _d(space, a, b):
    return space.dist[space.index_of(a), space.index_of(b)]


class TestBuildGnk:
    @pytest.mark.parametrize("n, expected", [(2, 8), (3, 20), (4, 48)])
    def test_edge_count(self, n, expected):
        g = build_gnk(n, 1)
        assert len(g.edges) == expected == n * 2 ** (n - 1) + 2 ** n

    def test_vertex_layout(self):
        g = build_gnk(3, 2)
        assert g.size == 16
        assert np.abs(g.inner).max() == 2
        assert np.abs(g.outer).min() == 4
        assert all(g.is_inner(i) for i in range(8))
        assert not g.is_inner(8)

    def test_edge_weights_are_max_norms(self):
        g = build_gnk(2, 3)
        for i, j, w in g.edges:
            assert w == approx(np.abs(g.vertices[i] - g.vertices[j]).max())

    @pytest.mark.parametrize("n", range(2, 11))
    @pytest.mark.parametrize("k", [1, 2, 3, 7, 10])
    def test_edge_characterization(self, n, k):
        g = build_gnk(n, k)
        half = len(g.inner)
        inner_edges = spokes = 0
        for i, j, w in g.edges:
            assert g.is_inner(i), "outer corners are never joined to each other"
            if g.is_inner(j):
                assert np.count_nonzero(g.inner[i] != g.inner[j]) == 1
                assert w == 2 * k
                inner_edges += 1
            else:
                assert (g.outer[j - half] == 2 * g.inner[i]).all()
                assert w == k
                spokes += 1
        assert inner_edges == n * 2 ** (n - 1)
        assert spokes == 2 ** n

    def test_labels(self):
        labels = build_gnk(2, 1).labels()
        assert labels[0] == "G2,1:I(-1,-1)"
        assert labels[-1] == "G2,1:T(2,2)"

    def test_invalid_parameters(self):
        with pytest.raises(ArgumentError):
            build_gnk(1, 1)
        with pytest.raises(ArgumentError):
            build_gnk(2, 0)

    def test_vertex_budget(self):
        with pytest.raises(ResourceError) as info:
            build_gnk(14, 1)
        assert info.value.limit == 2 ** 14


class TestGnkMetric:
    def test_ground_truth(self, g21):
        _, space = g21
        assert _d(space, "G2,1:I(1,1)", "G2,1:I(-1,-1)") == approx(4.0)
        assert _d(space, "G2,1:T(2,2)", "G2,1:T(2,-2)") == approx(4.0)
        assert _d(space, "G2,1:T(2,2)", "G2,1:T(-2,-2)") == approx(6.0)

    @pytest.mark.parametrize("n, k", [(2, 1), (2, 4), (3, 2), (4, 3), (5, 1)])
    def test_spokes_have_length_k(self, n, k):
        g = build_gnk(n, k)
        space = gnk_metric(g)
        half = len(g.inner)
        for i, x in enumerate(g.inner):
            j = half + int(np.flatnonzero((g.outer == 2 * x).all(axis=1))[0])
            assert space.dist[i, j] == k

    def test_is_a_metric(self, g21):
        _, space = g21
        assert verify_metric(space).passed

    def test_workers_do_not_change_rows(self):
        g = build_gnk(3, 2)
        assert np.array_equal(gnk_metric(g).dist, gnk_metric(g, workers=4).dist)

    def test_outer_corners_are_farther_than_euclidean(self, g21):
        _, space = g21
        outer = space.subspace(range(4, 8))
        euclid = euclidean_space(outer.coords)
        assert (outer.dist >= euclid.dist - 1e-9).all()


class TestClosedForms:
    def test_xprime_distance_pads_shorter_vector(self):
        assert xprime_distance((4, [1, 0]), (9, [0, 0, 1])) == approx(math.sqrt(27))

    def test_xprime_distance_same_level(self):
        assert xprime_distance((4, [0, 0]), (4, [3, 4])) == approx(5.0)

    @pytest.mark.parametrize("C, expected", [(1, math.sqrt(10)), (3, math.sqrt(10)), (4, math.sqrt(148))])
    def test_chain_bound(self, C, expected):
        assert chain_bound_closed_form(C) == approx(expected)

    def test_point_label_formats_integers(self):
        assert point_label("R2:", [2.0, -0.5]) == "R2:(2,-0.5)"


class TestProjection:
    def test_assignment_onto_distinct_images(self):
        space = euclidean_space([[1, 2, 3], [1, 2, 5], [0, 0, 0]])
        p = projection_map(space, 2)
        assert p.assignment == (1, 1, 0)
        assert p.target.size == 2

    def test_projection_is_short(self, rng):
        space = euclidean_space(rng.uniform(-3, 3, size=(15, 4)))
        assert lipschitz_constant(projection_map(space, 2)).lambda_star <= 1 + 1e-9

    def test_needs_coordinates(self, g21):
        _, space = g21
        bare = FiniteMetricSpace(labels=space.labels, dist=space.dist)
        with pytest.raises(ArgumentError):
            projection_map(bare, 2)


class TestAssemblyParams:
    def test_general_indices(self):
        params = AssemblyParams(n_values=(2, 3), k_values=(1,))
        assert params.graph_indices() == [(2, 1, 4), (3, 1, 9)]

    def test_squared_indices_skip_small_scales(self):
        params = AssemblyParams(n_values=(2,), k_values=(1, 2, 3), preset="squared")
        assert params.graph_indices() == [(4, 4, 4), (4, 9, 4)]

    def test_unknown_preset(self):
        with pytest.raises(ArgumentError):
            AssemblyParams(preset="other").graph_indices()


class TestBuildAssembly:
    def test_unknown_kind(self):
        with pytest.raises(ArgumentError):
            build_assembly("Z")

    def test_xprime_slice(self):
        assembly = build_assembly("Xprime_slice", AssemblyParams(xprime_levels=(1, 2)))
        assert assembly.space.size == 3 + 9
        assert set(assembly.levels) == {1, 4}
        assert verify_metric(assembly.space).passed

    def test_x_trunc_levels(self):
        assembly = build_assembly("X_trunc", AssemblyParams(n_values=(2, 3), k_values=(1,)))
        assert assembly.space.size == 4 + 8
        assert assembly.levels.count(9) == 8
        assert all(tag.endswith(":T") for tag in assembly.tags)

    def test_y_trunc_shares_corners(self):
        assembly = build_assembly("Y_trunc", AssemblyParams(n_values=(2,), k_values=(1,)))
        assert assembly.space.size == 8
        assert len(assembly.inner_indices()) == 4
        assert verify_metric(assembly.space).passed

    def test_x_n_layout(self, xn21):
        space = xn21.space
        assert space.size == 13
        assert len(xn21.euclidean_indices()) == 9
        assert len(xn21.inner_indices()) == 4
        assert verify_metric(space).passed

    def test_x_n_distances(self, xn21):
        space = xn21.space
        assert _d(space, "R2:(0,0)", "G2,1:I(1,1)") == approx(1 + 2 * math.sqrt(2))
        anchors = xn21.euclidean_indices()
        sub = space.subspace(anchors)
        assert np.allclose(sub.dist, euclidean_space(sub.coords).dist)

    def test_x_n_reports_shrunk_graph_distance(self, xn21):
        shrunk = {(a, b): (supplied, value) for a, b, supplied, value in xn21.disagreements}
        supplied, value = shrunk[("R2:(-2,-2)", "R2:(2,2)")]
        assert supplied == approx(6.0)
        assert value == approx(math.sqrt(32))

    def test_x_n_sample_must_contain_corners(self):
        with pytest.raises(PreconditionError) as info:
            build_assembly("X_N", AssemblyParams(sample=((0.0, 0.0),)))
        assert len(info.value.missing) == 4

    def test_x_n_needs_one_dimension(self):
        with pytest.raises(ArgumentError):
            build_assembly("X_N", AssemblyParams(n_values=(2, 3), k_values=(1,)))

    def test_x_n_lattice_sample(self):
        params = AssemblyParams(n_values=(2,), k_values=(1,), sample_spacing=1.0, include_midpoints=False)
        assembly = build_assembly("X_N", params)
        assert len(assembly.euclidean_indices()) == 25
