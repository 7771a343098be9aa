"""
Tests for discrete measures and the Kantorovich metric

Core claims:
    - Measures reject wrong lengths, negative weights and mass far from 1
    - Primal and dual values agree, and both match basis enumeration on small supports
    - The coupling has the right marginals and the potential is short
    - The metric satisfies the triangle inequality on random triples
    - Dirac measures embed the space isometrically and pushforwards along short maps are short
"""

import numpy as np
import pytest
from pytest import approx

from utils.errors import ArgumentError, ValidationError
from utils.metric_core import PointMap, euclidean_space
from utils.oracles import transport_by_bases
from utils.sampling import SHORT_MAP_KINDS, grid_space, random_measure, random_short_map, random_space
from utils.transport import DUALITY_TOL, DiscreteMeasure, dirac, kantorovich, pushforward


@pytest.fixture
def ends():
    """Two points at distance 3"""
    return euclidean_space([[0.0], [3.0]], labels=("left", "right"))


class TestDiscreteMeasure:
    def test_wrong_length(self, ends):
        with pytest.raises(ValidationError):
            DiscreteMeasure(ends, [1.0])

    def test_negative_weight(self, ends):
        with pytest.raises(ValidationError):
            DiscreteMeasure(ends, [1.5, -0.5])

    def test_mass_must_be_one(self, ends):
        with pytest.raises(ValidationError):
            DiscreteMeasure(ends, [0.4, 0.5])

    def test_non_finite(self, ends):
        with pytest.raises(ValidationError):
            DiscreteMeasure(ends, [np.nan, 1.0])

    def test_support_and_dirac(self, ends):
        mu = dirac(ends, 1)
        assert mu.weights.tolist() == [0.0, 1.0]
        assert mu.support.tolist() == [1]


class TestKantorovich:
    def test_half_mass_moves(self, ends):
        result = kantorovich(dirac(ends, 0), DiscreteMeasure(ends, [0.5, 0.5]))
        assert result.value == approx(1.5)
        assert result.plan.coupling == approx(np.array([[0.5, 0.5], [0.0, 0.0]]))
        assert result.gap <= DUALITY_TOL

    def test_unpacks_as_triple(self, ends):
        value, plan, potential = kantorovich(dirac(ends, 0), dirac(ends, 1))
        assert value == approx(3.0)
        assert potential.value == approx(3.0)

    def test_identical_measures(self, ends):
        mu = DiscreteMeasure(ends, [0.3, 0.7])
        assert kantorovich(mu, mu).value == approx(0.0, abs=1e-9)

    def test_different_spaces(self, ends):
        other = euclidean_space([[0.0], [4.0]], labels=("left", "right"))
        with pytest.raises(ArgumentError):
            kantorovich(dirac(ends, 0), dirac(other, 0))

    @pytest.mark.parametrize("seed", range(6))
    def test_duality_and_marginals(self, seed):
        rng = np.random.default_rng(seed)
        space = random_space(rng, 12)
        mu, nu = random_measure(rng, space, 6), random_measure(rng, space, 5)
        result = kantorovich(mu, nu)
        assert result.gap <= DUALITY_TOL
        assert result.plan.coupling.sum(axis=1) == approx(mu.weights, abs=1e-7)
        assert result.plan.coupling.sum(axis=0) == approx(nu.weights, abs=1e-7)
        phi = result.potential.phi
        assert (np.abs(phi[:, None] - phi[None, :]) <= space.dist + 1e-6).all()

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_basis_enumeration(self, seed):
        rng = np.random.default_rng(100 + seed)
        space = random_space(rng, 8)
        mu, nu = random_measure(rng, space, 3), random_measure(rng, space, 4)
        expected = transport_by_bases(space.dist, mu.weights, nu.weights)
        assert kantorovich(mu, nu).value == approx(expected, abs=1e-8)

    @pytest.mark.parametrize("seed", range(8))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(300 + seed)
        space = random_space(rng, int(rng.integers(3, 8)))
        mu, nu, rho = (random_measure(rng, space) for _ in range(3))
        direct = kantorovich(mu, rho).value
        assert direct <= kantorovich(mu, nu).value + kantorovich(nu, rho).value + 1e-7

    def test_dirac_embedding_is_isometric(self, rng):
        space = random_space(rng, 10)
        for i in range(space.size):
            for j in range(i + 1, space.size):
                assert kantorovich(dirac(space, i), dirac(space, j)).value == approx(space.dist[i, j])


class TestPushforward:
    def test_collects_fiber_mass(self):
        source = euclidean_space([[0.0], [1.0], [5.0]])
        target = euclidean_space([[0.0], [5.0]])
        f = PointMap(source=source, target=target, assignment=(0, 0, 1))
        image = pushforward(f, DiscreteMeasure(source, [0.2, 0.3, 0.5]))
        assert image.weights == approx([0.5, 0.5])
        assert image.space is target

    def test_wrong_space(self, ends):
        f = PointMap(source=ends, target=ends, assignment=(0, 1))
        stray = euclidean_space([[0.0]])
        with pytest.raises(ArgumentError):
            pushforward(f, dirac(stray, 0))

    @pytest.mark.parametrize("kind", SHORT_MAP_KINDS)
    @pytest.mark.parametrize("seed", range(4))
    def test_short_maps_stay_short(self, kind, seed):
        rng = np.random.default_rng(seed)
        space = grid_space(rng, 9)
        f = random_short_map(rng, space, kind)
        mu, nu = random_measure(rng, space), random_measure(rng, space)
        before = kantorovich(mu, nu).value
        after = kantorovich(pushforward(f, mu), pushforward(f, nu)).value
        assert after <= before + 1e-7
