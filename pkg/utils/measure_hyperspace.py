"""
Convex hyperspace ccP(X) at finite scale
Elements are convex hulls of finitely many discrete measures; distances are
Hausdorff distances under the Kantorovich ground metric
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from utils.errors import ArgumentError
from utils.metric_core import TOL
from utils.transport import DiscreteMeasure, solve_lp, dirac, pushforward

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConvexMeasureSet:
    """Convex hull of a nonempty list of measures on one space"""
    space: object
    generators: tuple

    def __post_init__(self):
        generators = tuple(self.generators)
        if not generators:
            raise ArgumentError("a convex measure set needs at least one generator")
        for g in generators:
            if not g.space.same_as(self.space):
                raise ArgumentError("generators live on different spaces")
        object.__setattr__(self, "generators", generators)

    @classmethod
    def from_weights(cls, space, rows):
        return cls(space, tuple(DiscreteMeasure(space, r) for r in rows))

    @property
    def weight_matrix(self):
        return np.vstack([g.weights for g in self.generators])

    def __len__(self):
        return len(self.generators)

    def to_dict(self):
        return {"space": self.space.name, "generators": self.weight_matrix.tolist()}


@dataclass(frozen=True)
class HullDistance:
    value: float
    mixture: np.ndarray


def _check_space(a, b):
    if not a.space.same_as(b.space):
        raise ArgumentError("objects live on different spaces")


def dist_point_to_hull(mu, B):
    """
    Kantorovich distance from a measure to the hull of B's generators

    One joint linear program over mixture coefficients and the coupling:
    rows of the coupling carry mu, its columns carry sum_j lam_j nu_j.

    Returns:
        HullDistance with the optimal value and mixture coefficients
    """
    _check_space(mu, B)
    dist = mu.space.dist
    weights = B.weight_matrix
    m = len(B)
    rows = mu.support
    cols = np.flatnonzero(weights.sum(axis=0) > 0)
    s, t = len(rows), len(cols)

    cost = np.concatenate([np.zeros(m), dist[np.ix_(rows, cols)].ravel()])
    zeros_s = sparse.csr_matrix((s, m))
    row_block = sparse.hstack([zeros_s, sparse.kron(sparse.identity(s), np.ones((1, t)))])
    col_block = sparse.hstack(
        [sparse.csr_matrix(-weights[:, cols].T), sparse.kron(np.ones((1, s)), sparse.identity(t))]
    )
    simplex = sparse.hstack([sparse.csr_matrix(np.ones((1, m))), sparse.csr_matrix((1, s * t))])
    a_eq = sparse.vstack([row_block, col_block, simplex]).tocsr()
    b_eq = np.concatenate([mu.weights[rows], np.zeros(t), [1.0]])

    res = solve_lp(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None))
    mixture = np.clip(res.x[:m], 0.0, None)
    mixture = mixture / mixture.sum()
    return HullDistance(value=max(0.0, float(res.fun)), mixture=mixture)


def directed_hausdorff(A, B):
    """
    sup over hull(A) of the distance to hull(B)

    The distance to a hull is convex along mixtures, so the sup is attained
    at a generator of A. Returns (value, generator index).
    """
    _check_space(A, B)
    values = [dist_point_to_hull(g, B).value for g in A.generators]
    best = int(np.argmax(values))
    return values[best], best


def hausdorff_ccp(A, B, concurrent=False):
    """Hausdorff distance between two convex measure sets"""
    _check_space(A, B)
    if concurrent:
        with ThreadPoolExecutor(max_workers=2) as executor:
            forward = executor.submit(directed_hausdorff, A, B)
            backward = executor.submit(directed_hausdorff, B, A)
            return max(forward.result()[0], backward.result()[0])
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


def canonicalize(A, tol=TOL):
    """
    Minimal generator list for the same hull

    Exact duplicates go first, then every generator lying in the hull of the
    others (distance zero to it) is pruned, scanning from the last.
    """
    kept = []
    for g in A.generators:
        if not any(np.allclose(g.weights, h.weights, rtol=0.0, atol=1e-12) for h in kept):
            kept.append(g)

    j = len(kept) - 1
    while j >= 0 and len(kept) > 1:
        others = ConvexMeasureSet(A.space, tuple(kept[:j] + kept[j + 1:]))
        if dist_point_to_hull(kept[j], others).value <= tol:
            logger.debug("pruned interior generator %d", j)
            del kept[j]
        j -= 1
    return ConvexMeasureSet(A.space, tuple(kept))


def ccp_pushforward(f, A):
    """Image of a hull under P(f): the hull of the generator images"""
    if not A.space.same_as(f.source):
        raise ArgumentError("set does not live on the source of the map")
    images = tuple(pushforward(f, g) for g in A.generators)
    return canonicalize(ConvexMeasureSet(f.target, images))


def dirac_set(space, index):
    """The singleton {delta_x}"""
    return ConvexMeasureSet(space, (dirac(space, index),))


def dirac_embedding(space):
    """x -> {delta_x} for every point of the space"""
    return {i: dirac_set(space, i) for i in range(space.size)}
