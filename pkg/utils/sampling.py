"""
Seeded random instances for the verification suites
Every generator takes a numpy Generator so callers own the seeding
"""

import numpy as np

from utils.errors import ArgumentError
from utils.metric_core import TOL, PointMap, euclidean_space, lipschitz_constant
from utils.transport import DiscreteMeasure

SHORT_MAP_KINDS = ("projection", "truncated_distance", "box_clamp", "retraction")

# random subsets tried per size before a nearest-point retraction grows its subset
RETRACTION_ATTEMPTS = 3


def random_space(rng, size, dim=2, scale=10.0, name=""):
    """size points drawn uniformly from [0, scale]^dim with the Euclidean metric"""
    return euclidean_space(rng.uniform(0.0, scale, size=(size, dim)), name=name or f"random{size}")


def grid_space(rng, size, dim=2, extent=6, name=""):
    """Distinct integer lattice points in [0, extent]^dim"""
    cells = (extent + 1) ** dim
    size = min(size, cells)
    picks = rng.choice(cells, size=size, replace=False)
    points = np.array(np.unravel_index(np.sort(picks), (extent + 1,) * dim)).T
    return euclidean_space(points.astype(float), name=name or f"grid{size}")


def random_measure(rng, space, support_size=None):
    """Dirichlet weights on a random support"""
    support_size = support_size or space.size
    support_size = max(1, min(support_size, space.size))
    support = rng.choice(space.size, size=support_size, replace=False)
    weights = np.zeros(space.size)
    weights[support] = rng.dirichlet(np.ones(support_size))
    weights /= weights.sum()
    return DiscreteMeasure(space, weights)


def _onto_images(space, images):
    """PointMap onto the distinct rows of images"""
    images = np.round(np.atleast_2d(images), 12)
    unique, inverse = np.unique(images, axis=0, return_inverse=True)
    target = euclidean_space(unique, name="image")
    return PointMap(source=space, target=target, assignment=tuple(np.ravel(inverse)))


def _rotation(rng, dim):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q


def _projection(rng, space):
    factor = rng.uniform(0.2, 1.0)
    return _onto_images(space, factor * (space.coords @ _rotation(rng, space.coords.shape[1]))[:, :1])


def _truncated_distance(rng, space):
    # x -> min(d(a, x), r) is short into R for any anchor a
    anchor = int(rng.integers(space.size))
    reach = space.dist[anchor]
    radius = rng.uniform(0.3, 1.0) * max(reach.max(), 1.0)
    return _onto_images(space, np.minimum(reach, radius)[:, None])


def _box_clamp(rng, space):
    # projection onto a rotated box is the nearest-point map of a convex set
    rotated = space.coords @ _rotation(rng, space.coords.shape[1])
    lo, hi = rotated.min(axis=0), rotated.max(axis=0)
    a = lo + rng.uniform(0.0, 0.5, size=lo.shape) * (hi - lo)
    b = hi - rng.uniform(0.0, 0.5, size=hi.shape) * (hi - lo)
    return _onto_images(space, np.clip(rotated, a, b))


def _retraction(rng, space):
    # nearest-point maps onto subsets are not short in general; grow the subset until one is
    for size in range(max(2, int(rng.integers(2, space.size + 1))), space.size + 1):
        for _ in range(RETRACTION_ATTEMPTS):
            subset = np.sort(rng.choice(space.size, size=size, replace=False))
            nearest = np.argmin(space.dist[:, subset], axis=1)
            f = PointMap(source=space, target=space.subspace(subset, name="retract"), assignment=tuple(nearest))
            if lipschitz_constant(f).lambda_star <= 1.0 + TOL:
                return f
    return PointMap(source=space, target=space, assignment=tuple(range(space.size)))


_SHORT_MAPS = {
    "projection": _projection,
    "truncated_distance": _truncated_distance,
    "box_clamp": _box_clamp,
    "retraction": _retraction,
}


def random_short_map(rng, space, kind=None):
    """
    A short map out of a space with coordinates

    Kinds:
        projection: random rotation, projection onto the first axis and a
            contraction by a factor in [0.2, 1]
        truncated_distance: x -> min(d(a, x), r) into the real line
        box_clamp: nearest-point map onto a random rotated box
        retraction: nearest-point map onto a random subset of the space
            itself, kept only when it is short

    A missing kind is drawn from rng. Images in R^m are merged onto their
    distinct values.
    """
    if kind is None:
        kind = SHORT_MAP_KINDS[int(rng.integers(len(SHORT_MAP_KINDS)))]
    if kind not in _SHORT_MAPS:
        raise ArgumentError(f"unknown short map kind {kind!r}")
    if space.size < 2:
        raise ArgumentError("short maps are drawn on spaces with at least two points")
    if kind in ("projection", "box_clamp") and space.coords is None:
        raise ArgumentError(f"{kind} maps need coordinates on the source space")
    return _SHORT_MAPS[kind](rng, space)


def random_generators(rng, space, count, support_size=None):
    """count random measures, the generators of a convex measure set"""
    return tuple(random_measure(rng, space, support_size) for _ in range(count))
