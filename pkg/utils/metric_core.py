"""
Finite metric spaces and the diagnostics built on them
Metric-axiom checks, (lambda, epsilon)-Lipschitz constants, C-chain components
and the maximal metric glued from partial metrics

Properness (every closed ball compact) holds trivially for finite spaces,
so no operation checks it.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from utils.errors import ArgumentError, DisconnectedError, StructuralError

logger = logging.getLogger(__name__)

# Absolute tolerance for every axiom and shortness check
TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """
    Labeled point set with a full distance matrix

    Args:
        labels: opaque point identifiers (strings for everything built here)
        dist: square matrix of distances
        coords: optional Euclidean coordinates, one row per point
        name: optional identifier used in serialized measures
    """
    labels: tuple
    dist: np.ndarray
    coords: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise StructuralError(f"distance matrix must be square, got shape {dist.shape}")
        labels = tuple(self.labels)
        if len(labels) != dist.shape[0]:
            raise StructuralError(f"{len(labels)} labels for a {dist.shape[0]}-point matrix")
        if len(set(labels)) != len(labels):
            raise StructuralError("labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        if self.coords is not None:
            coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
            if coords.shape[0] != len(labels):
                raise StructuralError(f"{coords.shape[0]} coordinate rows for {len(labels)} points")
            object.__setattr__(self, "coords", coords)

    @property
    def size(self):
        return len(self.labels)

    def index_of(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ArgumentError(f"unknown label {label!r}") from None

    def diameter(self, indices=None):
        if self.size == 0:
            return 0.0
        if indices is None:
            return float(self.dist.max())
        idx = np.asarray(indices, dtype=int)
        return float(self.dist[np.ix_(idx, idx)].max())

    def subspace(self, indices, name=""):
        idx = np.asarray(indices, dtype=int)
        coords = None if self.coords is None else self.coords[idx]
        return FiniteMetricSpace(
            labels=tuple(self.labels[i] for i in idx),
            dist=self.dist[np.ix_(idx, idx)],
            coords=coords,
            name=name or self.name,
        )

    def relabel(self, mapping, name=""):
        """Return a copy whose labels are replaced through mapping (missing keys kept)"""
        return FiniteMetricSpace(
            labels=tuple(mapping.get(label, label) for label in self.labels),
            dist=self.dist,
            coords=self.coords,
            name=name or self.name,
        )

    def same_as(self, other):
        """Spaces are interchangeable when labels and distances coincide"""
        if self is other:
            return True
        return (
            isinstance(other, FiniteMetricSpace)
            and self.labels == other.labels
            and self.dist.shape == other.dist.shape
            and np.array_equal(self.dist, other.dist)
        )


@dataclass(frozen=True)
class PointMap:
    """Total map between the index sets of two finite spaces"""
    source: FiniteMetricSpace
    target: FiniteMetricSpace
    assignment: tuple

    def __post_init__(self):
        assignment = tuple(int(a) for a in self.assignment)
        if len(assignment) != self.source.size:
            raise ArgumentError(
                f"assignment has {len(assignment)} entries for {self.source.size} source points"
            )
        bad = [a for a in assignment if a < 0 or a >= self.target.size]
        if bad:
            raise ArgumentError(f"assignment refers to missing target indices {sorted(set(bad))}")
        object.__setattr__(self, "assignment", assignment)

    def image_dist(self):
        """Target distances pulled back to source index pairs"""
        idx = np.asarray(self.assignment, dtype=int)
        return self.target.dist[np.ix_(idx, idx)]


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {"passed": self.passed, "violations": [list(v) for v in self.violations]}


@dataclass(frozen=True)
class LipschitzReport:
    epsilon: float
    lambda_star: float
    witness_pair: Optional[tuple]

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "lambda_star": self.lambda_star,
            "witness_pair": None if self.witness_pair is None else list(self.witness_pair),
        }


@dataclass(frozen=True)
class AdditiveReport:
    lam: float
    epsilon_star: float
    witness_pair: Optional[tuple]


@dataclass(frozen=True)
class ChainReport:
    C: float
    components: list
    max_diameter: float
    separation: float

    def to_dict(self):
        return {
            "C": self.C,
            "components": [list(c) for c in self.components],
            "max_diameter": self.max_diameter,
            "separation": self.separation,
        }


@dataclass(frozen=True)
class GluedSpace:
    """Result of glue_maximal: the glued space plus the pairs it shrank"""
    space: FiniteMetricSpace
    disagreements: list

    def to_dict(self):
        return {
            "labels": list(self.space.labels),
            "disagreements": [list(d) for d in self.disagreements],
        }


def euclidean_space(points, labels=None, name=""):
    """Finite subset of R^n with the Euclidean metric"""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        pts = pts.reshape(0, 1)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    if labels is None:
        labels = tuple(f"p{i}" for i in range(len(pts)))
    return FiniteMetricSpace(labels=tuple(labels), dist=dist, coords=pts, name=name)


def _as_matrix(space):
    if isinstance(space, FiniteMetricSpace):
        return space.dist
    dist = np.asarray(space, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise StructuralError(f"distance matrix must be square, got shape {dist.shape}")
    return dist


def verify_metric(space, tol=TOL, max_violations=100):
    """
    Check the metric axioms on a finite space

    Args:
        space: FiniteMetricSpace or a raw square matrix
        tol: absolute tolerance
        max_violations: cap on the number of recorded violations

    Returns:
        AxiomReport; violations are ("diagonal", i), ("positivity", i, j)
        or ("triangle", i, j, k) with d(i,k) > d(i,j) + d(j,k)
    """
    dist = _as_matrix(space)
    if not np.allclose(dist, dist.T, rtol=0.0, atol=tol):
        i, j = np.argwhere(np.abs(dist - dist.T) > tol)[0]
        raise StructuralError(f"distance matrix is asymmetric at ({i}, {j})")

    violations = []
    n = dist.shape[0]
    for i in np.flatnonzero(np.abs(np.diag(dist)) > tol):
        violations.append(("diagonal", int(i)))

    off = ~np.eye(n, dtype=bool)
    bad_pos = np.argwhere(off & (dist <= tol))
    for i, j in bad_pos:
        if i < j:
            violations.append(("positivity", int(i), int(j)))

    if n >= 3 and not (dist < -tol).any():
        # d satisfies the triangle inequality iff it equals its shortest-path closure
        closure = shortest_path(np.where(off, dist, 0.0), method="FW", directed=False)
        broken = np.argwhere(dist > closure + tol)
        for i, k in broken:
            if i >= k or len(violations) >= max_violations:
                continue
            detour = dist[i, :] + dist[:, k]
            detour[[i, k]] = np.inf
            j = int(np.argmin(detour))
            violations.append(("triangle", int(i), j, int(k)))

    violations = violations[:max_violations]
    if violations:
        logger.debug("metric check found %d violations", len(violations))
    return AxiomReport(passed=not violations, violations=violations)


def lipschitz_constant(f, epsilon=0.0):
    """
    Least lambda such that f is (lambda, epsilon)-Lipschitz on the finite instance

    The witness is the lexicographically smallest pair attaining the maximum.
    """
    if f.source.size < 2:
        raise ArgumentError("source needs at least two points")
    if epsilon < 0:
        raise ArgumentError("epsilon must be nonnegative")
    iu, ju = np.triu_indices(f.source.size, k=1)
    ds = f.source.dist[iu, ju]
    dt = f.image_dist()[iu, ju]
    ratios = np.maximum(0.0, dt - epsilon) / ds
    best = int(np.argmax(ratios))
    return LipschitzReport(
        epsilon=float(epsilon),
        lambda_star=float(ratios[best]),
        witness_pair=(int(iu[best]), int(ju[best])),
    )


def additive_constant(f, lam):
    """Least epsilon such that f is (lam, epsilon)-Lipschitz on the finite instance"""
    if lam <= 0:
        raise ArgumentError("lambda must be positive")
    if f.source.size < 2:
        return AdditiveReport(lam=float(lam), epsilon_star=0.0, witness_pair=None)
    iu, ju = np.triu_indices(f.source.size, k=1)
    excess = np.maximum(0.0, f.image_dist()[iu, ju] - lam * f.source.dist[iu, ju])
    best = int(np.argmax(excess))
    return AdditiveReport(
        lam=float(lam),
        epsilon_star=float(excess[best]),
        witness_pair=(int(iu[best]), int(ju[best])),
    )


def compose(f, g):
    """The map g after f"""
    if not f.target.same_as(g.source):
        raise ArgumentError("target of the first map is not the source of the second")
    return PointMap(
        source=f.source,
        target=g.target,
        assignment=tuple(g.assignment[a] for a in f.assignment),
    )


def chain_components(space, C):
    """
    Partition a space into C-chain components

    Two points share a component iff a chain with consecutive gaps <= C
    joins them. Components are listed by their smallest index.
    """
    if C <= 0:
        raise ArgumentError("C must be positive")
    n = space.size
    if n == 0:
        return ChainReport(C=float(C), components=[], max_diameter=0.0, separation=float("inf"))

    adjacency = (space.dist <= C + TOL).astype(np.int8)
    _, membership = connected_components(adjacency, directed=False)

    groups = {}
    for idx, comp in enumerate(membership):
        groups.setdefault(int(comp), []).append(idx)
    components = sorted(groups.values(), key=lambda c: c[0])

    max_diameter = max(space.diameter(c) for c in components)
    if len(components) > 1:
        different = membership[:, None] != membership[None, :]
        separation = float(space.dist[different].min())
    else:
        separation = float("inf")
    return ChainReport(
        C=float(C),
        components=components,
        max_diameter=float(max_diameter),
        separation=separation,
    )


def glue_maximal(parts: Sequence[FiniteMetricSpace], name=""):
    """
    Largest metric dominated by every supplied partial distance

    Each part contributes its distances as edges of a union multigraph on the
    union of labels; the glued metric is all-pairs shortest path. Pairs where
    the glued value is strictly below a supplied value are reported.
    """
    labels = []
    position = {}
    for part in parts:
        for label in part.labels:
            if label not in position:
                position[label] = len(labels)
                labels.append(label)

    n = len(labels)
    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    for part in parts:
        idx = np.array([position[label] for label in part.labels], dtype=int)
        if len(idx) == 0:
            continue
        block = weights[np.ix_(idx, idx)]
        weights[np.ix_(idx, idx)] = np.minimum(block, part.dist)

    if n == 0:
        return GluedSpace(FiniteMetricSpace(labels=(), dist=np.zeros((0, 0)), name=name), [])

    finite = np.isfinite(weights) & (weights > 0)
    n_classes, membership = connected_components(finite.astype(np.int8), directed=False)
    if n_classes > 1:
        classes = [[labels[i] for i in np.flatnonzero(membership == c)] for c in range(n_classes)]
        raise DisconnectedError(
            f"union graph splits into {n_classes} label classes", classes=classes
        )

    glued = shortest_path(np.where(finite, weights, 0.0), method="FW", directed=False)

    disagreements = []
    for part in parts:
        idx = [position[label] for label in part.labels]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                supplied = float(part.dist[a, b])
                value = float(glued[idx[a], idx[b]])
                if value < supplied - TOL:
                    disagreements.append((part.labels[a], part.labels[b], supplied, value))
    if disagreements:
        logger.debug("glued metric shrank %d supplied distances", len(disagreements))

    coords = _merge_coords(parts, position, n)
    return GluedSpace(
        space=FiniteMetricSpace(labels=tuple(labels), dist=glued, coords=coords, name=name),
        disagreements=disagreements,
    )


def _merge_coords(parts, position, n):
    """Carry coordinates over when every label received some (zero-padded)"""
    dim = max((p.coords.shape[1] for p in parts if p.coords is not None and p.size), default=0)
    if dim == 0:
        return None
    coords = np.full((n, dim), np.nan)
    for part in parts:
        if part.coords is None:
            continue
        for label, row in zip(part.labels, part.coords):
            i = position[label]
            if np.isnan(coords[i, 0]):
                coords[i, :] = 0.0
                coords[i, : len(row)] = row
    if np.isnan(coords).any():
        return None
    return coords
