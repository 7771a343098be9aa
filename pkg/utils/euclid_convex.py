"""
Euclidean side of the construction
Barycenters, polytopes in R^n with their Hausdorff metric, the min-norm-point
map pi, and an empirical probe of the claim that pi is short
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from utils.errors import ArgumentError, ValidationError

logger = logging.getLogger(__name__)

# Wolfe termination: |y|^2 - min_j <y, p_j> <= WOLFE_TOL * scale
WOLFE_TOL = 1e-12
PROBE_TOL = 1e-9

FIXED_PROBE_PAIR = (
    np.array([[0.0, 1.0], [0.1, 1.0]]),
    np.array([[0.0, 1.0], [0.1, 0.99]]),
)


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a nonempty vertex list in R^dim"""
    dim: int
    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise ArgumentError("a polytope needs at least one vertex")
        if v.shape[1] != self.dim:
            raise ArgumentError(f"vertices have dimension {v.shape[1]}, expected {self.dim}")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def of(cls, vertices):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        return cls(v.shape[1], v)

    def to_dict(self):
        return {"dim": self.dim, "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class EmbeddedMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(p) != len(w):
            raise ValidationError(f"{len(p)} points but {len(w)} weights")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError("weights must be a probability vector")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)


def barycenter(mu):
    """The weighted mean, the unique point where linear functionals match their integrals"""
    return mu.weights @ mu.points


def _affine_minimizer(points):
    """Coefficients (summing to 1) of the min-norm point of the affine hull"""
    m = len(points)
    gram = points @ points.T
    kkt = np.zeros((m + 1, m + 1))
    kkt[:m, :m] = gram
    kkt[:m, m] = 1.0
    kkt[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    alpha = sol[:m]
    return alpha / alpha.sum()


def nearest_point(vertices, query=None, max_iter=None):
    """
    Nearest point of conv(vertices) to query (the origin by default)

    Wolfe's active-set method: major cycles add the vertex minimizing
    <y, p>, minor cycles move to the affine minimizer of the corral and
    drop vertices whose coefficient would turn negative. Ties go to the
    lowest vertex index.
    """
    points = np.atleast_2d(np.asarray(vertices, dtype=float))
    if query is not None:
        points = points - np.asarray(query, dtype=float)
    m, n = points.shape
    max_iter = max_iter or 50 * (m + n) + 100
    scale = max(1.0, float((points ** 2).sum(axis=1).max()))

    norms = (points ** 2).sum(axis=1)
    corral = [int(np.argmin(norms))]
    weights = np.array([1.0])
    y = points[corral[0]].copy()

    for _ in range(max_iter):
        dots = points @ y
        j = int(np.argmin(dots))
        if y @ y - dots[j] <= WOLFE_TOL * scale or j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)

        while True:
            alpha = _affine_minimizer(points[corral])
            if (alpha > WOLFE_TOL).all():
                weights = alpha
                break
            # step toward the affine minimizer until a coefficient hits zero
            shrinking = alpha <= WOLFE_TOL
            denom = weights[shrinking] - alpha[shrinking]
            ratios = np.where(denom > 0, weights[shrinking] / np.where(denom > 0, denom, 1.0), 0.0)
            theta = float(np.clip(ratios.min(), 0.0, 1.0))
            weights = theta * alpha + (1 - theta) * weights
            keep = weights > WOLFE_TOL
            if keep.all():
                keep[int(np.argmin(weights))] = False
            corral = [c for c, k in zip(corral, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
        y = weights @ points[corral]
    else:
        logger.warning("nearest point search stopped after %d iterations", max_iter)

    if query is not None:
        y = y + np.asarray(query, dtype=float)
    return y


def min_norm_point(A):
    """The map pi: the unique point of A nearest to the origin"""
    return nearest_point(A.vertices)


def min_norm_certificate(y, vertices):
    """min over vertices of <y, v - y>; nonnegative exactly at the optimum"""
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    return float((v @ y - y @ y).min())


def _directed_hausdorff(A, B):
    return max(
        float(np.linalg.norm(a - nearest_point(B.vertices, query=a))) for a in A.vertices
    )


def hausdorff_polytopes(A, B):
    """Hausdorff distance between two polytopes of equal dimension"""
    if A.dim != B.dim:
        raise ArgumentError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return max(_directed_hausdorff(A, B), _directed_hausdorff(B, A))


def barycenter_image(A):
    """
    b(A) for a convex measure set whose space carries coordinates

    b is affine on mixtures, so the image is the hull of generator barycenters.
    """
    coords = A.space.coords
    if coords is None:
        raise ArgumentError("barycenters need coordinates on the underlying space")
    vertices = A.weight_matrix @ coords
    return Polytope(coords.shape[1], vertices)


@dataclass(frozen=True)
class ProbeFamily:
    """
    Polytope pairs sampled by pi_lemma_probe

    Args:
        kind: random, identical, translated_singletons or thin_segments
        dim: ambient dimension
        max_vertices: upper bound on vertices per polytope
        scale: coordinate scale
    """
    kind: str = "random"
    dim: int = 2
    max_vertices: int = 4
    scale: float = 2.0

    def sample(self, rng):
        if self.kind == "random":
            a = rng.uniform(-self.scale, self.scale, size=(rng.integers(1, self.max_vertices + 1), self.dim))
            b = rng.uniform(-self.scale, self.scale, size=(rng.integers(1, self.max_vertices + 1), self.dim))
        elif self.kind == "identical":
            a = rng.uniform(-self.scale, self.scale, size=(rng.integers(1, self.max_vertices + 1), self.dim))
            b = a.copy()
        elif self.kind == "translated_singletons":
            a = rng.uniform(-self.scale, self.scale, size=(1, self.dim))
            b = a + rng.normal(size=(1, self.dim))
        elif self.kind == "thin_segments":
            # two segments from a common point, the second tilted toward the origin
            base = np.zeros(self.dim)
            base[-1] = self.scale
            direction = np.zeros(self.dim)
            direction[0] = 1.0
            length = rng.uniform(0.01, 0.5) * self.scale
            tilt = rng.uniform(0.001, 0.2) * length
            a = np.vstack([base, base + length * direction])
            tip = base + length * direction
            tip[-1] -= tilt
            b = np.vstack([base, tip])
        else:
            raise ArgumentError(f"unknown probe family {self.kind!r}")
        return Polytope(self.dim, a), Polytope(self.dim, b)


@dataclass
class ProbeReport:
    fixed_ratio: float
    family_max_ratio: float
    witness: tuple
    records: list = field(default_factory=list)
    skipped: int = 0

    @property
    def max_ratio(self):
        return max(self.fixed_ratio, self.family_max_ratio)

    @property
    def shortness_violated(self):
        return self.max_ratio > 1.0 + PROBE_TOL

    def to_dict(self):
        return {
            "fixed_ratio": self.fixed_ratio,
            "family_max_ratio": self.family_max_ratio,
            "max_ratio": self.max_ratio,
            "shortness_violated": self.shortness_violated,
            "skipped": self.skipped,
            "witness": [p.to_dict() for p in self.witness],
            "records": self.records,
        }


def pi_ratio(A, B):
    """|pi(A) - pi(B)| / d_H(A, B), or None when d_H vanishes"""
    d_h = hausdorff_polytopes(A, B)
    if d_h <= PROBE_TOL:
        return None
    return float(np.linalg.norm(min_norm_point(A) - min_norm_point(B))) / d_h


def _probe_record(trial, ratio, A, B):
    return {"trial": trial, "ratio": ratio, "A": A.to_dict(), "B": B.to_dict()}


def pi_lemma_probe(trials, seed, family=None, workers=1):
    """
    Measure how far pi is from being short

    Every trial draws a pair from the family with its own generator seeded
    by (seed, trial); the fixed thin-segment pair is always evaluated.
    """
    if trials < 1:
        raise ArgumentError("trials must be at least 1")
    family = family or ProbeFamily()

    fixed = tuple(Polytope.of(v) for v in FIXED_PROBE_PAIR)
    fixed_ratio = pi_ratio(*fixed)

    def trial(t):
        rng = np.random.default_rng([seed, t])
        A, B = family.sample(rng)
        return t, A, B, pi_ratio(A, B)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(trial, range(trials)))
    else:
        outcomes = [trial(t) for t in range(trials)]

    report = ProbeReport(fixed_ratio=fixed_ratio, family_max_ratio=0.0, witness=fixed)
    report.records.append(_probe_record("fixed", fixed_ratio, *fixed))
    best = None
    for t, A, B, ratio in outcomes:
        if ratio is None:
            report.skipped += 1
            continue
        report.records.append(_probe_record(t, ratio, A, B))
        if best is None or ratio > best[0]:
            best = (ratio, A, B)
    if best is not None:
        report.family_max_ratio = best[0]
        if best[0] > fixed_ratio:
            report.witness = (best[1], best[2])
    return report
