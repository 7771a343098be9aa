"""
Retraction obstruction machinery
The composed map x -> pi(b(ccP(p_n)(F(x)))) on sampled extensions F, and the
least Lipschitz constant of any retraction of a finite X_N onto its Euclidean part
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from utils.errors import ArgumentError, ValidationError
from utils.euclid_convex import barycenter_image, min_norm_point, nearest_point
from utils.measure_hyperspace import ccp_pushforward, dirac_embedding
from utils.metric_core import PointMap, euclidean_space, lipschitz_constant, verify_metric
from utils.paper_spaces import AssemblyParams, build_assembly, projection_map

logger = logging.getLogger(__name__)

SOLVER_GAP = 1e-3
DELTA_FLOOR = 1e-10
STEP_FLOOR = 1e-14
INITIALIZATIONS = ("coords", "centroid", "nearest")


@dataclass(frozen=True, eq=False)
class RetractionInstance:
    """
    A finite space split into anchors (fixed Euclidean images) and free points

    Args:
        space: the metric space, typically a glued X_N assembly
        anchors: indices whose images are fixed
        free: indices to be placed
        anchor_coords: one row in R^n per anchor
        epsilon: additive slack of the (lambda, epsilon) condition
        free_coords: optional own coordinates of free points, used to initialize
    """
    space: object
    anchors: tuple
    free: tuple
    anchor_coords: np.ndarray
    epsilon: float = 0.0
    free_coords: Optional[np.ndarray] = None

    def __post_init__(self):
        anchors = tuple(int(a) for a in self.anchors)
        free = tuple(int(f) for f in self.free)
        if not anchors:
            raise ArgumentError("at least one anchor is required")
        if set(anchors) & set(free):
            raise ArgumentError("anchors and free points overlap")
        if sorted(anchors + free) != list(range(self.space.size)):
            raise ArgumentError("anchors and free points must cover the space exactly")
        coords = np.atleast_2d(np.asarray(self.anchor_coords, dtype=float))
        if coords.shape[0] != len(anchors):
            raise ArgumentError(f"{coords.shape[0]} anchor coordinates for {len(anchors)} anchors")
        if self.epsilon < 0:
            raise ArgumentError("epsilon must be nonnegative")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "anchor_coords", coords)

    @property
    def dim(self):
        return self.anchor_coords.shape[1]

    def with_epsilon(self, epsilon):
        return RetractionInstance(
            self.space, self.anchors, self.free, self.anchor_coords, epsilon, self.free_coords
        )


@dataclass
class ObstructionResult:
    lambda_min: float
    placement: np.ndarray
    certificate: float
    iterations: int
    converged: bool
    lower_bound: float
    init: str = "coords"

    def to_dict(self):
        return {
            "lambda_min": self.lambda_min,
            "placement": self.placement.tolist(),
            "certificate": self.certificate,
            "iterations": self.iterations,
            "converged": self.converged,
            "status": "converged" if self.converged else "unconverged",
            "lower_bound": self.lower_bound,
            "init": self.init,
        }


class _PairObjective:
    """max over pairs of max(0, |r(w) - r(w')| - eps) / d(w, w') with r fixed on anchors"""

    def __init__(self, inst):
        self.inst = inst
        n_points = inst.space.size
        self.slot = np.full(n_points, -1)
        self.slot[list(inst.free)] = np.arange(len(inst.free))
        self.base = np.zeros((n_points, inst.dim))
        self.base[list(inst.anchors)] = inst.anchor_coords

        iu, ju = np.triu_indices(n_points, k=1)
        is_anchor = self.slot < 0
        both = is_anchor[iu] & is_anchor[ju]
        self.I, self.J = iu[~both], ju[~both]
        self.D = inst.space.dist[self.I, self.J]

        if both.any():
            gaps = np.linalg.norm(self.base[iu[both]] - self.base[ju[both]], axis=1)
            self.c0 = float((np.maximum(0.0, gaps - inst.epsilon) / inst.space.dist[iu[both], ju[both]]).max())
        else:
            self.c0 = 0.0

    def positions(self, x):
        full = self.base.copy()
        full[list(self.inst.free)] = x
        return full

    def terms(self, x):
        full = self.positions(x)
        diff = full[self.I] - full[self.J]
        norms = np.linalg.norm(diff, axis=1)
        return np.maximum(0.0, norms - self.inst.epsilon) / self.D, diff, norms

    def value(self, x):
        vals = self.terms(x)[0]
        return max(self.c0, float(vals.max()) if len(vals) else 0.0)

    def active_gradients(self, x, f, delta):
        vals, diff, norms = self.terms(x)
        rows = []
        if self.c0 >= f - delta:
            rows.append(np.zeros(x.size))
        for p in np.flatnonzero(vals >= f - delta):
            g = np.zeros_like(x)
            if vals[p] > 0 and norms[p] > 0:
                step = diff[p] / (norms[p] * self.D[p])
                if self.slot[self.I[p]] >= 0:
                    g[self.slot[self.I[p]]] += step
                if self.slot[self.J[p]] >= 0:
                    g[self.slot[self.J[p]]] -= step
            rows.append(g.ravel())
        return np.array(rows)

    def initial(self, how):
        inst = self.inst
        centroid = inst.anchor_coords.mean(axis=0)
        if how == "centroid":
            return np.tile(centroid, (len(inst.free), 1))
        if how == "nearest":
            dist = inst.space.dist[np.ix_(list(inst.free), list(inst.anchors))]
            return inst.anchor_coords[np.argmin(dist, axis=1)].copy()
        if how == "coords":
            x = np.tile(centroid, (len(inst.free), 1))
            if inst.free_coords is not None:
                own = np.atleast_2d(np.asarray(inst.free_coords, dtype=float))
                known = ~np.isnan(own).any(axis=1)
                x[known] = own[known, : inst.dim]
            return x
        raise ArgumentError(f"unknown initialization {how!r}")


def retraction_lower_bound(inst, init="coords", max_iter=3000, gap_target=1e-6):
    """
    Least Lipschitz constant of a retraction of the instance onto its anchors

    The objective is a pointwise max of convex pair terms. Each step moves
    along minus the min-norm element of the hull of delta-active gradients
    with backtracking; delta shrinks tenfold whenever that direction is too
    weak. The certificate delta + |g| * R bounds the optimality gap when an
    optimal placement lies within R of the current one.
    """
    report = verify_metric(inst.space)
    if not report.passed:
        raise ValidationError(f"instance is not a metric space: {report.violations[:3]}")

    obj = _PairObjective(inst)
    x = obj.initial(init)
    n_free = len(inst.free)
    anchor_diam = float(np.linalg.norm(inst.anchor_coords[:, None] - inst.anchor_coords[None], axis=-1).max())
    radius = math.sqrt(max(n_free, 1)) * max(anchor_diam, 1.0)

    f = obj.value(x)
    if n_free == 0:
        return ObstructionResult(f, x, 0.0, 0, True, obj.c0, init)

    target = gap_target * max(1.0, f)
    delta = 1e-2 * max(1.0, f)
    step = max(anchor_diam, 1.0)
    certificate = float("inf")
    iterations = 0
    for iterations in range(1, max_iter + 1):
        f = obj.value(x)
        grads = obj.active_gradients(x, f, delta)
        g = nearest_point(grads)
        g_norm = float(np.linalg.norm(g))
        certificate = delta + g_norm * radius
        if certificate <= target:
            break
        if g_norm * radius <= delta:
            if delta <= DELTA_FLOOR:
                break
            delta /= 10.0
            continue

        direction = -g.reshape(x.shape)
        t = step
        accepted = False
        while t >= STEP_FLOOR:
            candidate = x + t * direction
            if obj.value(candidate) <= f - 0.5 * t * g_norm ** 2:
                accepted = True
                break
            t /= 2.0
        if not accepted:
            if delta <= DELTA_FLOOR:
                break
            delta /= 10.0
            continue
        x = candidate
        step = min(2.0 * t, max(anchor_diam, 1.0))
    else:
        logger.warning("retraction search used its %d iterations", max_iter)

    value = obj.value(x)
    logger.debug("lambda_min %.9f after %d iterations, certificate %.2e", value, iterations, certificate)
    return ObstructionResult(
        lambda_min=value,
        placement=x,
        certificate=certificate,
        iterations=iterations,
        converged=certificate <= SOLVER_GAP,
        lower_bound=obj.c0,
        init=init,
    )


def multistart(inst, inits=INITIALIZATIONS, **kwargs):
    """Solve from each fixed initialization; convexity makes the values agree"""
    return [retraction_lower_bound(inst, init=how, **kwargs) for how in inits]


def instance_from_assembly(assembly, epsilon=0.0, anchor_tags=None):
    """
    Anchors are the Euclidean sample (T-corners included), free points the inner vertices

    anchor_tags, when given, replaces the default choice by an explicit tag set.
    """
    space = assembly.space
    if space.coords is None:
        raise ArgumentError("assembly carries no coordinates")
    if anchor_tags is None:
        anchors = assembly.euclidean_indices()
    else:
        anchors = assembly.indices_tagged(lambda t: t in set(anchor_tags))
    free = [i for i in range(space.size) if i not in set(anchors)]
    return RetractionInstance(
        space=space,
        anchors=tuple(anchors),
        free=tuple(free),
        anchor_coords=space.coords[anchors],
        epsilon=epsilon,
        free_coords=space.coords[free] if free else None,
    )


@dataclass
class ComposedRetraction:
    table: np.ndarray
    report: object
    point_map: PointMap = field(repr=False, default=None)


def dirac_extension(assembly):
    """The extension x -> {delta_x} of the Dirac embedding to every point"""
    return dirac_embedding(assembly.space)


def composed_retraction(F, n, assembly, epsilon=0.0):
    """
    Evaluate x -> pi(b(ccP(p_n)(F(x)))) and measure its Lipschitz constant

    Args:
        F: mapping point index -> ConvexMeasureSet on a space with coordinates
        n: dimension of the Euclidean target
        assembly: SpaceAssembly giving the source metric

    Returns:
        ComposedRetraction with the R^n table and the LipschitzReport
    """
    projections = {}
    table = np.zeros((assembly.space.size, n))
    for i in range(assembly.space.size):
        if i not in F:
            raise ArgumentError(f"extension is undefined at point {i}")
        A = F[i]
        if A.space.coords is None:
            raise ArgumentError("support points carry no X' coordinates")
        key = id(A.space)
        if key not in projections:
            projections[key] = (A.space, projection_map(A.space, n))
        pushed = ccp_pushforward(projections[key][1], A)
        table[i] = min_norm_point(barycenter_image(pushed))

    unique, inverse = np.unique(table, axis=0, return_inverse=True)
    target = euclidean_space(unique, name=f"R{n}")
    point_map = PointMap(source=assembly.space, target=target, assignment=tuple(np.ravel(inverse)))
    report = lipschitz_constant(point_map, epsilon) if assembly.space.size >= 2 else None
    return ComposedRetraction(table=table, report=report, point_map=point_map)


def lambda_trend(n_values, k_values, epsilon=0.0, preset="general", include_midpoints=True):
    """Table of lambda_min over (n, k) for single-graph X_N instances"""
    rows = []
    for n in n_values:
        for k in k_values:
            params = AssemblyParams(
                n_values=(n,), k_values=(k,), preset=preset, include_midpoints=include_midpoints
            )
            if not params.graph_indices():
                continue
            assembly = build_assembly("X_N", params)
            inst = instance_from_assembly(assembly, epsilon)
            result = retraction_lower_bound(inst)
            rows.append({
                "n": n,
                "k": k,
                "points": assembly.space.size,
                "free": len(inst.free),
                "lambda_min": result.lambda_min,
                "certificate": result.certificate,
                "iterations": result.iterations,
                "converged": result.converged,
                "sqrt_n": math.sqrt(n),
                "quarter_root_n": n ** 0.25,
            })
    return pd.DataFrame(rows)


def nested_anchor_chain(n, k, epsilon=0.0):
    """
    lambda_min for growing anchor samples S0 within S1 within S2

    S0 = T-corners and origin, S1 adds outer-edge midpoints, S2 adds the
    lattice of spacing k.
    """
    stages = [
        ("corners", AssemblyParams(n_values=(n,), k_values=(k,), include_midpoints=False)),
        ("midpoints", AssemblyParams(n_values=(n,), k_values=(k,), include_midpoints=True)),
        ("lattice", AssemblyParams(n_values=(n,), k_values=(k,), include_midpoints=True, sample_spacing=float(k))),
    ]
    out = []
    for name, params in stages:
        inst = instance_from_assembly(build_assembly("X_N", params), epsilon)
        out.append((name, len(inst.anchors), retraction_lower_bound(inst)))
    return out
