"""
Brute-force reference computations
Slow but obviously correct versions of the solvers, shared by the tests and
the verification suites. Only meant for tiny instances.
"""

import itertools
from collections import deque

import numpy as np


def transport_by_bases(dist, mu_weights, nu_weights):
    """
    Optimal transport cost by enumerating every basis of the transportation polytope

    The optimum of a linear program is attained at a basic feasible
    solution, so the least cost over all of them is the exact value.
    """
    mu_weights = np.asarray(mu_weights, dtype=float)
    nu_weights = np.asarray(nu_weights, dtype=float)
    rows = np.flatnonzero(mu_weights > 0)
    cols = np.flatnonzero(nu_weights > 0)
    s, t = len(rows), len(cols)
    if s * t > 16:
        raise ValueError("basis enumeration is limited to 4x4 supports")

    cost = np.asarray(dist, dtype=float)[np.ix_(rows, cols)].ravel()
    a_eq = np.vstack([
        np.kron(np.eye(s), np.ones((1, t))),
        np.kron(np.ones((1, s)), np.eye(t)),
    ])[: s + t - 1]
    b_eq = np.concatenate([mu_weights[rows], nu_weights[cols]])[: s + t - 1]
    rank = s + t - 1

    best = np.inf
    for basis in itertools.combinations(range(s * t), rank):
        sub = a_eq[:, basis]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b_eq)
        if (x < -1e-12).any():
            continue
        best = min(best, float(cost[list(basis)] @ x))
    return best


def _simplex_grid(m, step):
    """Mixture coefficients on the simplex of m generators, spacing step"""
    ticks = int(round(1.0 / step))
    if m == 1:
        return np.ones((1, 1))
    if m == 2:
        a = np.arange(ticks + 1) / ticks
        return np.column_stack([a, 1.0 - a])
    out = []
    for i in range(ticks + 1):
        j = np.arange(ticks - i + 1)
        out.append(np.column_stack([np.full(len(j), i), j, ticks - i - j]) / ticks)
    return np.vstack(out)


def two_point_hausdorff(d, A_weights, B_weights, step=1e-3):
    """
    Hausdorff distance of two hulls on a two-point space by a mixture grid

    On two points the Kantorovich distance is d * |mu_a - nu_a|, so every
    measure is represented by its first weight.
    """
    a_vals = _simplex_grid(len(A_weights), step) @ np.asarray(A_weights, dtype=float)[:, 0]
    b_vals = _simplex_grid(len(B_weights), step) @ np.asarray(B_weights, dtype=float)[:, 0]

    def directed(src, dst):
        dst = np.sort(dst)
        pos = np.clip(np.searchsorted(dst, src), 1, len(dst) - 1) if len(dst) > 1 else np.zeros(len(src), int)
        near = np.abs(dst[pos] - src)
        if len(dst) > 1:
            near = np.minimum(near, np.abs(dst[pos - 1] - src))
        return float(near.max())

    return d * max(directed(a_vals, b_vals), directed(b_vals, a_vals))


def segment_min_norm(p, q, step=1e-4):
    """Nearest point of the segment [p, q] to the origin on a parameter grid"""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    t = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)[:, None]
    points = p + t * (q - p)
    return points[int(np.argmin((points ** 2).sum(axis=1)))]


def chain_components_bfs(dist, C, tol=1e-9):
    """C-chain components by breadth-first search, ordered by smallest index"""
    dist = np.asarray(dist, dtype=float)
    n = len(dist)
    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        comp = []
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in range(n):
                if not seen[v] and dist[u, v] <= C + tol:
                    seen[v] = True
                    queue.append(v)
        components.append(sorted(comp))
    return components


def single_free_grid(inst, lo, hi, step):
    """
    Best placement of the only free point of a retraction instance on a square grid

    Returns (value, placement) of the objective max over pairs of
    max(0, |r(w) - r(w')| - eps) / d(w, w').
    """
    if len(inst.free) != 1 or inst.dim != 2:
        raise ValueError("grid oracle handles one free point in the plane")
    axis = np.arange(lo, hi + step / 2, step)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    candidates = np.column_stack([xs.ravel(), ys.ravel()])

    dist = inst.space.dist
    v = inst.free[0]
    anchors = list(inst.anchors)
    fixed = 0.0
    for a, b in itertools.combinations(range(len(anchors)), 2):
        gap = np.linalg.norm(inst.anchor_coords[a] - inst.anchor_coords[b])
        fixed = max(fixed, max(0.0, gap - inst.epsilon) / dist[anchors[a], anchors[b]])

    gaps = np.linalg.norm(candidates[:, None, :] - inst.anchor_coords[None, :, :], axis=-1)
    terms = np.maximum(0.0, gaps - inst.epsilon) / dist[v, anchors][None, :]
    values = np.maximum(fixed, terms.max(axis=1))
    best = int(np.argmin(values))
    return float(values[best]), candidates[best]
