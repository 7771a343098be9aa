"""
Finite truncations of the counterexample spaces
Graphs G_{n,k} with their path metric, slices of X', and the spaces X, Y, X_N
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from utils.errors import ArgumentError, DisconnectedError, PreconditionError, ResourceError
from utils.metric_core import (
    FiniteMetricSpace,
    PointMap,
    euclidean_space,
    glue_maximal,
)

logger = logging.getLogger(__name__)

DEFAULT_VERTEX_BUDGET = 2 ** 14
ASSEMBLY_KINDS = ("Xprime_slice", "X_trunc", "Y_trunc", "X_N")
PRESETS = ("general", "squared")


def _fmt(value):
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def point_label(prefix, coords):
    """Stable string label such as 'G2,1:T(2,-2)'"""
    return f"{prefix}({','.join(_fmt(c) for c in coords)})"


@dataclass(frozen=True)
class GnkGraph:
    """
    The graph G_{n,k}

    Vertices are indexed inner corners first (coordinates +-k), then outer
    corners (coordinates +-2k); edges are (i, j, weight) with i < j.
    """
    n: int
    k: int
    inner: np.ndarray
    outer: np.ndarray
    edges: tuple

    @property
    def vertices(self):
        return np.vstack([self.inner, self.outer])

    @property
    def size(self):
        return len(self.inner) + len(self.outer)

    def is_inner(self, i):
        return i < len(self.inner)

    def labels(self):
        prefix = f"G{self.n},{self.k}:"
        inner = [point_label(prefix + "I", x) for x in self.inner]
        outer = [point_label(prefix + "T", x) for x in self.outer]
        return tuple(inner + outer)


def build_gnk(n, k, vertex_budget=DEFAULT_VERTEX_BUDGET):
    """
    Build G_{n,k} from the literal edge rule

    {x, y} is an edge iff the Euclidean distance is 2k, or y = 2x, or x = 2y.
    Edge weights are max-norms of the coordinate difference.
    """
    if n < 2 or k < 1:
        raise ArgumentError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    if 2 ** (n + 1) > vertex_budget:
        raise ResourceError(
            f"G_{{{n},{k}}} has {2 ** (n + 1)} vertices, over the budget of {vertex_budget}",
            limit=vertex_budget,
        )

    signs = np.array(list(itertools.product((-1, 1), repeat=n)), dtype=np.int64)
    inner = signs * k
    outer = signs * 2 * k
    vertices = np.vstack([inner, outer])

    edges = []
    target_sq = 4 * k * k
    for i in range(len(vertices)):
        rest = vertices[i + 1:]
        diff = rest - vertices[i]
        sq = (diff * diff).sum(axis=1)
        doubled = (rest == 2 * vertices[i]).all(axis=1) | (vertices[i] == 2 * rest).all(axis=1)
        for offset in np.flatnonzero((sq == target_sq) | doubled):
            j = i + 1 + int(offset)
            edges.append((i, j, float(np.abs(diff[offset]).max())))

    return GnkGraph(n=n, k=k, inner=inner, outer=outer, edges=tuple(edges))


def gnk_metric(g, workers=1):
    """
    Path metric d_{n,k}: all-pairs shortest paths, one Dijkstra per source

    Sources may run concurrently; rows are merged by source index.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(g.size))
    graph.add_weighted_edges_from(g.edges)
    if not nx.is_connected(graph):
        labels = g.labels()
        classes = [[labels[i] for i in sorted(c)] for c in nx.connected_components(graph)]
        raise DisconnectedError(f"G_{{{g.n},{g.k}}} is disconnected", classes=classes)

    def row(source):
        lengths = nx.single_source_dijkstra_path_length(graph, source)
        return source, [lengths[t] for t in range(g.size)]

    dist = np.zeros((g.size, g.size))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(row, range(g.size)))
    else:
        rows = [row(s) for s in range(g.size)]
    for source, values in sorted(rows):
        dist[source] = values

    return FiniteMetricSpace(
        labels=g.labels(), dist=dist, coords=g.vertices.astype(float), name=f"G_{g.n},{g.k}"
    )


def xprime_distance(p, q):
    """
    Distance in X' between (level m, point u) and (level n, point v)

    The shorter coordinate vector is zero-padded.
    """
    m, u = p
    n, v = q
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    dim = max(len(u), len(v))
    u = np.pad(u, (0, dim - len(u)))
    v = np.pad(v, (0, dim - len(v)))
    return math.sqrt((m - n) ** 2 + float(((u - v) ** 2).sum()))


def chain_bound_closed_form(C):
    """sqrt(k^2 + (3k^2)^2) with k the least natural number such that C < (k+1)^2"""
    k = int(math.floor(math.sqrt(C)))
    while (k + 1) ** 2 <= C:
        k += 1
    return math.sqrt(k ** 2 + (3 * k ** 2) ** 2)


def projection_map(space, n):
    """
    The coordinate projection p_n onto its (distinct) image in R^n

    Returns a PointMap whose target is the image with the Euclidean metric.
    """
    if space.coords is None:
        raise ArgumentError("projection needs coordinates on every point")
    coords = space.coords
    if coords.shape[1] < n:
        coords = np.pad(coords, ((0, 0), (0, n - coords.shape[1])))
    images = coords[:, :n]
    unique, inverse = np.unique(images, axis=0, return_inverse=True)
    target = euclidean_space(
        unique, labels=tuple(point_label(f"R{n}:", row) for row in unique), name=f"R{n}"
    )
    return PointMap(source=space, target=target, assignment=tuple(np.ravel(inverse)))


@dataclass(frozen=True)
class AssemblyParams:
    """
    Parameters of build_assembly

    Args:
        n_values: graph dimensions (squared preset: indices j, graph dimension j^2)
        k_values: graph scales (squared preset: indices l >= j, scale l^2)
        preset: "general" or "squared"
        sample: explicit Euclidean sample points for X_N
        sample_spacing: lattice spacing of extra X_N sample points
        include_midpoints: add midpoints of the outer-cube edges to X_N
        xprime_levels: slice dimensions for Xprime_slice
        sample_radius: half-width of the Xprime_slice lattice
        vertex_budget: cap on the vertices of any single graph
    """
    n_values: tuple = (2,)
    k_values: tuple = (1,)
    preset: str = "general"
    sample: Optional[tuple] = None
    sample_spacing: Optional[float] = None
    include_midpoints: bool = True
    xprime_levels: tuple = (2,)
    sample_radius: float = 1.0
    vertex_budget: int = DEFAULT_VERTEX_BUDGET

    def graph_indices(self):
        """(dimension, scale, level) of every included graph"""
        if self.preset not in PRESETS:
            raise ArgumentError(f"unknown preset {self.preset!r}")
        out = []
        for n in self.n_values:
            for k in self.k_values:
                if self.preset == "squared":
                    if k >= n:
                        out.append((n * n, k * k, n * n))
                else:
                    out.append((n, k, n * n))
        return out


@dataclass(frozen=True)
class SpaceAssembly:
    kind: str
    params: AssemblyParams
    space: FiniteMetricSpace
    tags: tuple
    levels: tuple
    disagreements: list = field(default_factory=list)

    def indices_tagged(self, predicate):
        return [i for i, tag in enumerate(self.tags) if predicate(tag)]

    def euclidean_indices(self):
        return self.indices_tagged(lambda t: t == "euclid" or t.endswith(":T"))

    def inner_indices(self):
        return self.indices_tagged(lambda t: t.endswith(":I"))


def _lattice(lo, hi, spacing, dim):
    steps = int(math.floor((hi - lo) / spacing + 1e-9)) + 1
    axis = lo + spacing * np.arange(steps)
    return np.array(list(itertools.product(axis, repeat=dim)), dtype=float)


def _outer_midpoints(outer):
    mids = []
    for a in range(len(outer)):
        for b in range(a + 1, len(outer)):
            if np.count_nonzero(outer[a] != outer[b]) == 1:
                mids.append((outer[a] + outer[b]) / 2.0)
    return mids


def _x_points(params):
    """T-corners of every included graph with their level and graph"""
    rows = []
    for dim, scale, level in params.graph_indices():
        g = build_gnk(dim, scale, params.vertex_budget)
        labels = g.labels()[len(g.inner):]
        for label, corner in zip(labels, g.outer):
            rows.append((label, level, corner.astype(float), f"G{dim},{scale}:T"))
    return rows


def _xprime_space(rows, name):
    """Finite subset of X' from (label, level, point, tag) rows"""
    n = len(rows)
    dist = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            dist[a, b] = dist[b, a] = xprime_distance((rows[a][1], rows[a][2]), (rows[b][1], rows[b][2]))
    dim = max((len(r[2]) for r in rows), default=1)
    coords = np.array([np.pad(r[2], (0, dim - len(r[2]))) for r in rows]).reshape(n, dim)
    return FiniteMetricSpace(labels=tuple(r[0] for r in rows), dist=dist, coords=coords, name=name)


def build_assembly(kind, params=None):
    """
    Build a finite truncation of one of the spaces

    Kinds:
        Xprime_slice: lattice samples of {n^2} x R^n for n in xprime_levels
        X_trunc: T-corners of the included graphs with the X' metric
        Y_trunc: X_trunc glued with every graph path metric
        X_N: a Euclidean sample of R^N glued with the graphs of dimension N,
             T-corners identified with their Euclidean points
    """
    params = params or AssemblyParams()
    if kind not in ASSEMBLY_KINDS:
        raise ArgumentError(f"unknown assembly kind {kind!r}")

    if kind == "Xprime_slice":
        return _build_xprime_slice(params)
    if kind == "X_trunc":
        rows = _x_points(params)
        space = _xprime_space(rows, name="X_trunc")
        return SpaceAssembly(
            kind=kind,
            params=params,
            space=space,
            tags=tuple(r[3] for r in rows),
            levels=tuple(r[1] for r in rows),
        )
    if kind == "Y_trunc":
        return _build_y(params)
    return _build_xn(params)


def _build_xprime_slice(params):
    rows = []
    for n in params.xprime_levels:
        spacing = params.sample_spacing or params.sample_radius
        for point in _lattice(-params.sample_radius, params.sample_radius, spacing, n):
            rows.append((point_label(f"X'{n * n}:", point), n * n, point, f"Xprime:{n * n}"))
    space = _xprime_space(rows, name="Xprime_slice")
    return SpaceAssembly(
        kind="Xprime_slice",
        params=params,
        space=space,
        tags=tuple(r[3] for r in rows),
        levels=tuple(r[1] for r in rows),
    )


def _build_y(params):
    x_rows = _x_points(params)
    parts = [_xprime_space(x_rows, name="X_trunc")]
    level_of = {r[0]: r[1] for r in x_rows}
    tag_of = {r[0]: r[3] for r in x_rows}
    for dim, scale, level in params.graph_indices():
        g = build_gnk(dim, scale, params.vertex_budget)
        metric = gnk_metric(g)
        parts.append(metric)
        for i, label in enumerate(metric.labels):
            level_of.setdefault(label, level)
            tag_of.setdefault(label, f"G{dim},{scale}:{'I' if g.is_inner(i) else 'T'}")

    glued = glue_maximal(parts, name="Y_trunc")
    labels = glued.space.labels
    return SpaceAssembly(
        kind="Y_trunc",
        params=params,
        space=glued.space,
        tags=tuple(tag_of[label] for label in labels),
        levels=tuple(level_of[label] for label in labels),
        disagreements=glued.disagreements,
    )


def _build_xn(params):
    dims = {dim for dim, _, _ in params.graph_indices()}
    if len(dims) != 1:
        raise ArgumentError(f"X_N needs graphs of a single dimension, got {sorted(dims)}")
    N = dims.pop()
    level = N
    euclid_prefix = f"R{N}:"

    graphs = [build_gnk(dim, scale, params.vertex_budget) for dim, scale, _ in params.graph_indices()]
    corners = [tuple(c) for g in graphs for c in g.outer.astype(float)]

    if params.sample is not None:
        sample = [tuple(float(x) for x in p) for p in params.sample]
    else:
        sample = list(corners) + [tuple([0.0] * N)]
        if params.include_midpoints:
            for g in graphs:
                sample += [tuple(m) for m in _outer_midpoints(g.outer.astype(float))]
        if params.sample_spacing:
            reach = 2 * max(g.k for g in graphs)
            sample += [tuple(p) for p in _lattice(-reach, reach, params.sample_spacing, N)]

    if any(len(p) != N for p in sample):
        raise ArgumentError(f"sample points must lie in R^{N}")
    present = set(sample)
    missing = [c for c in corners + [tuple([0.0] * N)] if c not in present]
    if missing:
        raise PreconditionError(
            f"sample misses {len(missing)} required points", missing=[list(m) for m in missing]
        )

    unique = list(dict.fromkeys(sample))
    euclid = euclidean_space(
        np.array(unique), labels=tuple(point_label(euclid_prefix, p) for p in unique), name=f"R{N}"
    )
    parts = [euclid]
    tag_of = {label: "euclid" for label in euclid.labels}
    for g in graphs:
        metric = gnk_metric(g)
        n_inner = len(g.inner)
        mapping = {
            metric.labels[n_inner + i]: point_label(euclid_prefix, c)
            for i, c in enumerate(g.outer)
        }
        relabeled = metric.relabel(mapping)
        parts.append(relabeled)
        for i, label in enumerate(relabeled.labels):
            tag_of[label] = f"G{g.n},{g.k}:{'I' if i < n_inner else 'T'}"

    glued = glue_maximal(parts, name=f"X_{N}")
    labels = glued.space.labels
    return SpaceAssembly(
        kind="X_N",
        params=params,
        space=glued.space,
        tags=tuple(tag_of[label] for label in labels),
        levels=tuple(level for _ in labels),
        disagreements=glued.disagreements,
    )
