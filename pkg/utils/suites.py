"""
Verification suites
Each suite expands the config grids into independent cells; cells run on a
thread pool and their records are merged in sorted order.
"""

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable

import numpy as np

from utils import oracles, sampling
from utils.euclid_convex import (
    FIXED_PROBE_PAIR,
    Polytope,
    ProbeFamily,
    min_norm_certificate,
    nearest_point,
    pi_lemma_probe,
)
from utils.measure_hyperspace import ConvexMeasureSet, ccp_pushforward, dirac_set, hausdorff_ccp
from utils.metric_core import (
    FiniteMetricSpace,
    chain_components,
    euclidean_space,
    lipschitz_constant,
    verify_metric,
)
from utils.obstruction import (
    RetractionInstance,
    composed_retraction,
    dirac_extension,
    instance_from_assembly,
    multistart,
    nested_anchor_chain,
    retraction_lower_bound,
)
from utils.paper_spaces import (
    AssemblyParams,
    build_assembly,
    build_gnk,
    chain_bound_closed_form,
    gnk_metric,
    projection_map,
)
from utils.report import CheckRecord, SuiteReport, check, measured
from utils.transport import dirac, kantorovich, pushforward

logger = logging.getLogger(__name__)

# keeps the random streams of different suites apart
STREAMS = {"metrics": 0, "transport": 1, "hyperspace": 2, "euclid": 3, "chains": 4, "obstruction": 5}

# largest graph dimension the obstruction solver is run on
OBSTRUCTION_MAX_DIM = 4


@dataclass(frozen=True)
class Cell:
    suite: str
    name: str
    inputs: dict
    run: Callable


def _rng(config, suite, *index):
    return np.random.default_rng([config.seed, STREAMS[suite], *index])


def _violations(report):
    return [list(v) for v in report.violations[:5]]


# metrics

def _gnk_cell(config, n, k):
    def run():
        space = gnk_metric(build_gnk(n, k))
        report = verify_metric(space, config.tol("metric"))
        return [check("metrics", "gnk_axioms", {"n": n, "k": k}, len(report.violations), 0,
                      config.tol("metric"), report.passed, _violations(report))]
    return Cell("metrics", "gnk_axioms", {"n": n, "k": k}, run)


def _ground_truth_cell(config):
    expected = [((1, 1), (-1, -1), 4.0), ((2, 2), (2, -2), 4.0), ((2, 2), (-2, -2), 6.0)]

    def run():
        g = build_gnk(2, 1)
        space = gnk_metric(g)
        rows = [tuple(v) for v in g.vertices.tolist()]
        records = []
        for a, b, value in expected:
            got = float(space.dist[rows.index(a), rows.index(b)])
            records.append(check("metrics", "gnk_ground_truth", {"from": a, "to": b}, got, value,
                                 0.0, got == value, {"expected": value, "got": got}))
        return records
    return Cell("metrics", "gnk_ground_truth", {}, run)


def _assembly_cell(config, kind, params, inputs):
    def run():
        assembly = build_assembly(kind, params)
        report = verify_metric(assembly.space, config.tol("metric"))
        records = [check("metrics", "assembly_axioms", inputs, len(report.violations), 0,
                         config.tol("metric"), report.passed, _violations(report))]
        records.append(measured("metrics", "assembly_disagreements", inputs, len(assembly.disagreements)))
        if kind == "Xprime_slice":
            dim = min(params.xprime_levels)
            lip = lipschitz_constant(projection_map(assembly.space, dim))
            records.append(check("metrics", "projection_short", inputs, lip.lambda_star, 1.0,
                                 config.tol("shortness"), lip.lambda_star <= 1.0 + config.tol("shortness"),
                                 lip.witness_pair))
        return records
    return Cell("metrics", "assembly_axioms", inputs, run)


def metrics_cells(config):
    cells = [_gnk_cell(config, n, k) for n, k in itertools.product(config.n, config.k)]
    cells.append(_ground_truth_cell(config))
    levels = tuple(config.n)
    cells.append(_assembly_cell(
        config, "Xprime_slice", AssemblyParams(xprime_levels=levels), {"kind": "Xprime_slice", "levels": levels}))
    for kind in ("X_trunc", "Y_trunc"):
        params = AssemblyParams(n_values=tuple(config.n), k_values=tuple(config.k), preset=config.preset)
        if params.graph_indices():
            cells.append(_assembly_cell(config, kind, params, {"kind": kind, "preset": config.preset}))
    for n, k in itertools.product(config.n, config.k):
        params = AssemblyParams(n_values=(n,), k_values=(k,), preset=config.preset)
        dims = [dim for dim, _, _ in params.graph_indices()]
        if dims and max(dims) <= OBSTRUCTION_MAX_DIM:
            cells.append(_assembly_cell(
                config, "X_N", params, {"kind": "X_N", "n": n, "k": k, "preset": config.preset}))
    return cells


# transport

def _transport_cell(config, i):
    def run():
        rng = _rng(config, "transport", i)
        size = 2 + i % 3 if i % 4 == 0 else int(rng.integers(5, 31))
        space = sampling.random_space(rng, size)
        mu = sampling.random_measure(rng, space, int(rng.integers(1, size + 1)))
        nu = sampling.random_measure(rng, space, int(rng.integers(1, size + 1)))
        result = kantorovich(mu, nu)
        inputs = {"instance": i, "size": size}
        tol = config.tol("duality")
        records = [check("transport", "duality_gap", inputs, result.gap, 0.0, tol, result.gap <= tol,
                         {"primal": result.plan.cost, "dual": result.potential.value})]
        if size <= 4:
            exact = oracles.transport_by_bases(space.dist, mu.weights, nu.weights)
            err = abs(exact - result.value)
            records.append(check("transport", "basis_oracle", inputs, result.value, exact, tol, err <= tol,
                                 {"solver": result.value, "oracle": exact}))
        return records
    return Cell("transport", "duality_gap", {"instance": i}, run)


def _dirac_transport_cell(config):
    def run():
        rng = _rng(config, "transport", 10 ** 6)
        space = sampling.random_space(rng, 20)
        worst, pair = 0.0, None
        for x, y in itertools.combinations(range(space.size), 2):
            err = abs(kantorovich(dirac(space, x), dirac(space, y)).value - space.dist[x, y])
            if err > worst:
                worst, pair = err, (x, y)
        tol = config.tol("metric")
        return [check("transport", "dirac_isometry", {"points": 20}, worst, 0.0, tol, worst <= tol, pair)]
    return Cell("transport", "dirac_isometry", {"points": 20}, run)


def _short_map_cell(config, i):
    def run():
        rng = _rng(config, "transport", 2 * 10 ** 6 + i)
        space = sampling.grid_space(rng, int(rng.integers(4, 13)))
        f = sampling.random_short_map(rng, space)
        mu = sampling.random_measure(rng, space, 3)
        nu = sampling.random_measure(rng, space, 3)
        before = kantorovich(mu, nu).value
        after = kantorovich(pushforward(f, mu), pushforward(f, nu)).value
        tol = config.tol("shortness")
        inputs = {"instance": i, "size": space.size}
        records = [check("transport", "pushforward_short", inputs, after, before, tol, after <= before + tol,
                         {"before": before, "after": after})]
        gap = float(np.linalg.norm(mu.weights @ space.coords - nu.weights @ space.coords))
        records.append(check("transport", "barycenter_short", inputs, gap, before, tol, gap <= before + tol,
                             {"barycenter_gap": gap, "kantorovich": before}))
        return records
    return Cell("transport", "pushforward_short", {"instance": i}, run)


def transport_cells(config):
    counts = config.counts
    cells = [_transport_cell(config, i) for i in range(counts["transport_instances"])]
    cells.append(_dirac_transport_cell(config))
    cells += [_short_map_cell(config, i) for i in range(counts["short_maps"])]
    return cells


# hyperspace

def _two_point_cell(config, i):
    def run():
        rng = _rng(config, "hyperspace", i)
        d = float(rng.uniform(0.5, 3.0))
        space = euclidean_space([[0.0], [d]], labels=("a", "b"), name="two-point")
        a_rows = rng.dirichlet(np.ones(2), size=int(rng.integers(1, 4)))
        b_rows = rng.dirichlet(np.ones(2), size=int(rng.integers(1, 4)))
        A = ConvexMeasureSet.from_weights(space, a_rows)
        B = ConvexMeasureSet.from_weights(space, b_rows)
        value = hausdorff_ccp(A, B)
        grid = oracles.two_point_hausdorff(d, a_rows, b_rows, step=1e-3)
        tol = config.tol("oracle")
        inputs = {"instance": i, "generators": [len(A), len(B)]}
        return [check("hyperspace", "two_point_oracle", inputs, value, grid, tol, abs(value - grid) <= tol,
                      {"solver": value, "oracle": grid, "A": a_rows, "B": b_rows})]
    return Cell("hyperspace", "two_point_oracle", {"instance": i}, run)


def _dirac_hyperspace_cell(config):
    def run():
        rng = _rng(config, "hyperspace", 10 ** 6)
        space = sampling.random_space(rng, 20)
        worst, pair = 0.0, None
        for x, y in itertools.combinations(range(space.size), 2):
            err = abs(hausdorff_ccp(dirac_set(space, x), dirac_set(space, y)) - space.dist[x, y])
            if err > worst:
                worst, pair = err, (x, y)
        tol = config.tol("metric")
        return [check("hyperspace", "dirac_isometry", {"points": 20}, worst, 0.0, tol, worst <= tol, pair)]
    return Cell("hyperspace", "dirac_isometry", {"points": 20}, run)


def _ccp_short_cell(config, i):
    def run():
        rng = _rng(config, "hyperspace", 2 * 10 ** 6 + i)
        space = sampling.grid_space(rng, int(rng.integers(4, 9)))
        f = sampling.random_short_map(rng, space)
        A = ConvexMeasureSet(space, sampling.random_generators(rng, space, int(rng.integers(1, 4)), 3))
        B = ConvexMeasureSet(space, sampling.random_generators(rng, space, int(rng.integers(1, 4)), 3))
        before = hausdorff_ccp(A, B)
        after = hausdorff_ccp(ccp_pushforward(f, A), ccp_pushforward(f, B))
        tol = config.tol("shortness")
        return [check("hyperspace", "ccp_pushforward_short", {"instance": i}, after, before, tol,
                      after <= before + tol, {"before": before, "after": after})]
    return Cell("hyperspace", "ccp_pushforward_short", {"instance": i}, run)


def hyperspace_cells(config):
    cells = [_two_point_cell(config, i) for i in range(config.counts["hyperspace_instances"])]
    cells.append(_dirac_hyperspace_cell(config))
    cells += [_ccp_short_cell(config, i) for i in range(config.counts["short_maps"])]
    return cells


# euclid

def _polytope_cell(config, dim):
    def run():
        total = config.counts["polytopes"]
        worst, witness, segments, segment_err = np.inf, None, 0, 0.0
        for i in range(dim - 1, total, 6):
            rng = _rng(config, "euclid", i)
            vertices = rng.uniform(-2.0, 2.0, size=(int(rng.integers(1, 13)), dim))
            y = nearest_point(vertices)
            cert = min_norm_certificate(y, vertices)
            if cert < worst:
                worst, witness = cert, {"trial": i, "vertices": vertices}
            if len(vertices) == 2:
                segments += 1
                grid = oracles.segment_min_norm(vertices[0], vertices[1], step=1e-5)
                segment_err = max(segment_err, abs(np.linalg.norm(grid) - np.linalg.norm(y)))
        tol = config.tol("metric")
        inputs = {"dim": dim}
        records = [check("euclid", "min_norm_certificate", inputs, worst, -tol, tol, worst >= -tol, witness)]
        if segments:
            records.append(check("euclid", "segment_oracle", {"dim": dim, "segments": segments},
                                 segment_err, 0.0, 1e-4, segment_err <= 1e-4))
        return records
    return Cell("euclid", "min_norm_certificate", {"dim": dim}, run)


def _probe_cell(config):
    def run():
        tol = config.tol("probe")
        trials = config.counts["probe_trials"]
        report = pi_lemma_probe(trials, config.seed, ProbeFamily("random"), workers=config.workers)
        fixed = tuple(Polytope.of(v) for v in FIXED_PROBE_PAIR)
        thin = pi_lemma_probe(trials, config.seed, ProbeFamily("thin_segments"))
        singles = pi_lemma_probe(trials, config.seed, ProbeFamily("translated_singletons"))
        witness = [p.to_dict() for p in report.witness]
        return [
            check("euclid", "probe_fixed_pair", {}, report.fixed_ratio, 5.0, tol,
                  report.fixed_ratio >= 5.0, [p.to_dict() for p in fixed]),
            measured("euclid", "probe_random", {"trials": trials, "family": "random"},
                     report.max_ratio, 1.0, tol, witness),
            measured("euclid", "probe_thin_segments", {"trials": trials, "family": "thin_segments"},
                     thin.family_max_ratio, 1.0, tol),
            measured("euclid", "shortness_violated", {"trials": trials}, report.shortness_violated),
            check("euclid", "probe_singletons", {"trials": trials, "family": "translated_singletons"},
                  singles.family_max_ratio, 1.0, tol, singles.family_max_ratio <= 1.0 + tol,
                  [p.to_dict() for p in singles.witness]),
        ]
    return Cell("euclid", "probe", {}, run)


def euclid_cells(config):
    return [_polytope_cell(config, dim) for dim in range(1, 7)] + [_probe_cell(config)]


# chains

def _chain_space(config):
    n_values = tuple(n for n in config.n if n <= 3) or tuple(config.n[:1])
    params = AssemblyParams(n_values=n_values, k_values=tuple(config.k), preset=config.preset)
    return build_assembly("Y_trunc", params), n_values


def _chain_cell(config, C):
    def run():
        assembly, n_values = _chain_space(config)
        report = chain_components(assembly.space, C)
        inputs = {"C": C, "n": n_values, "k": tuple(config.k), "preset": config.preset}
        bfs = oracles.chain_components_bfs(assembly.space.dist, C)
        bound = math.sqrt(10.0) * C
        return [
            measured("chains", "chain_diameter", inputs, report.max_diameter, bound,
                     witness={"components": len(report.components), "separation": report.separation,
                              "within_bound": bool(report.max_diameter <= bound),
                              "closed_form": chain_bound_closed_form(C)}),
            check("chains", "chain_bfs_oracle", inputs, len(report.components), len(bfs), 0.0,
                  report.components == bfs),
        ]
    return Cell("chains", "chain_diameter", {"C": C}, run)


def _chain_monotone_cell(config):
    def run():
        assembly, n_values = _chain_space(config)
        scales = sorted(config.C)
        reports = [chain_components(assembly.space, C) for C in scales]
        broken = None
        for fine, coarse in zip(reports, reports[1:]):
            owner = {}
            for idx, comp in enumerate(coarse.components):
                for p in comp:
                    owner[p] = idx
            for comp in fine.components:
                if len({owner[p] for p in comp}) != 1:
                    broken = {"C": fine.C, "next": coarse.C, "component": comp}
                    break
            if broken:
                break
        inputs = {"C": scales, "n": n_values, "k": tuple(config.k), "preset": config.preset}
        return [check("chains", "chain_monotone", inputs, broken is None, True, None, broken is None, broken)]
    return Cell("chains", "chain_monotone", {}, run)


def chains_cells(config):
    return [_chain_cell(config, C) for C in config.C] + [_chain_monotone_cell(config)]


# obstruction

def two_anchor_instance():
    """s1 = (0,0), s2 = (4,0) at glued distance 2 through a free point v at distance 1 from both"""
    dist = np.array([[0.0, 2.0, 1.0], [2.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    space = FiniteMetricSpace(labels=("s1", "s2", "v"), dist=dist, name="two-anchor")
    return RetractionInstance(
        space=space, anchors=(0, 1), free=(2,), anchor_coords=np.array([[0.0, 0.0], [4.0, 0.0]])
    )


def _two_anchor_cell(config):
    def run():
        inst = two_anchor_instance()
        result = retraction_lower_bound(inst)
        tol = config.tol("solver_gap")
        placement = result.placement[0]
        place_err = float(np.linalg.norm(placement - np.array([2.0, 0.0])))
        return [
            check("obstruction", "two_anchor_lambda", {"instance": "two-anchor"}, result.lambda_min, 2.0, tol,
                  abs(result.lambda_min - 2.0) <= tol, result.to_dict()),
            check("obstruction", "two_anchor_placement", {"instance": "two-anchor"}, placement, [2.0, 0.0], tol,
                  place_err <= tol, result.to_dict()),
        ]
    return Cell("obstruction", "two_anchor", {}, run)


def _xn_params(config, n, k, **extra):
    params = AssemblyParams(n_values=(n,), k_values=(k,), preset=config.preset, **extra)
    dims = [dim for dim, _, _ in params.graph_indices()]
    if not dims or max(dims) > OBSTRUCTION_MAX_DIM:
        return None
    return params


def _trend_cell(config, n, k):
    def run():
        inputs = {"n": n, "k": k, "preset": config.preset}
        params = _xn_params(config, n, k)
        if params is None:
            return [CheckRecord("obstruction", "lambda_min", inputs, None, status="measured",
                                detail="skipped: no graph of dimension at most 4 for this index")]
        assembly = build_assembly("X_N", params)
        inst = instance_from_assembly(assembly, 0.0)
        results = multistart(inst)
        values = [r.lambda_min for r in results]
        spread = max(values) - min(values)
        tol = config.tol("multistart")
        best = min(results, key=lambda r: r.lambda_min)
        records = [
            measured("obstruction", "lambda_min", inputs, best.lambda_min, math.sqrt(n),
                     config.tol("solver_gap"),
                     {"certificate": best.certificate, "iterations": best.iterations,
                      "converged": best.converged, "init": best.init}),
            check("obstruction", "multistart_agreement", inputs, spread, 0.0, tol, spread <= tol,
                  {r.init: r.lambda_min for r in results}),
        ]
        table = composed_retraction(dirac_extension(assembly), assembly.space.coords.shape[1], assembly)
        anchors = list(inst.anchors)
        drift = float(np.abs(table.table[anchors] - inst.anchor_coords).max())
        records.append(check("obstruction", "dirac_retraction_fixes_anchors", inputs, drift, 0.0,
                             config.tol("metric"), drift <= config.tol("metric")))
        records.append(measured("obstruction", "dirac_retraction_lambda", inputs, table.report.lambda_star,
                                best.lambda_min, witness=table.report.witness_pair))
        return records
    return Cell("obstruction", "lambda_min", {"n": n, "k": k}, run)


def _epsilon_cell(config, n, k):
    def run():
        params = _xn_params(config, n, k)
        inputs = {"n": n, "k": k, "eps": sorted(config.eps), "preset": config.preset}
        if params is None:
            return []
        inst = instance_from_assembly(build_assembly("X_N", params))
        values = [retraction_lower_bound(inst.with_epsilon(e)).lambda_min for e in sorted(config.eps)]
        tol = config.tol("solver_gap")
        ok = all(b <= a + tol for a, b in zip(values, values[1:]))
        return [check("obstruction", "epsilon_monotone", inputs, values, None, tol, ok, values)]
    return Cell("obstruction", "epsilon_monotone", {"n": n, "k": k}, run)


def _nested_cell(config, n, k):
    def run():
        inputs = {"n": n, "k": k}
        if config.preset != "general" or n > OBSTRUCTION_MAX_DIM:
            return []
        chain = nested_anchor_chain(n, k)
        values = [r.lambda_min for _, _, r in chain]
        tol = config.tol("multistart")
        ok = all(b >= a - tol for a, b in zip(values, values[1:]))
        witness = [{"stage": name, "anchors": count, "lambda_min": r.lambda_min} for name, count, r in chain]
        return [check("obstruction", "anchor_monotone", inputs, values, None, tol, ok, witness)]
    return Cell("obstruction", "anchor_monotone", {"n": n, "k": k}, run)


def obstruction_cells(config):
    cells = [_two_anchor_cell(config)]
    cells += [_trend_cell(config, n, k) for n, k in itertools.product(config.n, config.k)]
    n0, k0 = min(config.n), min(config.k)
    cells.append(_epsilon_cell(config, n0, k0))
    cells.append(_nested_cell(config, n0, k0))
    return cells


BUILDERS = {
    "metrics": metrics_cells,
    "transport": transport_cells,
    "hyperspace": hyperspace_cells,
    "euclid": euclid_cells,
    "chains": chains_cells,
    "obstruction": obstruction_cells,
}


def _run_cell(cell):
    try:
        return cell.run()
    except Exception as e:
        logger.warning("cell %s/%s failed: %s", cell.suite, cell.name, e)
        return [CheckRecord(cell.suite, cell.name, cell.inputs, None, status="error", detail=str(e))]


def build_cells(config):
    cells = []
    for suite in config.suites():
        cells += BUILDERS[suite](config)
    return cells


def run_suite(config, progress=None):
    """
    Run the selected suites and merge their records

    Args:
        config: validated ExperimentConfig
        progress: optional callback(done, total, counts) after every cell

    Returns:
        SuiteReport with records sorted by (suite, name, input digest)
    """
    start = time.time()
    cells = build_cells(config)
    report = SuiteReport(config=config.to_dict())
    logger.info("running %d cells over suites %s", len(cells), ", ".join(config.suites()))

    def collect(records, done):
        report.records.extend(records)
        if progress:
            progress(done, len(cells), report.counts())

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            futures = [executor.submit(_run_cell, cell) for cell in cells]
            for done, future in enumerate(as_completed(futures), start=1):
                collect(future.result(), done)
    else:
        for done, cell in enumerate(cells, start=1):
            collect(_run_cell(cell), done)

    report.records = report.sorted_records()
    report.runtime = time.time() - start
    return report
