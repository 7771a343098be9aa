"""
Batch driver for the coarse extension lab
Builds instances, runs solvers and verification suites, and writes JSON/CSV reports

Usage:
  python lab_cli.py gnk --n 2 --k 1
  python lab_cli.py space --kind X_N --n 2 --k 1
  python lab_cli.py ot --input measures.json
  python lab_cli.py hyper --input sets.json
  python lab_cli.py pi-probe --trials 200 --family thin_segments
  python lab_cli.py asdim --n 2,3 --k 1..4 --C 1..50
  python lab_cli.py lip --input map.json --eps 1
  python lab_cli.py obstruct --n 2 --k-range 1..4 --eps 0 --out obstruct.json
  python lab_cli.py suite --config lab.json --seed 7 --tol oracle=1e-3 --out report.json --csv

Exit code: 0 when every check passes or is measured, 1 on any failure, 2 on usage errors
"""

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from threading import Lock

import numpy as np

from utils.config import config_from_dict, load_config, parse_range, validate, with_overrides
from utils.data_loader import assembly_to_dict, dumps, read_json, space_from_dict, space_to_dict
from utils.errors import LabError, UsageError
from utils.euclid_convex import ProbeFamily, pi_lemma_probe
from utils.measure_hyperspace import ConvexMeasureSet, directed_hausdorff
from utils.metric_core import PointMap, additive_constant, chain_components, lipschitz_constant, verify_metric
from utils.obstruction import instance_from_assembly, retraction_lower_bound
from utils.paper_spaces import ASSEMBLY_KINDS, PRESETS, AssemblyParams, build_assembly, build_gnk, gnk_metric
from utils.suites import run_suite
from utils.transport import DiscreteMeasure, kantorovich

logger = logging.getLogger("lab_cli")

progress_lock = Lock()


def emit(payload, args):
    """Write a JSON payload to --out or stdout"""
    text = dumps(payload)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(f"Report written to {args.out}")
    else:
        sys.stdout.write(text)


def resolve_config(args):
    if args.config:
        config = load_config(args.config)
    else:
        config = config_from_dict({})
    return with_overrides(config, seed=args.seed, tolerances=args.tol or (), output=args.out)


def cmd_gnk(args):
    g = build_gnk(args.n, args.k)
    space = gnk_metric(g, workers=args.workers)
    report = verify_metric(space, resolve_config(args).tol("metric"))
    emit({"space": space_to_dict(space), "edges": [list(e) for e in g.edges], "axioms": report}, args)
    return 0 if report.passed else 1


def cmd_space(args):
    params = AssemblyParams(
        n_values=parse_range(args.n),
        k_values=parse_range(args.k),
        preset=args.preset,
        include_midpoints=not args.no_midpoints,
        sample_spacing=args.spacing,
        xprime_levels=parse_range(args.n),
    )
    assembly = build_assembly(args.kind, params)
    report = verify_metric(assembly.space, resolve_config(args).tol("metric"))
    emit({"assembly": assembly_to_dict(assembly), "axioms": report}, args)
    return 0 if report.passed else 1


def _load_input(args):
    if not args.input:
        raise UsageError("input", "an --input JSON file is required")
    return read_json(args.input)


def cmd_ot(args):
    data = _load_input(args)
    space = space_from_dict(data["space"])
    result = kantorovich(DiscreteMeasure(space, data["mu"]), DiscreteMeasure(space, data["nu"]))
    tol = resolve_config(args).tol("duality")
    emit({"result": result, "gap": result.gap, "tolerance": tol}, args)
    return 0 if result.gap <= tol else 1


def cmd_hyper(args):
    data = _load_input(args)
    space = space_from_dict(data["space"])
    A = ConvexMeasureSet.from_weights(space, data["A"])
    B = ConvexMeasureSet.from_weights(space, data["B"])
    forward, fw = directed_hausdorff(A, B)
    backward, bw = directed_hausdorff(B, A)
    emit({
        "hausdorff": max(forward, backward),
        "directed": {"A_to_B": forward, "B_to_A": backward},
        "witness": {"A_generator": fw, "B_generator": bw},
    }, args)
    return 0


def cmd_pi_probe(args):
    config = resolve_config(args)
    family = ProbeFamily(args.family, dim=args.dim)
    report = pi_lemma_probe(args.trials, config.seed, family, workers=args.workers)
    emit({"probe": report, "tolerance": config.tol("probe")}, args)
    return 0


def cmd_asdim(args):
    params = AssemblyParams(n_values=parse_range(args.n), k_values=parse_range(args.k), preset=args.preset)
    assembly = build_assembly("Y_trunc", params)
    rows = []
    for C in parse_range(args.C):
        report = chain_components(assembly.space, C)
        rows.append({"C": C, "components": len(report.components), "max_diameter": report.max_diameter,
                     "separation": report.separation, "bound": float(np.sqrt(10.0) * C)})
    emit({"space": assembly.space.size, "chains": rows}, args)
    return 0


def cmd_lip(args):
    data = _load_input(args)
    f = PointMap(
        source=space_from_dict(data["source"]),
        target=space_from_dict(data["target"]),
        assignment=data["assignment"],
    )
    payload = {"lipschitz": lipschitz_constant(f, args.eps)}
    if args.lam is not None:
        report = additive_constant(f, args.lam)
        payload["additive"] = {"lam": report.lam, "epsilon_star": report.epsilon_star,
                               "witness_pair": report.witness_pair}
    emit(payload, args)
    return 0


def cmd_obstruct(args):
    config = resolve_config(args)
    rows = []
    for k in parse_range(args.k_range):
        params = AssemblyParams(n_values=(args.n,), k_values=(k,), preset=args.preset)
        if not params.graph_indices():
            continue
        assembly = build_assembly("X_N", params)
        inst = instance_from_assembly(assembly, args.eps)
        result = retraction_lower_bound(inst)
        labels = [assembly.space.labels[i] for i in inst.free]
        rows.append({
            "n": args.n,
            "k": k,
            "eps": args.eps,
            "points": assembly.space.size,
            "result": result,
            "placement": dict(zip(labels, result.placement.tolist())),
        })
        print(f"n={args.n} k={k}: lambda_min={result.lambda_min:.6f} "
              f"({'converged' if result.converged else 'unconverged'}, {result.iterations} iterations)",
              file=sys.stderr)
    emit({"table": rows, "tolerance": config.tol("solver_gap")}, args)
    return 0 if all(r["result"].converged for r in rows) else 1


def print_progress(done, total, counts, start):
    """Single-line progress bar"""
    with progress_lock:
        elapsed = time.time() - start
        rate = done / elapsed if elapsed > 0 else 0.0
        percentage = done / total * 100 if total else 100.0
        bar_length = 40
        filled = int(bar_length * done / total) if total else bar_length
        bar = "█" * filled + "░" * (bar_length - filled)
        sys.stdout.write("\r" + " " * 120)
        sys.stdout.write(f"\r[{bar}] {percentage:.1f}% | {done}/{total} | "
                         f"✓ {counts['pass']} ✗ {counts['fail']} ~ {counts['measured']} ! {counts['error']} | "
                         f"{rate:.1f} cells/s")
        sys.stdout.flush()


def cmd_suite(args):
    config = resolve_config(args)
    if args.suite:
        config = validate(replace(config, suite=args.suite))
    if args.workers:
        config = replace(config, workers=args.workers)

    start = time.time()
    progress = (lambda done, total, counts: print_progress(done, total, counts, start)) if args.out else None
    report = run_suite(config, progress=progress)

    if args.out:
        path, meta = report.write(args.out)
        counts = report.counts()
        print("\n\nSuite complete!")
        print(f"✓ Passed: {counts['pass']}")
        print(f"✗ Failed: {counts['fail']}")
        print(f"~ Measured: {counts['measured']}")
        print(f"! Errors: {counts['error']}")
        print(f"Report: {path} (runtime in {meta})")
        print(f"Time taken: {report.runtime:.1f} seconds")
        if args.csv:
            csv_path = report.to_csv(Path(args.out).with_suffix(".csv"))
            print(f"CSV: {csv_path}")
    else:
        sys.stdout.write(report.to_json())
    return report.exit_code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--csv", action="store_true", help="also write the flattened CSV")
    common.add_argument("--workers", type=int, default=None, help="thread count")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(description="Coarse extension lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gnk", parents=[common], help="build G_{n,k} and its path metric")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_gnk)

    p = sub.add_parser("space", parents=[common], help="build a finite truncation")
    p.add_argument("--kind", choices=ASSEMBLY_KINDS, required=True)
    p.add_argument("--n", default="2", help="dimension grid, e.g. 2,3 or 2..4")
    p.add_argument("--k", default="1", help="scale grid")
    p.add_argument("--preset", choices=PRESETS, default="general")
    p.add_argument("--spacing", type=float, default=None, help="extra X_N lattice spacing")
    p.add_argument("--no-midpoints", action="store_true")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("ot", parents=[common], help="Kantorovich distance of two measures")
    p.add_argument("--input", help="JSON with space, mu and nu")
    p.set_defaults(func=cmd_ot)

    p = sub.add_parser("hyper", parents=[common], help="Hausdorff distance of two convex measure sets")
    p.add_argument("--input", help="JSON with space, A and B generator weights")
    p.set_defaults(func=cmd_hyper)

    p = sub.add_parser("pi-probe", parents=[common], help="probe the min-norm point map")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--family", default="random",
                   choices=("random", "identical", "translated_singletons", "thin_segments"))
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(func=cmd_pi_probe)

    p = sub.add_parser("asdim", parents=[common], help="C-chain components of Y truncations")
    p.add_argument("--n", default="2,3")
    p.add_argument("--k", default="1..4")
    p.add_argument("--C", default="1..50")
    p.add_argument("--preset", choices=PRESETS, default="general")
    p.set_defaults(func=cmd_asdim)

    p = sub.add_parser("lip", parents=[common], help="Lipschitz constants of a point map")
    p.add_argument("--input", help="JSON with source, target and assignment")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=None, help="also report the least epsilon for this lambda")
    p.set_defaults(func=cmd_lip)

    p = sub.add_parser("obstruct", parents=[common], help="retraction lower bounds on X_N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-range", default="1..4")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--preset", choices=PRESETS, default="general")
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("suite", parents=[common], help="run verification suites")
    p.add_argument("--suite", default=None)
    p.set_defaults(func=cmd_suite)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.workers is None:
        args.workers = 1 if args.command != "suite" else None
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except LabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as e:
        print(f"usage error: malformed input: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
