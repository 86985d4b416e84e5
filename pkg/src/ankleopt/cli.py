"""Command-line interface.

Subcommands: ``optimize`` (task-driven geometry search into a result
bundle), ``rank`` (re-rank a bundle under chosen weights), ``validate``
(region-by-region IK solvability scan of one design), ``ik`` (closed-form
inverse kinematics at one pose), ``metrics`` (full metric evaluation of one
design).

Exit codes: 0 success, 1 domain infeasibility (no feasible design, pose
unreachable, a validation window violated), 2 input or file errors.
Progress goes to stderr; results go to files and stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    AnkleOptError,
    BadWeights,
    CorruptBundle,
    IncompatibleBundles,
    SchemaError,
    VersionMismatch,
)
from .io import (
    BundleCandidate,
    ResultBundle,
    load_baseline,
    load_bundle,
    load_catalog,
    load_design,
    load_regions,
    load_tasks,
    merge_bundles,
    save_bundle,
)
from .mechkin import FootOrientation, ik_rsu, ik_spu
from .metrics import METRIC_NAMES, MetricSummary, ankle_metrics, build_weight_map
from .optimizer import AnkleProblem, DesignSpace, OptimizerConfig, nsga2
from .ranking import MetricDirections, uniform_weights, validate_weights
from .regions import OperationalRegion
from .reparam import configuration_space_scan

DEFAULT_HALF_WIDTHS = (15.0, 42.0, 69.0, 96.0, 123.0, 150.0)


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_weights(text):
    if text is None:
        return uniform_weights()
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise BadWeights(f"weights must be numbers, got {text!r}") from None
    return validate_weights(np.asarray(values))


def _pick_actuator(catalog, name: str):
    if name not in catalog:
        raise SchemaError(name, f"actuator not in catalog; available: "
                                f"{', '.join(sorted(catalog))}")
    return catalog[name]


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def cmd_optimize(args) -> int:
    catalog = load_catalog(args.catalog)
    actuator = _pick_actuator(catalog, args.actuator)
    cfg = load_regions(args.regions)
    tasks = load_tasks(args.tasks)
    space = DesignSpace.default(args.arch, symmetric=not args.asymmetric)
    problem = AnkleProblem(space=space, tasks=tasks, actuator=actuator,
                           region=cfg.operational,
                           min_clearance=cfg.min_clearance)
    opt = OptimizerConfig(pop_size=args.pop, generations=args.generations,
                          seed=args.seed)

    def progress(gen, f1, f2, n_feasible):
        if gen % max(1, args.generations // 20) == 0 or gen == args.generations:
            _info(f"gen {gen:4d}/{args.generations}  best effort {f1:10.2f}  "
                  f"best rate {f2:10.3f}  feasible {n_feasible}/{args.pop}")

    _info(f"optimizing {args.arch} with {actuator.name} over "
          f"{len(tasks)} task(s), pop {args.pop}, {args.generations} generations")
    front = nsga2(problem, opt, progress=progress)
    _info(f"front size {len(front)}")

    wmap = build_weight_map(cfg.core, cfg.operational)
    candidates = []
    for i, (design, ev) in enumerate(zip(front.designs, front.evaluations)):
        params = problem.realized(design.genes)
        m = ankle_metrics(args.arch, params, actuator, wmap, cfg.ground_offset)
        metric_vars = {
            name: getattr(m, name).var for name in METRIC_NAMES
            if isinstance(getattr(m, name), MetricSummary)
        }
        candidates.append(BundleCandidate(
            candidate_id=f"{args.arch}-{actuator.name}-s{args.seed}-{i:03d}",
            arch=args.arch,
            actuator=actuator.name,
            metrics={name: m.value(name) for name in METRIC_NAMES},
            genes=tuple(design.genes),
            objectives=ev.objectives,
            metric_vars=metric_vars,
            singular_poses=m.singular_poses,
        ))
    for path in args.baseline or ():
        candidates.append(load_baseline(path))

    bundle = ResultBundle(
        candidates=tuple(candidates),
        directions=MetricDirections.default(),
        region={"core": cfg.core.to_dict_deg(),
                "operational": cfg.operational.to_dict_deg()},
        provenance={
            "tool_version": __version__,
            "arch": args.arch,
            "actuator": actuator.name,
            "seed": args.seed,
            "pop_size": args.pop,
            "generations": args.generations,
            "tasks": [t.task_id for t in tasks],
        },
    )
    save_bundle(bundle, args.out)
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------

def cmd_rank(args) -> int:
    bundles = [load_bundle(path) for path in args.bundle]
    bundle = bundles[0] if len(bundles) == 1 else merge_bundles(bundles)
    weights = _parse_weights(args.weights)
    ranked = bundle.rank(weights)

    if args.out:
        doc = {
            "weights": [float(w) for w in weights],
            "metric_names": list(METRIC_NAMES),
            "ranking": [
                {
                    "rank": i,
                    "id": r.candidate_id,
                    "arch": r.architecture,
                    "actuator": r.actuator,
                    "xi": r.xi,
                    "is_baseline": r.is_baseline,
                    "metrics": {n: float(v) for n, v in zip(METRIC_NAMES, r.raw)},
                    "normalized": {n: float(v) for n, v
                                   in zip(METRIC_NAMES, r.normalized)},
                }
                for i, r in enumerate(ranked)
            ],
        }
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
        _info(f"wrote {args.out}")

    top = ranked[: args.top] if args.top else ranked
    width = max(len(r.candidate_id) for r in top)
    print(f"{'rank':>4}  {'id':<{width}}  {'arch':<5} {'xi':>10}  baseline")
    for i, r in enumerate(top):
        print(f"{i:>4}  {r.candidate_id:<{width}}  {r.architecture:<5} "
              f"{r.xi:>10.6f}  {'yes' if r.is_baseline else ''}")
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    design = load_design(args.design)
    params = design.mechanism()
    if design.arch != "rsu":
        raise SchemaError(str(args.design),
                          "solvability validation applies to rsu designs")
    half_widths = sorted(float(h) for h in args.half_widths.split(","))
    all_ok = True
    for h in half_widths:
        window = OperationalRegion.symmetric_deg(h, args.step)
        scan = configuration_space_scan(params, window)
        ok, witness = scan.contained(window)
        if ok:
            print(f"region +-{h:5.1f} deg: CONTAINED "
                  f"(min margin {float(np.min(scan.margin)):.3e})")
        else:
            all_ok = False
            roll_deg, pitch_deg = (math.degrees(witness[0]),
                                   math.degrees(witness[1]))
            print(f"region +-{h:5.1f} deg: VIOLATED at "
                  f"roll={roll_deg:.1f} pitch={pitch_deg:.1f}")
        if args.csv_dir:
            out_dir = Path(args.csv_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            scan.to_csv(out_dir / f"solvability_{h:.0f}deg.csv")
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# ik / metrics
# ---------------------------------------------------------------------------

def cmd_ik(args) -> int:
    design = load_design(args.design)
    params = design.mechanism()
    pose = FootOrientation.from_degrees(args.roll, args.pitch)
    if design.arch == "spu":
        sol = ik_spu(params, pose)
        doc = {"arch": "spu", "roll_deg": args.roll, "pitch_deg": args.pitch,
               "zeta_mm": [float(q) for q in sol.q]}
    else:
        sol = ik_rsu(params, pose, branch=args.branch)
        doc = {"arch": "rsu", "roll_deg": args.roll, "pitch_deg": args.pitch,
               "branch": args.branch,
               "alpha_deg": [math.degrees(q) for q in sol.q]}
    print(json.dumps(doc, indent=2))
    return 0


def cmd_metrics(args) -> int:
    design = load_design(args.design)
    params = design.mechanism()
    catalog = load_catalog(args.catalog)
    actuator = _pick_actuator(catalog, args.actuator)
    cfg = load_regions(args.regions)
    wmap = build_weight_map(cfg.core, cfg.operational)
    m = ankle_metrics(design.arch, params, actuator, wmap, cfg.ground_offset)
    doc = {
        "design": design.design_id,
        "arch": design.arch,
        "actuator": actuator.name,
        "metrics": {name: m.value(name) for name in METRIC_NAMES},
        "metric_vars": {name: getattr(m, name).var for name in METRIC_NAMES
                        if isinstance(getattr(m, name), MetricSummary)},
        "singular_poses": m.singular_poses,
    }
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        _info(f"wrote {args.out}")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ankleopt",
        description="Design-optimization toolkit for two-DoF parallel "
                    "ankle mechanisms.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="search geometries against tasks")
    p.add_argument("--arch", choices=("spu", "rsu"), required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--actuator", required=True)
    p.add_argument("--regions", required=True)
    p.add_argument("--tasks", required=True,
                   help="task CSV file or a directory of them")
    p.add_argument("--out", required=True)
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", action="append",
                   help="baseline candidate JSON, repeatable")
    p.add_argument("--asymmetric", action="store_true",
                   help="search both legs independently")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("rank", help="rank result bundles under weights")
    p.add_argument("--bundle", required=True, action="append",
                   help="result bundle JSON; repeat to merge pools")
    p.add_argument("--weights",
                   help="7 comma-separated non-negative weights summing to 1 "
                        "(default: uniform)")
    p.add_argument("--out", help="write the full ranking as JSON")
    p.add_argument("--top", type=int, default=10,
                   help="rows to print (0 = all)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("validate",
                       help="scan IK solvability over nested square regions")
    p.add_argument("--design", required=True)
    p.add_argument("--half-widths", default=",".join(
        f"{h:g}" for h in DEFAULT_HALF_WIDTHS))
    p.add_argument("--step", type=float, default=2.0,
                   help="grid step in degrees")
    p.add_argument("--csv-dir", help="dump per-region solvability CSVs here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ik", help="closed-form inverse kinematics at a pose")
    p.add_argument("--design", required=True)
    p.add_argument("--roll", type=float, required=True, help="degrees")
    p.add_argument("--pitch", type=float, required=True, help="degrees")
    p.add_argument("--branch", choices=("primary", "secondary"),
                   default="primary")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("metrics", help="evaluate all metrics for one design")
    p.add_argument("--design", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--actuator", required=True)
    p.add_argument("--regions", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, VersionMismatch, CorruptBundle, IncompatibleBundles,
            BadWeights) as e:
        _info(f"error: {e}")
        return 2
    except FileNotFoundError as e:
        _info(f"error: {e}")
        return 2
    except AnkleOptError as e:
        _info(f"infeasible: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
