"""Command-line entry point: ``paretomtl run|compare|ablate-init|check``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import artifacts
from .config import OUTPUT_DIR_ENV, ConfigError, load_config
from .decomposition import even_preference_vectors, load_preference_vectors
from .experiment import ablate_init, compare_fronts, run_experiment, write_artifacts

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2

log = logging.getLogger("paretomtl")


def _print_summary(summary: dict) -> None:
    for algo, stats in summary["algorithms"].items():
        hv = stats["hypervolume"]
        sp = stats["spacing"]
        cov = stats["sector_coverage"]
        print(
            f"{algo:<11} n={stats['n_points']:<4} "
            f"hv={'-' if hv is None else f'{hv:.4f}'} "
            f"spacing={'-' if sp is None else f'{sp:.4f}'} "
            f"coverage={'-' if cov is None else f'{cov:.2f}'} "
            f"status={stats['status_counts']}"
        )
    if summary["failures"]:
        print(f"{len(summary['failures'])} run(s) failed numerically; see summary.json")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    result = run_experiment(cfg, args.workers)
    outdir = write_artifacts(result, Path(args.output) if args.output else cfg.output_path())
    _print_summary(result.summary)
    print(f"artifacts written to {outdir}")
    return EXIT_OK


def cmd_ablate_init(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.output) if args.output else cfg.output_path()
    report = ablate_init(cfg, outdir, args.workers)
    for label in ("with_init", "without_init"):
        cov = ", ".join("-" if c is None else f"{c:.2f}" for c in report["coverage"][label])
        print(f"{label:<13} mean coverage {report['mean_coverage'][label]:.3f}  [{cov}]")
    print(f"artifacts written to {outdir}")
    return EXIT_OK


def cmd_compare(args) -> int:
    prefs = None
    if args.prefs_file:
        prefs = load_preference_vectors(args.prefs_file)
    elif args.prefs:
        # objective count is only known after reading; peek at the first non-empty file
        m = next((m for p in args.fronts for rows, m in [artifacts.read_front(p)] if rows), 2)
        prefs = even_preference_vectors(args.prefs, m, seed=args.prefs_seed)
    report = compare_fronts(args.fronts, prefs, args.ref)
    for w in report["warnings"]:
        log.warning(w)
    print(f"{'source':<40} {'algorithm':<11} {'n':>4} {'hv':>9} {'spacing':>9} {'coverage':>9} {'pooled-nd':>9}")
    for row in report["sources"]:
        def f(v, spec=".4f"):
            return "null" if v is None else format(v, spec)
        print(f"{row['source'][-40:]:<40} {str(row['algorithm']):<11} {row['n_points']:>4} "
              f"{f(row['hypervolume']):>9} {f(row['spacing']):>9} {f(row['sector_coverage'], '.2f'):>9} "
              f"{row['pooled_nondominated']:>9}")
    out = Path(args.output) if args.output else Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / "comparison.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    artifacts.write_json(out, report)
    print(f"comparison written to {out}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    ok = True
    for name, passed, detail in run_checks():
        ok &= passed
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paretomtl", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment described by a JSON config")
    p.add_argument("config")
    p.add_argument("-o", "--output", help=f"output directory (overrides config and ${OUTPUT_DIR_ENV})")
    p.add_argument("-j", "--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="tabulate metrics for two or more front.csv files")
    p.add_argument("fronts", nargs="+")
    p.add_argument("--prefs", type=int, default=10, help="number of even preference vectors for coverage")
    p.add_argument("--prefs-seed", type=int, default=0)
    p.add_argument("--prefs-file", help="preference vectors CSV (overrides --prefs)")
    p.add_argument("--ref", type=float, nargs="+", help="hypervolume reference point")
    p.add_argument("-o", "--output", help="where to write comparison.json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ablate-init", help="Pareto MTL with vs without the initialization phase")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("-j", "--workers", type=int, default=None)
    p.set_defaults(func=cmd_ablate_init)

    p = sub.add_parser("check", help="finite-difference and descent-inequality self-checks")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command == "compare" and len(args.fronts) < 2:
        parser.error("compare needs at least two front files")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
