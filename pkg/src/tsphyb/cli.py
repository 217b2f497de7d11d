"""Command-line front door: solve one cell or run a bench config.

Exit codes: 0 success, 1 I/O failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench
from .hybrid import PipelineError
from .mh import KINDS
from .tsplib import parse_instance_file


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsphyb",
        description="Hybrid metaheuristic TSP solver and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance with one hybrid")
    solve.add_argument("--instance", required=True, help="TSPLIB file")
    solve.add_argument("--mh", required=True, choices=sorted(KINDS))
    solve.add_argument("--pipeline", required=True,
                       help="pipeline name, e.g. SISR3tours or TSP-MH")
    solve.add_argument("--ofc", required=True, type=int,
                       help="objective-function-call budget per run")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--runs", type=int, default=1)
    solve.add_argument("--final-uncross", type=int, default=3)
    solve.add_argument("--best-ref", type=int, default=None)
    solve.add_argument("--population", type=int, default=10)
    solve.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    solve.add_argument("--out", default=None, help="write a CSV report here")
    solve.add_argument("--json", default=None, help="write the JSON trace here")
    solve.add_argument("--svg", default=None, help="write the best route here")

    benchp = sub.add_parser("bench", help="run every cell of a bench config")
    benchp.add_argument("--config", required=True, help="JSON bench config")
    return parser


def _run_solve(args) -> int:
    cfg = bench.ExperimentConfig(
        instance=args.instance,
        mh=args.mh,
        pipeline=args.pipeline,
        ofc_limit=args.ofc,
        runs=args.runs,
        final_uncross_iterations=args.final_uncross,
        base_seed=args.seed,
        best_ref=args.best_ref,
        population=args.population,
        jobs=args.jobs,
    )
    inst = parse_instance_file(args.instance)
    report = bench.run_experiment(cfg, inst)
    print(f"instance {report.instance_name} n={report.n}")
    print(f"hybridization {report.hybridization}")
    print(f"best_bu {report.best_bu}")
    print(f"best_au {report.best_au}")
    print(f"ofc_at_best {report.ofc_at_best_au} of {report.ofc_limit}")
    if report.best_ref is not None:
        print(f"error_bu {report.error_bu()}")
        print(f"error_au {report.error_au()}")
    if args.out:
        Path(args.out).write_text(bench.emit_report(report, "csv"))
    if args.json:
        Path(args.json).write_text(bench.emit_report(report, "json"))
    if args.svg:
        best = min(report.results, key=lambda r: (r.best_au, r.seed))
        _, order = bench.run_single(
            inst, args.mh, args.pipeline, args.ofc, best.seed,
            args.population, args.final_uncross, return_order=True,
        )
        Path(args.svg).write_text(bench.render_route_svg(order, inst))
    return 0


def _run_bench(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cells, doc = bench.load_bench_config(fh.read())
    out_dir = Path(doc.get("out_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for cfg in cells:
        inst = parse_instance_file(cfg.instance)
        report = bench.run_experiment(cfg, inst)
        reports.append(report)
        stem = f"{report.instance_name}_{report.mh}_{report.pipeline}"
        (out_dir / f"{stem}.json").write_text(report.to_json())
        print(
            f"{report.hybridization} on {report.instance_name}: "
            f"best_au {report.best_au}"
        )
    (out_dir / "bench.csv").write_text(bench.reports_to_csv(reports))
    print(f"wrote {out_dir / 'bench.csv'}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _run_solve(args)
        return _run_bench(args)
    except (PipelineError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
