"""Multi-stage pipeline CLI.

Subcommands map one-to-one onto the pipeline stages: prepare, analyze,
select, nugget, validate, speedup, report (plus the ir-link utility the
default toolchain uses). Every stage is re-runnable and touches only
its declared artifacts under --out-dir.

Exit status: 0 success, 1 pipeline error, 2 usage error, 3 a nugget
missed its end marker during validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import nuggets, pipeline, selection as sel
from .errors import NuggetError
from .ir import merge_files
from .toolchain import DEFAULT_BACKEND_OPT, default_toolchain, load_toolchain

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MARKER_MISSED = 3


def _config(args) -> pipeline.PipelineConfig:
    toolchain = (
        load_toolchain(args.toolchain_config)
        if getattr(args, "toolchain_config", None)
        else default_toolchain()
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return pipeline.PipelineConfig(
        out_dir=out,
        toolchain=toolchain,
        interval_size=getattr(args, "interval_size", 100_000),
        warmup_intervals=getattr(args, "warmup_intervals", 0),
        search_distance=getattr(args, "search_distance", 0),
        method=getattr(args, "method", sel.METHOD_RANDOM),
        seed=getattr(args, "seed", 0),
        samples=getattr(args, "samples", 10),
        max_clusters=getattr(args, "max_clusters", sel.DEFAULT_MAX_CLUSTERS),
        repetitions=getattr(args, "reps", 3),
        thread_safe=getattr(args, "thread_safe", False),
        roi_action=getattr(args, "action", nuggets.ACTION_TIMER),
        backend_opt=getattr(args, "backend_opt", DEFAULT_BACKEND_OPT),
    )


def cmd_prepare(args) -> int:
    base = pipeline.stage_prepare(_config(args), [Path(s) for s in args.sources])
    print(f"base IR: {base}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    trace = Path(args.trace_path) if args.trace_path else None
    pset = pipeline.stage_analyze(_config(args), run_args=args.run_arg, trace_path=trace)
    print(f"profile: {Path(args.out_dir) / 'nugget.profile'} ({len(pset)} intervals)")
    return EXIT_OK


def cmd_select(args) -> int:
    result = pipeline.stage_select(_config(args))
    print(f"selection: {len(result.chosen)} intervals (method={result.method})")
    return EXIT_OK


def cmd_nugget(args) -> int:
    specs = pipeline.stage_nugget(_config(args))
    print(f"nuggets: {len(specs)} built under {Path(args.out_dir) / 'nuggets'}")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = pipeline.stage_validate(
        _config(args),
        run_args=args.run_arg,
        workload=args.workload,
        rebuild=args.rebuild,
    )
    if not report.complete:
        print("validation incomplete: a nugget missed its end marker", file=sys.stderr)
        return EXIT_MARKER_MISSED
    print(
        f"truth {report.ground_truth_ns / 1e6:.3f} ms, predicted "
        f"{report.predicted_total_ns / 1e6:.3f} ms, "
        f"error {report.prediction_error * 100:+.2f}%"
    )
    return EXIT_OK


def cmd_speedup(args) -> int:
    report_a = pipeline.ValidationReport.from_json(Path(args.report_a).read_text())
    report_b = pipeline.ValidationReport.from_json(Path(args.report_b).read_text())
    err = pipeline.speedup_error(report_a, report_b)
    payload = {
        "workload": report_a.workload,
        "predicted_speedup": report_a.predicted_total_ns / report_b.predicted_total_ns,
        "true_speedup": report_a.ground_truth_ns / report_b.ground_truth_ns,
        "speedup_error": err,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        pipeline.write_atomic(Path(args.out), text)
    print(text, end="")
    return EXIT_OK


def cmd_report(args) -> int:
    out = Path(args.out_dir)
    report = pipeline.ValidationReport.from_json((out / "validation.json").read_text())
    print(f"workload:        {report.workload}")
    print(f"machine:         {report.machine.get('node')} ({report.machine.get('machine')})")
    print(f"selection:       {report.selection_method} seed={report.selection_seed}")
    print(f"ground truth:    {report.ground_truth_ns / 1e6:.3f} ms")
    if report.predicted_total_ns is not None:
        print(f"predicted total: {report.predicted_total_ns / 1e6:.3f} ms")
        print(f"prediction err:  {report.prediction_error * 100:+.2f}%")
    print(f"complete:        {report.complete}")
    for row in report.nuggets:
        print(
            f"  interval {row.interval_id:>6}  weight {row.weight:.4f}  "
            f"roi {row.roi_ns / 1e6:10.3f} ms  {row.status}"
        )
    return EXIT_OK


def cmd_ir_link(args) -> int:
    merge_files([Path(p) for p in args.inputs], Path(args.output))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nugget",
        description="LLVM-IR interval profiling, interval selection, and nugget validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out-dir", default="nugget-out")
        p.add_argument("--toolchain-config", default=None)

    p = sub.add_parser("prepare", help="build the base IR from sources")
    add_common(p)
    p.add_argument("sources", nargs="+")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("analyze", help="instrument, build, and run interval analysis")
    add_common(p)
    p.add_argument("--interval-size", type=int, default=100_000)
    p.add_argument("--thread-safe", action="store_true")
    p.add_argument("--backend-opt", default=DEFAULT_BACKEND_OPT)
    p.add_argument("--trace-path", default=None)
    p.add_argument("--run-arg", action="append", default=[])
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("select", help="choose representative intervals")
    add_common(p)
    p.add_argument("--method", choices=[sel.METHOD_RANDOM, sel.METHOD_KMEANS], default=sel.METHOD_RANDOM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--max-clusters", type=int, default=sel.DEFAULT_MAX_CLUSTERS)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("nugget", help="emit and build marker executables")
    add_common(p)
    p.add_argument("--warmup-intervals", type=int, default=0)
    p.add_argument("--search-distance", type=int, default=0)
    p.add_argument("--action", choices=[nuggets.ACTION_TIMER, nuggets.ACTION_ANNOUNCE], default=nuggets.ACTION_TIMER)
    p.add_argument("--backend-opt", default=DEFAULT_BACKEND_OPT)
    p.set_defaults(func=cmd_nugget)

    p = sub.add_parser("validate", help="time the full run and every nugget")
    add_common(p)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--workload", default=None)
    p.add_argument("--backend-opt", default=DEFAULT_BACKEND_OPT)
    p.add_argument("--rebuild", action="store_true")
    p.add_argument("--run-arg", action="append", default=[])
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("speedup", help="compare two validation reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_speedup)

    p = sub.add_parser("report", help="print a validation report")
    add_common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("ir-link", help="merge textual IR modules (toolchain utility)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ir_link)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NuggetError as exc:
        print(f"nugget: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
