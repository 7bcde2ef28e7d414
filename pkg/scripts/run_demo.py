#!/usr/bin/env python3
"""Run the whole pipeline on one or more C sources and print the report.

Example:
    python scripts/run_demo.py tests/fixtures/branchy.c \
        --method kmeans --interval-size 5000 --out-dir /tmp/demo
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nugget.pipeline import PipelineConfig, run_pipeline


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("sources", nargs="+", type=Path)
    parser.add_argument("--out-dir", type=Path, default=Path("demo-out"))
    parser.add_argument("--interval-size", type=int, default=100_000)
    parser.add_argument("--method", choices=["random", "kmeans"], default="kmeans")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=10)
    parser.add_argument("--warmup-intervals", type=int, default=1)
    parser.add_argument("--search-distance", type=int, default=0)
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--run-arg", action="append", default=[])
    args = parser.parse_args()

    config = PipelineConfig(
        out_dir=args.out_dir,
        interval_size=args.interval_size,
        method=args.method,
        seed=args.seed,
        samples=args.samples,
        warmup_intervals=args.warmup_intervals,
        search_distance=args.search_distance,
        repetitions=args.reps,
    )
    report = run_pipeline(config, args.sources, run_args=args.run_arg)
    print(f"workload        {report.workload}")
    print(f"ground truth    {report.ground_truth_ns / 1e6:10.3f} ms")
    if report.complete:
        print(f"predicted       {report.predicted_total_ns / 1e6:10.3f} ms")
        print(f"error           {report.prediction_error * 100:+10.2f} %")
    for row in report.nuggets:
        print(
            f"  interval {row.interval_id:>5}  weight {row.weight:.4f}  "
            f"roi {row.roi_ns / 1e6:9.3f} ms  {row.status}"
        )
    return 0 if report.complete else 3


if __name__ == "__main__":
    sys.exit(main())
