#!/usr/bin/env python3
"""Measure analysis-instrumentation slowdown across interval sizes.

The hook fires once per block regardless of the interval size, so the
slowdown should be flat in S; deviations point at record-emission cost.

Example:
    python scripts/overhead_sweep.py tests/fixtures/matmul.c \
        --sizes 100000 1000000 10000000
"""

import argparse
import statistics
import subprocess
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nugget.analysis import AnalysisConfig, emit_runtime_support, instrument_for_analysis
from nugget.ir import build_block_table, parse_file
from nugget.pipeline import build_base_ir
from nugget.toolchain import compile_binary, default_toolchain


def timed_runs(binary: Path, reps: int, env: dict | None = None) -> float:
    import os

    full = dict(os.environ)
    if env:
        full.update(env)
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        subprocess.run([str(binary)], stdout=subprocess.DEVNULL, check=True, env=full)
        samples.append(time.perf_counter_ns() - t0)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path)
    parser.add_argument("--sizes", type=int, nargs="+", default=[10_000, 1_000_000, 100_000_000])
    parser.add_argument("--out-dir", type=Path, default=Path("overhead-out"))
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    config = default_toolchain()
    base = build_base_ir([args.source], config, args.out_dir)
    module = parse_file(base)
    table = build_block_table(module)
    base_bin = args.out_dir / "base-bin"
    compile_binary(config, [base], base_bin)
    base_ns = timed_runs(base_bin, args.reps)
    print(f"baseline: {base_ns / 1e6:.2f} ms ({len(table)} blocks)")
    print(f"{'interval size':>14}  {'time ms':>10}  {'slowdown':>8}")

    for size in args.sizes:
        acfg = AnalysisConfig(interval_size=size)
        tag = args.out_dir / f"s{size}"
        tag.mkdir(parents=True, exist_ok=True)
        ll = tag / "instrumented.ll"
        ll.write_text(instrument_for_analysis(module, table, acfg).emit())
        rt = tag / "runtime.c"
        rt.write_text(emit_runtime_support(acfg))
        binary = tag / "analysis-bin"
        compile_binary(config, [ll, rt], binary)
        ns = timed_runs(
            binary, args.reps, env={"NUGGET_PROFILE_PATH": str(tag / "nugget.profile")}
        )
        print(f"{size:>14}  {ns / 1e6:>10.2f}  {ns / base_ns:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
