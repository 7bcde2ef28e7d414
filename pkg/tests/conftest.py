"""Shared fixtures: a session workspace with every sample program
prepared, instrumented, and run once (trace capture on)."""

from __future__ import annotations

import os
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

import pytest

from nugget.analysis import (
    AnalysisConfig,
    PROFILE_PATH_ENV,
    TRACE_PATH_ENV,
    emit_runtime_support,
    instrument_for_analysis,
)
from nugget.ir import BlockTable, IRModule, build_block_table, parse_file
from nugget.pipeline import build_base_ir
from nugget.profiles import ProfileSet, read_profile
from nugget.toolchain import compile_binary, default_toolchain

FIXTURE_DIR = Path(__file__).parent / "fixtures"
HAVE_CLANG = shutil.which("clang") is not None

requires_clang = pytest.mark.skipif(not HAVE_CLANG, reason="clang not available")

# name -> interval size for the analysis run
SINGLE_THREADED = {
    "loop_simple": 5000,
    "loop_nested": 5000,
    "recursion_fib": 5000,
    "recursion_mutual": 5000,
    "branchy": 5000,
    "switchy": 5000,
    "memops": 20000,
    "sort_insertion": 5000,
    "collatz": 5000,
    "early_exit": 5000,
}
THREADED = {"threads4": 20000}


@dataclass
class BuiltFixture:
    """One sample program after prepare + analyze with trace capture."""

    name: str
    out_dir: Path
    base_ll: Path
    module: IRModule
    table: BlockTable
    instrumented_ll: Path
    runtime_c: Path
    binary: Path
    profile_path: Path
    profile_bytes: bytes
    profile: ProfileSet
    trace_path: Path | None
    interval_size: int


def run_analysis_binary(
    binary: Path,
    profile_path: Path,
    trace_path: Path | None = None,
    args: tuple[str, ...] = (),
    cwd: Path | None = None,
) -> None:
    env = dict(os.environ)
    env[PROFILE_PATH_ENV] = str(profile_path.resolve())
    if trace_path is not None:
        env[TRACE_PATH_ENV] = str(trace_path.resolve())
    else:
        env.pop(TRACE_PATH_ENV, None)
    proc = subprocess.run(
        [str(binary.resolve()), *args],
        env=env,
        cwd=cwd,
        stdout=subprocess.DEVNULL,
        stderr=subprocess.PIPE,
    )
    assert proc.returncode == 0, proc.stderr.decode()


def build_fixture(
    name: str,
    work: Path,
    interval_size: int,
    thread_safe: bool = False,
    trace: bool = True,
    sources: list[Path] | None = None,
) -> BuiltFixture:
    config = default_toolchain()
    out = work / name
    out.mkdir(parents=True, exist_ok=True)
    sources = sources or [FIXTURE_DIR / f"{name}.c"]
    base = build_base_ir(sources, config, out)
    module = parse_file(base)
    table = build_block_table(module)

    acfg = AnalysisConfig(interval_size=interval_size, thread_safe=thread_safe)
    instrumented = instrument_for_analysis(module, table, acfg)
    instrumented_ll = out / "instrumented.ll"
    instrumented_ll.write_text(instrumented.emit(), encoding="utf-8")
    runtime_c = out / "runtime.c"
    runtime_c.write_text(emit_runtime_support(acfg), encoding="utf-8")
    binary = out / "analysis-bin"
    compile_binary(config, [instrumented_ll, runtime_c], binary)

    profile_path = out / "nugget.profile"
    trace_path = out / "trace.bin" if trace else None
    run_analysis_binary(binary, profile_path, trace_path, cwd=out)
    profile_bytes = profile_path.read_bytes()
    return BuiltFixture(
        name=name,
        out_dir=out,
        base_ll=base,
        module=module,
        table=table,
        instrumented_ll=instrumented_ll,
        runtime_c=runtime_c,
        binary=binary,
        profile_path=profile_path,
        profile_bytes=profile_bytes,
        profile=read_profile(profile_path, table),
        trace_path=trace_path,
        interval_size=interval_size,
    )


@pytest.fixture(scope="session")
def workspace(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("nugget-work")


@pytest.fixture(scope="session")
def built_fixtures(workspace) -> dict[str, BuiltFixture]:
    if not HAVE_CLANG:
        pytest.skip("clang not available")
    built = {}
    for name, interval_size in SINGLE_THREADED.items():
        built[name] = build_fixture(name, workspace, interval_size)
    return built


@pytest.fixture(scope="session")
def threaded_fixture(workspace) -> BuiltFixture:
    if not HAVE_CLANG:
        pytest.skip("clang not available")
    return build_fixture("threads4", workspace, THREADED["threads4"], thread_safe=True, trace=False)
