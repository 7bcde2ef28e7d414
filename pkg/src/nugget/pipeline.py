"""End-to-end orchestration: base IR builds, timed runs, extrapolation,
and validation reports."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import platform
import statistics
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import analysis, markers, nuggets, selection as sel
from .errors import MissingRoi, NonZeroExit, WorkloadMismatch, ZeroTruth
from .ir import build_block_table, parse_file, read_block_table, render_block_table
from .profiles import ProfileSet, read_profile
from .selection import SelectionResult
from .toolchain import (
    DEFAULT_BACKEND_OPT,
    ToolchainConfig,
    compile_binary,
    default_toolchain,
    link_ir,
    optimize_ir,
    source_to_ir,
)

STATUS_OK = "OK"
STATUS_MARKER_MISSED = "MARKER_MISSED"


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for a whole pipeline run; each CLI stage reads its slice."""

    out_dir: Path
    toolchain: ToolchainConfig = dataclasses.field(default_factory=default_toolchain)
    interval_size: int = 100_000
    warmup_intervals: int = 0
    search_distance: int = 0
    method: str = sel.METHOD_RANDOM
    seed: int = 0
    samples: int = 10
    max_clusters: int = sel.DEFAULT_MAX_CLUSTERS
    repetitions: int = 3
    thread_safe: bool = False
    roi_action: str = nuggets.ACTION_TIMER
    backend_opt: str = DEFAULT_BACKEND_OPT

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.interval_size < 1:
            raise ValueError("interval_size must be >= 1")
        self.toolchain.check_resolvable()


def write_atomic(path: Path, data: str | bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


def build_base_ir(
    sources: Sequence[Path],
    config: ToolchainConfig,
    out_dir: Path,
    base_name: str = "base.ll",
) -> Path:
    """sources -> per-source IR -> one merged module -> optimized base IR.

    The result is the immutable input to every later stage; .ll sources
    skip the frontend step.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    ir_dir = out_dir / "ir"
    ir_dir.mkdir(exist_ok=True)
    per_source: list[Path] = []
    for i, src in enumerate(sources):
        src = Path(src)
        if src.suffix == ".ll":
            per_source.append(src)
            continue
        out = ir_dir / f"{i:02d}_{src.stem}.ll"
        source_to_ir(config, src, out)
        per_source.append(out)
    linked = ir_dir / "linked.ll"
    link_ir(config, per_source, linked)
    optimized = ir_dir / "optimized.ll"
    optimize_ir(config, linked, optimized)
    base = out_dir / base_name
    write_atomic(base, optimized.read_text(encoding="utf-8"))
    return base


@dataclass(frozen=True)
class TimingResult:
    samples_ns: tuple[int, ...]

    @property
    def median_ns(self) -> float:
        return float(statistics.median(self.samples_ns))


def run_and_time(
    binary: Path,
    args: Sequence[str] = (),
    repetitions: int = 3,
    env: Mapping[str, str] | None = None,
    cwd: Path | None = None,
) -> TimingResult:
    """Sequential repeated runs; wall time per run on the monotonic clock."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    binary = Path(binary).resolve()
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter_ns()
        proc = subprocess.run(
            [str(binary), *args],
            env=full_env,
            cwd=cwd,
            stdout=subprocess.DEVNULL,
            stderr=subprocess.PIPE,
        )
        t1 = time.perf_counter_ns()
        if proc.returncode != 0:
            raise NonZeroExit(
                f"{binary} exited {proc.returncode}: "
                f"{proc.stderr.decode(errors='replace')[-400:]}"
            )
        samples.append(t1 - t0)
    return TimingResult(samples_ns=tuple(samples))


@dataclass(frozen=True)
class RoiResult:
    interval_id: int
    roi_ns: float
    status: str
    samples_ns: tuple[int, ...] = ()


def parse_roi_record(path: Path) -> tuple[int, int, str]:
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines() if l.strip()]
    if not lines:
        raise MissingRoi(f"no ROI record in {path}")
    interval_id, roi_ns, status = lines[-1].split("\t")
    return int(interval_id), int(roi_ns), status


def run_nugget(
    binary: Path,
    roi_path: Path,
    args: Sequence[str] = (),
    repetitions: int = 3,
    env: Mapping[str, str] | None = None,
    cwd: Path | None = None,
) -> RoiResult:
    """Repeated nugget runs; ROI time is the median of the OK records.

    Exit status 3 means the end marker never fired; any other nonzero
    status is a hard failure.
    """
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    full_env["NUGGET_ROI_OUT"] = str(Path(roi_path).resolve())
    binary = Path(binary).resolve()
    samples = []
    interval_id = None
    for _ in range(repetitions):
        roi_path.unlink(missing_ok=True)
        proc = subprocess.run(
            [str(binary), *args],
            env=full_env,
            cwd=cwd,
            stdout=subprocess.DEVNULL,
            stderr=subprocess.PIPE,
        )
        if proc.returncode not in (0, 3):
            raise NonZeroExit(
                f"{binary} exited {proc.returncode}: "
                f"{proc.stderr.decode(errors='replace')[-400:]}"
            )
        interval_id, roi_ns, status = parse_roi_record(roi_path)
        if status != STATUS_OK or proc.returncode == 3:
            return RoiResult(interval_id, 0.0, STATUS_MARKER_MISSED)
        samples.append(roi_ns)
    return RoiResult(
        interval_id,
        float(statistics.median(samples)),
        STATUS_OK,
        tuple(samples),
    )


def extrapolate_runtime(
    selection: SelectionResult,
    roi_times_ns: Mapping[int, float],
    profiles: ProfileSet,
) -> float:
    """Weighted per-interval time scaled to the whole run.

    A trailing partial interval contributes its instruction mass at the
    weighted mean interval rate.
    """
    for c in selection.chosen:
        if c.interval_id not in roi_times_ns:
            raise MissingRoi(f"interval {c.interval_id} has no ROI time")
    weighted_mean = sum(c.weight * roi_times_ns[c.interval_id] for c in selection.chosen)
    n_full = len(profiles.full_intervals)
    predicted = n_full * weighted_mean
    partial = profiles.partial_interval
    if partial is not None:
        predicted += (partial.actual_size / profiles.interval_size) * weighted_mean
    return predicted


def prediction_error(predicted: float, truth: float) -> float:
    if truth <= 0:
        raise ZeroTruth("ground truth must be > 0")
    return (predicted - truth) / truth


@dataclass(frozen=True)
class NuggetRow:
    interval_id: int
    weight: float
    roi_ns: float
    status: str


@dataclass(frozen=True)
class ValidationReport:
    workload: str
    ground_truth_ns: float
    truth_samples_ns: tuple[int, ...]
    nuggets: tuple[NuggetRow, ...]
    predicted_total_ns: float | None
    prediction_error: float | None
    machine: dict
    selection_method: str
    selection_seed: int

    @property
    def complete(self) -> bool:
        return all(row.status == STATUS_OK for row in self.nuggets)

    def to_json(self) -> str:
        payload = {
            "workload": self.workload,
            "ground_truth_ns": self.ground_truth_ns,
            "truth_samples_ns": list(self.truth_samples_ns),
            "nuggets": [
                {
                    "interval_id": r.interval_id,
                    "weight": r.weight,
                    "roi_ns": r.roi_ns,
                    "status": r.status,
                }
                for r in self.nuggets
            ],
            "predicted_total_ns": self.predicted_total_ns,
            "prediction_error": self.prediction_error,
            "machine": self.machine,
            "selection_method": self.selection_method,
            "selection_seed": self.selection_seed,
            "complete": self.complete,
        }
        return json.dumps(payload, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "ValidationReport":
        obj = json.loads(text)
        return ValidationReport(
            workload=obj["workload"],
            ground_truth_ns=obj["ground_truth_ns"],
            truth_samples_ns=tuple(obj["truth_samples_ns"]),
            nuggets=tuple(
                NuggetRow(r["interval_id"], r["weight"], r["roi_ns"], r["status"])
                for r in obj["nuggets"]
            ),
            predicted_total_ns=obj["predicted_total_ns"],
            prediction_error=obj["prediction_error"],
            machine=obj["machine"],
            selection_method=obj["selection_method"],
            selection_seed=obj["selection_seed"],
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["interval_id", "weight", "roi_ns", "status"])
        for r in self.nuggets:
            writer.writerow([r.interval_id, r.weight, r.roi_ns, r.status])
        return buf.getvalue()


def make_report(
    workload: str,
    truth: TimingResult,
    selection: SelectionResult,
    roi_results: Sequence[RoiResult],
) -> ValidationReport:
    rows = tuple(
        NuggetRow(r.interval_id, selection.weight_of(r.interval_id), r.roi_ns, r.status)
        for r in roi_results
    )
    return ValidationReport(
        workload=workload,
        ground_truth_ns=truth.median_ns,
        truth_samples_ns=truth.samples_ns,
        nuggets=rows,
        predicted_total_ns=None,
        prediction_error=None,
        machine=machine_descriptor(),
        selection_method=selection.method,
        selection_seed=selection.seed,
    )


def speedup_error(report_a: ValidationReport, report_b: ValidationReport) -> float:
    """Error of the predicted A/B speedup against the measured one.

    Equal per-platform prediction errors cancel exactly in the ratio.
    """
    if report_a.workload != report_b.workload:
        raise WorkloadMismatch(
            f"workloads differ: {report_a.workload!r} vs {report_b.workload!r}"
        )
    if (report_a.selection_method, report_a.selection_seed) != (
        report_b.selection_method,
        report_b.selection_seed,
    ):
        raise WorkloadMismatch("selections differ between reports")
    if not (report_a.complete and report_b.complete):
        raise WorkloadMismatch("both reports must be complete")
    predicted = report_a.predicted_total_ns / report_b.predicted_total_ns
    true = report_a.ground_truth_ns / report_b.ground_truth_ns
    return (predicted - true) / true


def machine_descriptor() -> dict:
    uname = platform.uname()
    return {
        "system": uname.system,
        "node": uname.node,
        "release": uname.release,
        "machine": uname.machine,
        "processor": uname.processor,
        "python": platform.python_version(),
    }


# ------------------------------------------------------------------ stages
#
# Each stage is re-runnable and reads/writes only its declared artifacts
# under config.out_dir. The CLI maps one subcommand onto each.


def stage_prepare(config: PipelineConfig, sources: Sequence[Path]) -> Path:
    config.toolchain.check_resolvable()
    return build_base_ir(list(sources), config.toolchain, Path(config.out_dir))


def stage_analyze(
    config: PipelineConfig,
    run_args: Sequence[str] = (),
    trace_path: Path | None = None,
) -> ProfileSet:
    out = Path(config.out_dir)
    module = parse_file(out / "base.ll")
    table = build_block_table(module)
    write_atomic(out / "bbid.map", render_block_table(table))

    acfg = analysis.AnalysisConfig(
        interval_size=config.interval_size, thread_safe=config.thread_safe
    )
    adir = out / "analysis"
    adir.mkdir(parents=True, exist_ok=True)
    instrumented = analysis.instrument_for_analysis(module, table, acfg)
    write_atomic(adir / "instrumented.ll", instrumented.emit())
    write_atomic(adir / "runtime.c", analysis.emit_runtime_support(acfg))
    binary = adir / "analysis-bin"
    compile_binary(
        config.toolchain,
        [adir / "instrumented.ll", adir / "runtime.c"],
        binary,
        opt=config.backend_opt,
    )

    profile_path = out / "nugget.profile"
    env = dict(os.environ)
    env[analysis.PROFILE_PATH_ENV] = str(profile_path.resolve())
    if trace_path is not None:
        env[analysis.TRACE_PATH_ENV] = str(Path(trace_path).resolve())
    proc = subprocess.run(
        [str(binary.resolve()), *run_args],
        env=env,
        cwd=out,
        stdout=subprocess.DEVNULL,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        raise NonZeroExit(
            f"analysis run exited {proc.returncode}: "
            f"{proc.stderr.decode(errors='replace')[-400:]}"
        )
    return read_profile(profile_path, table)


def stage_select(config: PipelineConfig) -> SelectionResult:
    out = Path(config.out_dir)
    table = read_block_table(out / "bbid.map")
    pset = read_profile(out / "nugget.profile", table)
    if config.method == sel.METHOD_RANDOM:
        result = sel.select_random(pset, n=config.samples, seed=config.seed)
    else:
        result = sel.select_kmeans(pset, n_max=config.max_clusters, seed=config.seed)
    write_atomic(out / "selection.json", sel.selection_to_json(result))
    return result


def stage_nugget(config: PipelineConfig) -> list:
    out = Path(config.out_dir)
    table = read_block_table(out / "bbid.map")
    pset = read_profile(out / "nugget.profile", table)
    result = sel.read_selection(out / "selection.json")
    specs = markers.build_nugget_spec(
        pset,
        result,
        warmup_intervals=config.warmup_intervals,
        search_distance=config.search_distance,
    )
    ndir = out / "nuggets"
    ndir.mkdir(exist_ok=True)
    write_atomic(ndir / "specs.json", markers.specs_to_json(specs))
    base_module = parse_file(out / "base.ll")
    for spec in specs:
        item = ndir / str(spec.interval_id)
        item.mkdir(exist_ok=True)
        build = nuggets.instrument_nugget(base_module, table, spec, action=config.roi_action)
        write_atomic(item / "nugget.ll", build.module_out.emit())
        write_atomic(
            item / "runtime.c",
            nuggets.emit_nugget_runtime(spec, action=config.roi_action),
        )
        write_atomic(
            item / "symbols.json",
            json.dumps(build.marker_symbols, indent=2, sort_keys=True) + "\n",
        )
        compile_binary(
            config.toolchain,
            [item / "nugget.ll", item / "runtime.c"],
            item / "nugget-bin",
            opt=config.backend_opt,
        )
    return specs


def stage_validate(
    config: PipelineConfig,
    run_args: Sequence[str] = (),
    workload: str | None = None,
    rebuild: bool = False,
) -> ValidationReport:
    out = Path(config.out_dir)
    table = read_block_table(out / "bbid.map")
    pset = read_profile(out / "nugget.profile", table)
    result = sel.read_selection(out / "selection.json")
    specs = markers.read_specs(out / "nuggets" / "specs.json")

    base_bin = out / "base-bin"
    if rebuild or not base_bin.exists():
        compile_binary(config.toolchain, [out / "base.ll"], base_bin, opt=config.backend_opt)
    truth = run_and_time(base_bin, run_args, repetitions=config.repetitions, cwd=out)

    roi_results = []
    for spec in specs:
        item = out / "nuggets" / str(spec.interval_id)
        roi_results.append(
            run_nugget(
                item / "nugget-bin",
                roi_path=item / "nugget.roi",
                args=run_args,
                repetitions=config.repetitions,
                cwd=out,
            )
        )

    report = make_report(workload or out.name, truth, result, roi_results)
    if report.complete:
        predicted = extrapolate_runtime(
            result, {r.interval_id: r.roi_ns for r in roi_results}, pset
        )
        report = dataclasses.replace(
            report,
            predicted_total_ns=predicted,
            prediction_error=prediction_error(predicted, truth.median_ns),
        )
    write_atomic(out / "validation.json", report.to_json())
    write_atomic(out / "validation.csv", report.to_csv())
    return report


def run_pipeline(
    config: PipelineConfig,
    sources: Sequence[Path],
    run_args: Sequence[str] = (),
    workload: str | None = None,
) -> ValidationReport:
    """One-shot driver over every stage, for scripts and experiments."""
    config.validate()
    stage_prepare(config, sources)
    stage_analyze(config, run_args=run_args)
    stage_select(config)
    stage_nugget(config)
    return stage_validate(config, run_args=run_args, workload=workload)
