"""LLVM-IR interval profiling, representative-interval selection, and nugget extraction."""

from .analysis import AnalysisConfig, HookState, hook_step, instrument_for_analysis, replay_trace
from .ir import BlockTable, IRModule, build_block_table, parse_file, parse_module
from .markers import Marker, NuggetSpec, build_nugget_spec, derive_end_marker, derive_relaxed_marker
from .nuggets import NuggetBuild, instrument_nugget
from .pipeline import PipelineConfig, ValidationReport, run_pipeline
from .profiles import IntervalProfile, ProfileSet, read_profile, write_profile
from .selection import SelectionResult, select_kmeans, select_random

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BlockTable",
    "HookState",
    "IRModule",
    "IntervalProfile",
    "Marker",
    "NuggetBuild",
    "NuggetSpec",
    "PipelineConfig",
    "ProfileSet",
    "SelectionResult",
    "ValidationReport",
    "build_block_table",
    "build_nugget_spec",
    "derive_end_marker",
    "derive_relaxed_marker",
    "hook_step",
    "instrument_for_analysis",
    "instrument_nugget",
    "parse_file",
    "parse_module",
    "read_profile",
    "replay_trace",
    "run_pipeline",
    "select_kmeans",
    "select_random",
    "write_profile",
]
