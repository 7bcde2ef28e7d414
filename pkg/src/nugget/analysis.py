"""Interval-analysis instrumentation and its reference interpreter.

`instrument_for_analysis` plants a hook call at the end of every block;
the native runtime support (see runtime/analysis_runtime.c) and the
in-process `HookState` interpreter implement the identical counting
contract, so a recorded block trace replayed through `hook_step` must
reproduce the native profile byte for byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .errors import BlockTableMismatch, UnknownBlock
from .ir import BlockTable, IRModule, iter_module_blocks
from .profiles import IntervalProfile, ProfileSet

HOOK_SYMBOL = "__nugget_bb_hook"
INIT_SYMBOL = "__nugget_init"
FINI_SYMBOL = "__nugget_fini"
BLOCK_COUNT_SYMBOL = "__nugget_block_count"
PROFILE_PATH_ENV = "NUGGET_PROFILE_PATH"
TRACE_PATH_ENV = "NUGGET_TRACE_PATH"
DEFAULT_PROFILE_PATH = "./nugget.profile"


@dataclass(frozen=True)
class AnalysisConfig:
    interval_size: int
    profile_path_env: str = PROFILE_PATH_ENV
    thread_safe: bool = False

    def __post_init__(self):
        if self.interval_size < 1:
            raise ValueError("interval_size must be >= 1")


def instrument_for_analysis(
    module: IRModule, table: BlockTable, config: AnalysisConfig
) -> IRModule:
    """Hook every block of every definition; baked ids and counts come from `table`."""
    blocks = list(iter_module_blocks(module))
    if len(blocks) != len(table):
        raise UnknownBlock(
            f"table has {len(table)} blocks, module has {len(blocks)}"
        )
    for (fn, _, block), entry in zip(blocks, table.entries):
        if entry.function_name != fn.name or entry.inst_count != block.inst_count:
            raise UnknownBlock(
                f"table entry {entry.bb_id} does not match module block "
                f"(@{fn.name} vs @{entry.function_name})"
            )

    next_id = iter(range(len(table)))

    def hook_blocks(_, fn):
        new_blocks = []
        for block in fn.blocks:
            entry = table[next(next_id)]
            call = f"  call void @{HOOK_SYMBOL}(i64 {entry.bb_id}, i64 {entry.inst_count})"
            new_blocks.append(block.with_call_before_terminator(call))
        return replace(fn, blocks=tuple(new_blocks))

    module = module.map_definitions(hook_blocks)

    main = module.get_function("main")
    if main is not None and main.is_definition:
        entry_block = main.blocks[0].with_call_at_start(f"  call void @{INIT_SYMBOL}()")
        module = module.replace_function(
            "main", replace(main, blocks=(entry_block,) + main.blocks[1:])
        )

    module = module.with_declarations(
        [
            f"declare void @{HOOK_SYMBOL}(i64, i64)",
            f"declare void @{INIT_SYMBOL}()",
        ]
    )
    return module.with_toplevel_lines(
        ["", f"@{BLOCK_COUNT_SYMBOL} = dso_local constant i64 {len(table)}, align 8"]
    )


class HookState:
    """Reference interpreter for the hook runtime's counting contract."""

    def __init__(self, interval_size: int):
        if interval_size < 1:
            raise ValueError("interval_size must be >= 1")
        self.interval_size = interval_size
        self.global_counter = 0
        self.interval_id = 0
        self.boundary = interval_size
        self.last_end = 0
        self.bbv: dict[int, int] = {}
        self.cstamp: dict[int, int] = {}

    def _emit(self, partial: bool) -> IntervalProfile:
        record = IntervalProfile(
            interval_id=self.interval_id,
            actual_size=self.global_counter - self.last_end,
            partial=partial,
            bbv=self.bbv,
            cstamp=self.cstamp,
        )
        self.bbv = {}
        self.cstamp = {}
        self.last_end = self.global_counter
        if not partial:
            self.interval_id += 1
            self.boundary = self.global_counter + self.interval_size
        return record


def hook_step(state: HookState, bb_id: int, inst_count: int) -> IntervalProfile | None:
    """One block completion; returns the interval record it closed, if any.

    A single step emits at most one record: when inst_count overshoots
    past the boundary, the overshoot is absorbed into actual_size and
    the next boundary moves to the record's true end plus the interval
    size.
    """
    state.global_counter += inst_count
    state.bbv[bb_id] = state.bbv.get(bb_id, 0) + 1
    state.cstamp[bb_id] = state.global_counter
    if state.global_counter >= state.boundary:
        return state._emit(partial=False)
    return None


def finalize_profile(state: HookState) -> IntervalProfile | None:
    """Close the tail: a partial record iff any hook fired since the last boundary."""
    if state.global_counter != state.last_end:
        return state._emit(partial=True)
    return None


def replay_trace(
    bb_ids: Iterable[int], table: BlockTable, config: AnalysisConfig
) -> ProfileSet:
    """Drive hook_step over a recorded block trace; the oracle for native runs."""
    state = HookState(config.interval_size)
    intervals = []
    size = len(table)
    for bb_id in bb_ids:
        if bb_id >= size:
            raise BlockTableMismatch(f"trace bb_id {bb_id} out of range")
        record = hook_step(state, bb_id, table.inst_count(bb_id))
        if record is not None:
            intervals.append(record)
    record = finalize_profile(state)
    if record is not None:
        intervals.append(record)
    return ProfileSet(
        interval_size=config.interval_size,
        intervals=tuple(intervals),
        block_table=table,
    )


def read_trace(path: str | Path) -> Iterator[int]:
    """Stream of bb_ids from a native trace file (u64 little-endian each)."""
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(8 * 65536)
            if not chunk:
                return
            if len(chunk) % 8:
                raise BlockTableMismatch("trace file truncated")
            yield from struct.unpack(f"<{len(chunk) // 8}Q", chunk)


def _load_template(name: str) -> str:
    return resources.files("nugget.runtime").joinpath(name).read_text(encoding="utf-8")


def emit_runtime_support(config: AnalysisConfig) -> str:
    """The analysis runtime compilation unit with config values baked in."""
    text = _load_template("analysis_runtime.c")
    return (
        text.replace("@INTERVAL_SIZE@", str(config.interval_size))
        .replace("@PROFILE_ENV@", config.profile_path_env)
        .replace("@THREAD_SAFE@", "1" if config.thread_safe else "0")
    )
