"""Per-sample "nugget" instrumentation.

Only marker blocks are touched: each gets a pre-terminator hook call
carrying a kind mask and the baked thresholds, plus an assembly-visible
symbol call at block start. The generated marker runtime performs the
ROI actions and terminates the process when the end marker fires.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .analysis import _load_template
from .errors import UnknownBlock
from .ir import BlockTable, IRModule, attach_block_label_symbol
from .ir.transforms import rewrite_block
from .markers import Marker, MarkerKind, NuggetSpec

MARKER_HOOK_SYMBOL = "__nugget_marker_hook"
ROI_INIT_SYMBOL = "__nugget_roi_init"
ROI_PATH_ENV = "NUGGET_ROI_OUT"
DEFAULT_ROI_PATH = "./nugget.roi"

ACTION_TIMER = "timer"
ACTION_ANNOUNCE = "announce"

_KIND_BIT = {MarkerKind.WARMUP: 1, MarkerKind.START: 2, MarkerKind.END: 4}


def marker_symbol(kind: MarkerKind, interval_id: int) -> str:
    return f"__nugget_mark_{kind.value}_{interval_id}"


@dataclass(frozen=True)
class NuggetBuild:
    spec: NuggetSpec
    roi_action: str
    module_out: IRModule
    marker_symbols: dict[str, str]


def instrument_nugget(
    module: IRModule,
    table: BlockTable,
    spec: NuggetSpec,
    action: str = ACTION_TIMER,
) -> NuggetBuild:
    markers = [m for m in (spec.warmup, spec.start, spec.end) if m is not None]
    for m in markers:
        if m.bb_id >= len(table):
            raise UnknownBlock(f"marker bb_id {m.bb_id} not in block table")

    # one hook per distinct block; a block serving several marker kinds
    # gets a single call dispatching all of its thresholds
    by_block: dict[int, list[Marker]] = {}
    for m in markers:
        by_block.setdefault(m.bb_id, []).append(m)
    for slot, (bb_id, ms) in enumerate(by_block.items()):
        mask = 0
        thresholds = {MarkerKind.WARMUP: 0, MarkerKind.START: 0, MarkerKind.END: 0}
        for m in ms:
            mask |= _KIND_BIT[m.kind]
            thresholds[m.kind] = m.required_count
        call = (
            f"  call void @{MARKER_HOOK_SYMBOL}(i64 {slot}, i64 {mask}, "
            f"i64 {thresholds[MarkerKind.WARMUP]}, "
            f"i64 {thresholds[MarkerKind.START]}, "
            f"i64 {thresholds[MarkerKind.END]})"
        )
        module = rewrite_block(
            module, bb_id, lambda b, line=call: b.with_call_before_terminator(line)
        )

    symbols: dict[str, str] = {}
    for m in markers:
        sym = marker_symbol(m.kind, spec.interval_id)
        module = attach_block_label_symbol(module, m.bb_id, sym)
        symbols[m.kind.value] = sym

    main = module.get_function("main")
    if main is not None and main.is_definition:
        entry = main.blocks[0].with_call_at_start(f"  call void @{ROI_INIT_SYMBOL}()")
        module = module.replace_function(
            "main", replace(main, blocks=(entry,) + main.blocks[1:])
        )

    module = module.with_declarations(
        [
            f"declare void @{MARKER_HOOK_SYMBOL}(i64, i64, i64, i64, i64)",
            f"declare void @{ROI_INIT_SYMBOL}()",
        ]
    )
    return NuggetBuild(
        spec=spec, roi_action=action, module_out=module, marker_symbols=symbols
    )


def emit_nugget_runtime(spec: NuggetSpec, action: str = ACTION_TIMER) -> str:
    """The marker runtime compilation unit for one nugget."""
    mark_defs = "\n".join(
        f"__attribute__((noinline)) void {marker_symbol(m.kind, spec.interval_id)}(void) "
        '{ __asm__ volatile(""); }'
        for m in (spec.warmup, spec.start, spec.end)
        if m is not None
    )
    text = _load_template("nugget_runtime.c")
    return (
        text.replace("@NUGGET_ID@", str(spec.interval_id))
        .replace("@HAS_START@", "1" if spec.start is not None else "0")
        .replace("@ACTION_TIMER@", "1" if action == ACTION_TIMER else "0")
        .replace("@MARK_DEFS@", mark_defs)
    )
