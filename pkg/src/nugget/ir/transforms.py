"""Insertion transforms used by both instrumentation passes."""

from __future__ import annotations

from dataclasses import replace

from ..errors import UnknownBlock
from .model import IRBasicBlock, IRModule, iter_module_blocks


def insert_call_before_terminator(block: IRBasicBlock, call_line: str) -> IRBasicBlock:
    return block.with_call_before_terminator(call_line)


def locate_block(module: IRModule, bb_id: int) -> tuple[str, int]:
    """(function name, block index) for a bb_id, per module-order id assignment."""
    if bb_id < 0:
        raise UnknownBlock(f"bb_id {bb_id} is negative")
    for i, (fn, block_index, _) in enumerate(iter_module_blocks(module)):
        if i == bb_id:
            return fn.name, block_index
    raise UnknownBlock(f"bb_id {bb_id} not present in module")


def rewrite_block(module: IRModule, bb_id: int, rewrite) -> IRModule:
    fn_name, block_index = locate_block(module, bb_id)
    fn = module.get_function(fn_name)
    blocks = list(fn.blocks)
    blocks[block_index] = rewrite(blocks[block_index])
    return module.replace_function(fn_name, replace(fn, blocks=tuple(blocks)))


def attach_block_label_symbol(module: IRModule, bb_id: int, symbol: str) -> IRModule:
    """Mark a block with an assembly-visible symbol.

    The mark is a call, at block start, to a declared external no-op
    function named `symbol`; the harness builds that function without
    inlining, so the linked binary's symbol table reports its address.
    """
    call_line = f"  call void @{symbol}()"
    module = rewrite_block(module, bb_id, lambda b: b.with_call_at_start(call_line))
    return module.with_declarations([f"declare void @{symbol}()"])
