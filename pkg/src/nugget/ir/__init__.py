from .model import (
    BlockEntry,
    BlockTable,
    IRBasicBlock,
    IRFunction,
    IRModule,
    OpaqueText,
    build_block_table,
    count_instructions,
    is_terminator,
    iter_module_blocks,
    read_block_table,
    render_block_table,
    write_block_table,
)
from .parse import parse_file, parse_module
from .transforms import attach_block_label_symbol, insert_call_before_terminator, locate_block, rewrite_block
from .link import merge_files, merge_module_texts

__all__ = [
    "BlockEntry",
    "BlockTable",
    "IRBasicBlock",
    "IRFunction",
    "IRModule",
    "OpaqueText",
    "attach_block_label_symbol",
    "build_block_table",
    "count_instructions",
    "insert_call_before_terminator",
    "is_terminator",
    "iter_module_blocks",
    "locate_block",
    "merge_files",
    "rewrite_block",
    "merge_module_texts",
    "parse_file",
    "parse_module",
    "read_block_table",
    "render_block_table",
    "write_block_table",
]
