"""Structural model of a textual LLVM IR module.

Function bodies are decomposed into basic blocks; everything else
(target lines, globals, attributes, metadata) is carried as opaque text
and reproduced verbatim on emission. Instruction lines are opaque too:
the pipeline only needs block structure and instruction counts, never
dataflow.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Union

from ..errors import MalformedIR, UnknownBlock

TERMINATOR_OPCODES = frozenset(
    {
        "ret",
        "br",
        "switch",
        "indirectbr",
        "invoke",
        "callbr",
        "resume",
        "unreachable",
        "cleanupret",
        "catchret",
        "catchswitch",
    }
)

# optional `%result = ` prefix, then the opcode token
_OPCODE_RE = re.compile(r'^\s*(?:%(?:"[^"]*"|[^\s"=]+)\s*=\s*)?([a-z][a-z_.0-9]*)')
_DBG_INTRINSIC_RE = re.compile(r"@llvm\.dbg\.")


def opcode_of(instruction: str) -> str:
    m = _OPCODE_RE.match(instruction)
    return m.group(1) if m else ""


def is_terminator(instruction: str) -> bool:
    return opcode_of(instruction) in TERMINATOR_OPCODES


def is_debug_intrinsic(instruction: str) -> bool:
    return opcode_of(instruction) in ("call", "tail", "notail", "musttail") and bool(
        _DBG_INTRINSIC_RE.search(instruction)
    )


def count_instructions(instructions: tuple[str, ...]) -> int:
    """Instructions in the unit-of-work sense: everything except debug intrinsics."""
    return sum(1 for line in instructions if not is_debug_intrinsic(line))


@dataclass(frozen=True)
class IRBasicBlock:
    """One basic block; `label_line` is the verbatim source line (None for entry)."""

    label: str
    instructions: tuple[str, ...]
    label_line: str | None = None

    def __post_init__(self):
        if not self.instructions:
            raise MalformedIR(f"block {self.label!r} is empty")
        if not is_terminator(self.instructions[-1]):
            raise MalformedIR(f"block {self.label!r} does not end in a terminator")

    @property
    def terminator_index(self) -> int:
        return len(self.instructions) - 1

    @property
    def terminator(self) -> str:
        return self.instructions[-1]

    @property
    def inst_count(self) -> int:
        return count_instructions(self.instructions)

    def with_call_before_terminator(self, call_line: str) -> "IRBasicBlock":
        """Insert a complete call instruction as the new penultimate instruction.

        Two exceptions keep the block executable and valid: a musttail
        call stays glued to its ret, and a noreturn call (call followed
        by unreachable) would swallow anything placed after it, so the
        insertion lands before the pair in both cases.
        """
        body = self.instructions
        at = len(body) - 1
        if at > 0:
            prev = opcode_of(body[at - 1])
            if prev == "musttail":
                at -= 1
            elif body[-1].strip() == "unreachable" and prev in (
                "call",
                "tail",
                "notail",
            ):
                at -= 1
        new = body[:at] + (call_line,) + body[at:]
        return replace(self, instructions=new)

    def with_call_at_start(self, call_line: str) -> "IRBasicBlock":
        """Insert after the leading phi/pad cluster, which must stay first."""
        at = 0
        while at < len(self.instructions) and opcode_of(self.instructions[at]) in (
            "phi",
            "landingpad",
            "cleanuppad",
            "catchpad",
        ):
            at += 1
        new = self.instructions[:at] + (call_line,) + self.instructions[at:]
        return replace(self, instructions=new)


@dataclass(frozen=True)
class IRFunction:
    """A definition (with blocks) or a declaration (header line only)."""

    name: str
    header: str
    is_definition: bool
    blocks: tuple[IRBasicBlock, ...] = ()

    def __post_init__(self):
        if self.is_definition and not self.blocks:
            raise MalformedIR(f"definition of @{self.name} has no blocks")
        if not self.is_definition and self.blocks:
            raise MalformedIR(f"declaration of @{self.name} has blocks")


@dataclass(frozen=True)
class OpaqueText:
    """Top-level lines preserved byte-for-byte (globals, metadata, comments, ...)."""

    lines: tuple[str, ...]


ModuleItem = Union[OpaqueText, IRFunction]


@dataclass(frozen=True)
class IRModule:
    segments: tuple[ModuleItem, ...]
    source_path: str | None = None

    @property
    def functions(self) -> tuple[IRFunction, ...]:
        return tuple(s for s in self.segments if isinstance(s, IRFunction))

    @property
    def definitions(self) -> tuple[IRFunction, ...]:
        return tuple(f for f in self.functions if f.is_definition)

    @property
    def preamble(self) -> tuple[str, ...]:
        out: list[str] = []
        for seg in self.segments:
            if isinstance(seg, IRFunction):
                break
            out.extend(seg.lines)
        return tuple(out)

    @property
    def postamble(self) -> tuple[str, ...]:
        out: list[str] = []
        for seg in reversed(self.segments):
            if isinstance(seg, IRFunction):
                break
            out[:0] = seg.lines
        return tuple(out)

    def get_function(self, name: str) -> IRFunction | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def replace_function(self, name: str, new_fn: IRFunction) -> "IRModule":
        segs = list(self.segments)
        for i, seg in enumerate(segs):
            if isinstance(seg, IRFunction) and seg.name == name:
                segs[i] = new_fn
                return replace(self, segments=tuple(segs))
        raise MalformedIR(f"no function @{name} in module")

    def map_definitions(self, fn) -> "IRModule":
        """Rebuild every definition through `fn(index, IRFunction) -> IRFunction`."""
        segs = []
        idx = 0
        for seg in self.segments:
            if isinstance(seg, IRFunction) and seg.is_definition:
                segs.append(fn(idx, seg))
                idx += 1
            else:
                segs.append(seg)
        return replace(self, segments=tuple(segs))

    def with_toplevel_lines(self, lines: list[str]) -> "IRModule":
        return replace(self, segments=self.segments + (OpaqueText(tuple(lines)),))

    def with_declarations(self, headers: list[str]) -> "IRModule":
        """Append declarations for symbols the module does not already know."""
        have = {f.name for f in self.functions}
        segs = list(self.segments)
        for header in headers:
            name = function_name_of(header)
            if name in have:
                continue
            segs.append(IRFunction(name=name, header=header, is_definition=False))
            have.add(name)
        return replace(self, segments=tuple(segs))

    def emit(self) -> str:
        out: list[str] = []
        for seg in self.segments:
            if isinstance(seg, OpaqueText):
                out.extend(seg.lines)
                continue
            out.append(seg.header)
            if not seg.is_definition:
                continue
            for i, block in enumerate(seg.blocks):
                if block.label_line is not None:
                    if i > 0:
                        out.append("")
                    out.append(block.label_line)
                out.extend(block.instructions)
            out.append("}")
        return "\n".join(out) + "\n"


_FUNCTION_NAME_RE = re.compile(r'@("(?:[^"\\]|\\.)*"|[-A-Za-z$._][-A-Za-z$._0-9]*)')


def function_name_of(header: str) -> str:
    """Function symbol named on a define/declare line, quotes stripped."""
    m = _FUNCTION_NAME_RE.search(header)
    if m is None:
        raise MalformedIR(f"cannot find function name in: {header.strip()!r}")
    name = m.group(1)
    if name.startswith('"'):
        name = name[1:-1]
    return name


def iter_module_blocks(module: IRModule) -> Iterator[tuple[IRFunction, int, IRBasicBlock]]:
    """Blocks of every definition in module order (the bb_id order)."""
    for fn in module.functions:
        if fn.is_definition:
            for i, block in enumerate(fn.blocks):
                yield fn, i, block


@dataclass(frozen=True)
class BlockEntry:
    bb_id: int
    function_name: str
    block_label: str
    inst_count: int


@dataclass(frozen=True)
class BlockTable:
    """Dense bb_id -> (function, label, instruction count), assigned in module order."""

    entries: tuple[BlockEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, bb_id: int) -> BlockEntry:
        try:
            return self.entries[bb_id]
        except IndexError:
            raise UnknownBlock(f"bb_id {bb_id} not in block table of size {len(self)}")

    def inst_count(self, bb_id: int) -> int:
        return self[bb_id].inst_count

    def total_static_instructions(self) -> int:
        return sum(e.inst_count for e in self.entries)


def build_block_table(module: IRModule) -> BlockTable:
    entries = []
    for fn, block_index, block in iter_module_blocks(module):
        entries.append(
            BlockEntry(
                bb_id=len(entries),
                function_name=fn.name,
                block_label=block.label,
                inst_count=block.inst_count,
            )
        )
    return BlockTable(entries=tuple(entries))


def render_block_table(table: BlockTable) -> str:
    lines = [
        f"{e.bb_id}\t{e.function_name}\t{e.block_label}\t{e.inst_count}"
        for e in table.entries
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_block_table(table: BlockTable, path: str | Path) -> None:
    Path(path).write_text(render_block_table(table), encoding="utf-8")


def read_block_table(path: str | Path) -> BlockTable:
    entries = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        parts = line.split("\t")
        if len(parts) != 4:
            raise MalformedIR(f"{path}:{lineno + 1}: expected 4 tab-separated fields")
        entries.append(
            BlockEntry(
                bb_id=int(parts[0]),
                function_name=parts[1],
                block_label=parts[2],
                inst_count=int(parts[3]),
            )
        )
    for i, e in enumerate(entries):
        if e.bb_id != i:
            raise MalformedIR(f"{path}: bb_ids not dense at line {i + 1}")
    return BlockTable(entries=tuple(entries))
