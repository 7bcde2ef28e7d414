"""Parser for the supported textual LLVM IR subset.

Function bodies must be block-per-label shaped: an optional unlabeled
entry block followed by labeled blocks, each ending in exactly one
terminator. Top-level constructs other than define/declare are carried
through as opaque lines.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..errors import MalformedIR
from .model import (
    IRBasicBlock,
    IRFunction,
    IRModule,
    OpaqueText,
    function_name_of,
    is_terminator,
)

_LABEL_RE = re.compile(r'^("(?:[^"\\]|\\.)*"|[-A-Za-z$._0-9]+):\s*(;.*)?$')

ENTRY_LABEL = "entry"


def _bracket_depth(line: str, depth: int) -> int:
    """Track [ ] nesting across a line, ignoring brackets inside quoted strings."""
    in_string = False
    escaped = False
    for ch in line:
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
    return depth


def _strip_comment(line: str) -> str:
    """Drop a trailing ; comment, respecting quoted strings."""
    in_string = False
    escaped = False
    for i, ch in enumerate(line):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == ";":
            return line[:i]
    return line


def _parse_body(name: str, body: list[str]) -> tuple[IRBasicBlock, ...]:
    blocks: list[IRBasicBlock] = []
    seen_labels: set[str] = set()
    label = ENTRY_LABEL
    label_line: str | None = None
    instructions: list[str] = []

    def close_block():
        nonlocal instructions
        if not instructions:
            if label_line is None and not blocks:
                raise MalformedIR(f"@{name}: definition has an empty body")
            raise MalformedIR(f"@{name}: block {label!r} has no instructions")
        if not is_terminator(instructions[-1]):
            raise MalformedIR(f"@{name}: block {label!r} has no terminator")
        blocks.append(
            IRBasicBlock(
                label=label,
                instructions=tuple(instructions),
                label_line=label_line,
            )
        )
        instructions = []

    i = 0
    while i < len(body):
        line = body[i]
        i += 1
        stripped = line.strip()
        if not stripped or stripped.startswith(";"):
            continue
        m = _LABEL_RE.match(line)
        if m:
            if instructions or blocks:
                close_block()
            elif label_line is not None:
                raise MalformedIR(f"@{name}: block {label!r} has no instructions")
            label = m.group(1)
            if label.startswith('"'):
                label = label[1:-1]
            if label in seen_labels:
                raise MalformedIR(f"@{name}: duplicate block label {label!r}")
            seen_labels.add(label)
            label_line = line
            continue
        if instructions and is_terminator(instructions[-1]):
            raise MalformedIR(
                f"@{name}: instruction after terminator in block {label!r}"
            )
        # join continuation lines of multi-line instructions (switch case lists)
        depth = _bracket_depth(_strip_comment(line), 0)
        text = line
        while depth > 0:
            if i >= len(body):
                raise MalformedIR(f"@{name}: unterminated instruction in {label!r}")
            cont = body[i]
            i += 1
            text += "\n" + cont
            depth = _bracket_depth(_strip_comment(cont), depth)
        instructions.append(text)

    close_block()
    return tuple(blocks)


def parse_module(text: str, source_path: str | None = None) -> IRModule:
    lines = text.splitlines()
    segments: list = []
    opaque: list[str] = []

    def flush_opaque():
        nonlocal opaque
        if opaque:
            segments.append(OpaqueText(tuple(opaque)))
            opaque = []

    i = 0
    while i < len(lines):
        line = lines[i]
        stripped = line.strip()
        if stripped.startswith("define") and stripped.endswith("{"):
            header = line
            body: list[str] = []
            i += 1
            while i < len(lines) and lines[i].rstrip() != "}":
                body.append(lines[i])
                i += 1
            if i >= len(lines):
                raise MalformedIR(f"unbalanced braces in @{function_name_of(header)}")
            i += 1
            name = function_name_of(header)
            flush_opaque()
            segments.append(
                IRFunction(
                    name=name,
                    header=header,
                    is_definition=True,
                    blocks=_parse_body(name, body),
                )
            )
            continue
        if stripped.startswith("declare"):
            flush_opaque()
            segments.append(
                IRFunction(
                    name=function_name_of(line),
                    header=line,
                    is_definition=False,
                )
            )
            i += 1
            continue
        if stripped.startswith("define"):
            raise MalformedIR(f"unsupported define formatting: {stripped!r}")
        opaque.append(line)
        i += 1
    flush_opaque()
    return IRModule(segments=tuple(segments), source_path=source_path)


def parse_file(path: str | Path) -> IRModule:
    path = Path(path)
    return parse_module(path.read_text(encoding="utf-8"), source_path=str(path))
