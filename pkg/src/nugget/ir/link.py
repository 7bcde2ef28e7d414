"""Textual module merger.

Merges several parsed modules into one by concatenation with conflict
repair: attribute-group and metadata ids are renumbered, module-local
(private/internal) symbols are renamed on collision, and duplicate
declarations and type definitions are dropped. Module-level metadata
(target lines, module flags, ident) is taken from the first module,
which assumes all inputs came from the same frontend configuration.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..errors import MalformedIR
from .model import IRModule, function_name_of
from .parse import parse_module

_ATTR_DEF_RE = re.compile(r"^attributes #(\d+) =")
_META_DEF_RE = re.compile(r"^!(\d+) = ")
_NAMED_META_RE = re.compile(r"^![-A-Za-z$._][-A-Za-z$._0-9]*\s*=")
_TYPE_DEF_RE = re.compile(r"^(%[-A-Za-z$._0-9]+) = type ")
_GLOBAL_DEF_RE = re.compile(r"^@([-A-Za-z$._][-A-Za-z$._0-9]*)\s*=")
_LOCAL_LINKAGE_RE = re.compile(r"\b(private|internal)\b")
_SYMBOL_CHAR = "[-A-Za-z$._0-9]"

_DROP_PREFIXES = ("; ModuleID", "source_filename", "target datalayout", "target triple")


def _map_unquoted(line: str, fn) -> str:
    """Apply fn only to the spans of a line outside quoted strings."""
    parts = line.split('"')
    for i in range(0, len(parts), 2):
        parts[i] = fn(parts[i])
    return '"'.join(parts)


def _sub_all_lines(text: str, fn) -> str:
    return "\n".join(_map_unquoted(line, fn) for line in text.splitlines())


def _renumber(text: str, pattern: str, mapping: dict[int, int]) -> str:
    if not mapping:
        return text
    token = re.compile(pattern)

    def one(span: str) -> str:
        return token.sub(
            lambda m: m.group(0)[0] + str(mapping.get(int(m.group(1)), int(m.group(1)))),
            span,
        )

    return _sub_all_lines(text, one)


def _rename_symbol(text: str, old: str, new: str) -> str:
    token = re.compile(f"@{re.escape(old)}(?!{_SYMBOL_CHAR})")
    return _sub_all_lines(text, lambda span: token.sub(f"@{new}", span))


def _toplevel_lines(module: IRModule):
    for seg_lines in (module.preamble, module.postamble):
        yield from seg_lines


def _defined_symbols(module: IRModule) -> dict[str, bool]:
    """Global objects and functions defined by the module -> is module-local."""
    out: dict[str, bool] = {}
    for line in _toplevel_lines(module):
        m = _GLOBAL_DEF_RE.match(line)
        if m:
            linkage = line.split("=", 1)[1]
            out[m.group(1)] = bool(_LOCAL_LINKAGE_RE.search(linkage.split('"')[0][:80]))
    for fn in module.functions:
        if fn.is_definition:
            out[fn.name] = bool(_LOCAL_LINKAGE_RE.search(fn.header.split("@", 1)[0]))
    return out


def merge_module_texts(texts: list[str]) -> str:
    if not texts:
        raise MalformedIR("nothing to merge")
    modules = [parse_module(t) for t in texts]
    canon = [m.emit() for m in modules]
    if len(modules) == 1:
        return canon[0]

    all_defined_fns = {
        f.name for m in modules for f in m.functions if f.is_definition
    }

    next_attr = 0
    next_meta = 0
    taken: set[str] = set()
    declared: set[str] = set()
    seen_types: dict[str, str] = {}
    out_lines: list[str] = []

    for idx, (module, text) in enumerate(zip(modules, canon)):
        lines = text.splitlines()
        attr_ids = sorted({int(m.group(1)) for l in lines if (m := _ATTR_DEF_RE.match(l))})
        meta_ids = sorted({int(m.group(1)) for l in lines if (m := _META_DEF_RE.match(l))})
        attr_map = {old: next_attr + i for i, old in enumerate(attr_ids)}
        meta_map = {old: next_meta + i for i, old in enumerate(meta_ids)}
        next_attr += len(attr_ids)
        next_meta += len(meta_ids)
        text = _renumber(text, r"#(\d+)", attr_map)
        text = _renumber(text, r"!(\d+)", meta_map)

        for sym, is_local in sorted(_defined_symbols(module).items()):
            if sym in taken:
                if not is_local:
                    raise MalformedIR(f"duplicate external symbol @{sym} while merging")
                new = f"{sym}.{idx}"
                while new in taken:
                    new += "_"
                text = _rename_symbol(text, sym, new)
                taken.add(new)
            else:
                taken.add(sym)

        kept: list[str] = []
        for line in text.splitlines():
            stripped = line.strip()
            if idx > 0 and stripped.startswith(_DROP_PREFIXES):
                continue
            if idx > 0 and _NAMED_META_RE.match(line):
                continue
            m = _TYPE_DEF_RE.match(line)
            if m:
                name = m.group(1)
                if name in seen_types:
                    if seen_types[name] != line:
                        raise MalformedIR(f"conflicting type definition {name}")
                    continue
                seen_types[name] = line
                kept.append(line)
                continue
            if stripped.startswith("declare"):
                name = function_name_of(line)
                if name in all_defined_fns or name in declared:
                    continue
                declared.add(name)
            kept.append(line)
        while kept and not kept[-1].strip():
            kept.pop()
        if out_lines:
            out_lines.append("")
        out_lines.extend(kept)

    merged = "\n".join(out_lines) + "\n"
    result = parse_module(merged)
    names = [f.name for f in result.functions if f.is_definition]
    if len(names) != len(set(names)):
        raise MalformedIR("merge produced duplicate function definitions")
    return result.emit()


def merge_files(paths: list[str | Path], output: str | Path) -> None:
    texts = [Path(p).read_text(encoding="utf-8") for p in paths]
    Path(output).write_text(merge_module_texts(texts), encoding="utf-8")
