"""External toolchain invocation.

Every stage is a command template (JSON-configurable) with placeholder
tokens: {source}, {input}, {output}, {opt}, and {inputs} which splices a
file list. The default configuration drives clang for IR generation and
final compilation and this package's own textual merger for IR linking,
since plain clang installs ship no standalone IR linker.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ToolchainFailure

DEFAULT_BACKEND_OPT = "-O2"


@dataclass(frozen=True)
class ToolchainConfig:
    source_to_ir: tuple[str, ...]
    ir_link: tuple[str, ...]
    ir_optimize: tuple[str, ...]
    compile_link: tuple[str, ...]

    def check_resolvable(self) -> None:
        for f in fields(self):
            head = getattr(self, f.name)[0]
            if shutil.which(head) is None and not Path(head).exists():
                raise ToolchainFailure(f"{f.name}: tool not found: {head}")


def default_toolchain() -> ToolchainConfig:
    return ToolchainConfig(
        source_to_ir=("clang", "-S", "-emit-llvm", "-O2", "{source}", "-o", "{output}"),
        ir_link=(sys.executable, "-m", "nugget", "ir-link", "{inputs}", "-o", "{output}"),
        ir_optimize=("cp", "{input}", "{output}"),
        compile_link=("clang", "{opt}", "{inputs}", "-o", "{output}", "-lpthread", "-lm"),
    )


def load_toolchain(path: str | Path) -> ToolchainConfig:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return ToolchainConfig(
        source_to_ir=tuple(obj["source_to_ir"]),
        ir_link=tuple(obj["ir_link"]),
        ir_optimize=tuple(obj["ir_optimize"]),
        compile_link=tuple(obj["compile_link"]),
    )


def save_toolchain(config: ToolchainConfig, path: str | Path) -> None:
    payload = {f.name: list(getattr(config, f.name)) for f in fields(config)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def expand_template(template: tuple[str, ...], **subst) -> list[str]:
    argv: list[str] = []
    for token in template:
        if token == "{inputs}":
            argv.extend(str(p) for p in subst["inputs"])
            continue
        for key, value in subst.items():
            if key == "inputs":
                continue
            token = token.replace("{" + key + "}", str(value))
        argv.append(token)
    return argv


def run_tool(argv: list[str], what: str) -> None:
    head = argv[0]
    if shutil.which(head) is None and not Path(head).exists():
        raise ToolchainFailure(f"{what}: tool not found: {head}")
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-8:]
        raise ToolchainFailure(
            f"{what}: {' '.join(argv)} exited {proc.returncode}\n" + "\n".join(tail)
        )


def source_to_ir(config: ToolchainConfig, source: Path, output: Path) -> None:
    run_tool(expand_template(config.source_to_ir, source=source, output=output), "source_to_ir")


def link_ir(config: ToolchainConfig, inputs: list[Path], output: Path) -> None:
    run_tool(expand_template(config.ir_link, inputs=inputs, output=output), "ir_link")


def optimize_ir(config: ToolchainConfig, input_path: Path, output: Path) -> None:
    run_tool(expand_template(config.ir_optimize, input=input_path, output=output), "ir_optimize")


def compile_binary(
    config: ToolchainConfig,
    inputs: list[Path],
    output: Path,
    opt: str = DEFAULT_BACKEND_OPT,
) -> None:
    run_tool(
        expand_template(config.compile_link, inputs=inputs, output=output, opt=opt),
        "compile_link",
    )
