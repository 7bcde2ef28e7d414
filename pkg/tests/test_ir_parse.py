from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from nugget.errors import MalformedIR
from nugget.ir import build_block_table, parse_module

FIXTURE_DIR = Path(__file__).parent / "fixtures"

TWO_BLOCK_MODULE = """\
define i32 @f(i32 %0) {
  %2 = icmp sgt i32 %0, 0
  br i1 %2, label %3, label %5

3:                                                ; preds = %1
  %4 = add i32 %0, 1
  br label %5

5:                                                ; preds = %3, %1
  %6 = phi i32 [ %4, %3 ], [ 0, %1 ]
  ret i32 %6
}
"""


def test_two_block_function_structure():
    module = parse_module("define void @f() {\n  br label %x\n\nx:\n  ret void\n}\n")
    assert len(module.functions) == 1
    assert len(module.functions[0].blocks) == 2


def test_entry_block_has_synthesized_label():
    module = parse_module(TWO_BLOCK_MODULE)
    blocks = module.functions[0].blocks
    assert blocks[0].label == "entry"
    assert blocks[0].label_line is None
    assert [b.label for b in blocks[1:]] == ["3", "5"]


def test_roundtrip_idempotence():
    first = parse_module(TWO_BLOCK_MODULE).emit()
    second = parse_module(first).emit()
    assert first == second


def test_declarations_have_no_blocks():
    module = parse_module("declare i32 @printf(i8*, ...)\n")
    (fn,) = module.functions
    assert not fn.is_definition
    assert fn.blocks == ()


def test_preamble_and_postamble_preserved():
    text = "; hello\n@g = global i64 0\n\ndefine void @f() {\n  ret void\n}\n\n!0 = !{}\n"
    module = parse_module(text)
    assert module.preamble == ("; hello", "@g = global i64 0", "")
    assert module.postamble == ("", "!0 = !{}")
    assert module.emit() == text


def test_missing_terminator_rejected():
    bad = "define void @f() {\n  %1 = add i32 0, 0\n}\n"
    with pytest.raises(MalformedIR):
        parse_module(bad)


def test_unbalanced_braces_rejected():
    with pytest.raises(MalformedIR):
        parse_module("define void @f() {\n  ret void\n")


def test_duplicate_label_rejected():
    bad = "define void @f() {\n  br label %a\n\na:\n  br label %a\n\na:\n  ret void\n}\n"
    with pytest.raises(MalformedIR):
        parse_module(bad)


def test_instruction_after_terminator_rejected():
    bad = "define void @f() {\n  ret void\n  %1 = add i32 0, 0\n}\n"
    with pytest.raises(MalformedIR):
        parse_module(bad)


def test_multiline_switch_is_one_instruction():
    text = (
        "define i32 @f(i32 %0) {\n"
        "  switch i32 %0, label %2 [\n"
        "    i32 0, label %3\n"
        "    i32 9, label %3\n"
        "  ]\n"
        "\n"
        "2:\n"
        "  ret i32 1\n"
        "\n"
        "3:\n"
        "  ret i32 0\n"
        "}\n"
    )
    module = parse_module(text)
    entry = module.functions[0].blocks[0]
    assert len(entry.instructions) == 1
    assert entry.inst_count == 1
    assert module.emit() == text


def test_clang_fixture_roundtrips_byte_identically():
    text = (FIXTURE_DIR / "tiny_o1.ll").read_text()
    module = parse_module(text)
    assert module.emit() == text


def test_unreachable_is_a_terminator():
    module = parse_module("define void @f() {\n  unreachable\n}\n")
    assert module.functions[0].blocks[0].terminator_index == 0


_label = st.from_regex(r"[a-z][a-z0-9]{0,6}", fullmatch=True)
_payload = st.from_regex(r"[a-z0-9 ,%]{0,24}", fullmatch=True)


@st.composite
def _modules(draw):
    n_blocks = draw(st.integers(min_value=1, max_value=5))
    labels = draw(
        st.lists(_label, min_size=n_blocks, max_size=n_blocks, unique=True)
    )
    lines = ["define void @fn() {"]
    for i, label in enumerate(labels):
        if i > 0:
            lines.append(f"{label}:")
        for _ in range(draw(st.integers(min_value=0, max_value=3))):
            lines.append(f"  %v = add i64 0, 0 ; {draw(_payload)}")
        target = labels[draw(st.integers(0, n_blocks - 1))] if n_blocks > 1 else None
        if i + 1 < n_blocks and draw(st.booleans()):
            lines.append(f"  br label %{labels[i + 1]}")
        elif target and draw(st.booleans()):
            lines.append(f"  br label %{target}")
        else:
            lines.append("  ret void")
    lines.append("}")
    return "\n".join(lines) + "\n"


@given(_modules())
def test_parse_emit_parse_is_stable(text):
    module = parse_module(text)
    emitted = module.emit()
    again = parse_module(emitted)
    assert again.emit() == emitted
    t1 = build_block_table(module)
    t2 = build_block_table(again)
    assert t1 == t2


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=200))
def test_arbitrary_text_never_crashes_unexpectedly(text):
    try:
        parse_module(text)
    except MalformedIR:
        pass
