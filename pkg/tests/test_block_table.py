from pathlib import Path

import pytest

from nugget.errors import MalformedIR, UnknownBlock
from nugget.ir import (
    build_block_table,
    parse_module,
    read_block_table,
    write_block_table,
)

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def _module(body: str):
    return parse_module(f"define void @f() {{\n{body}\n}}\n")


def test_counts_include_terminator():
    m = _module("  %1 = add i64 0, 0\n  %2 = mul i64 %1, 2\n  br label %x\n\nx:\n  ret void")
    table = build_block_table(m)
    assert [e.inst_count for e in table.entries] == [3, 1]


def test_debug_intrinsics_excluded():
    m = _module(
        '  call void @llvm.dbg.value(metadata i64 0, metadata !1, metadata !DIExpression())\n'
        "  %1 = add i64 0, 0\n"
        "  ret void"
    )
    table = build_block_table(m)
    assert table.entries[0].inst_count == 2


def test_lifetime_intrinsics_are_counted():
    m = _module(
        "  call void @llvm.lifetime.start.p0i8(i64 8, i8* null)\n"
        "  ret void"
    )
    assert build_block_table(m).entries[0].inst_count == 2


def test_dense_ids_in_module_order():
    text = (
        "define void @a() {\n  br label %x\n\nx:\n  ret void\n}\n"
        "define void @b() {\n  ret void\n}\n"
    )
    table = build_block_table(parse_module(text))
    assert [(e.bb_id, e.function_name, e.block_label) for e in table.entries] == [
        (0, "a", "entry"),
        (1, "a", "x"),
        (2, "b", "entry"),
    ]


def test_same_bytes_same_table():
    text = (FIXTURE_DIR / "tiny_o1.ll").read_text()
    assert build_block_table(parse_module(text)) == build_block_table(parse_module(text))


def test_external_fixture_matches_hand_count():
    # tiny_o1.ll was produced by clang -O1 from a short C source; counts
    # below are a manual tally of its non-debug instruction lines.
    table = build_block_table(parse_module((FIXTURE_DIR / "tiny_o1.ll").read_text()))
    assert [(e.function_name, e.block_label, e.inst_count) for e in table.entries] == [
        ("gate", "entry", 2),
        ("gate", "3", 2),
        ("gate", "5", 11),
    ]
    assert table.total_static_instructions() == 15


def test_total_is_sum_of_entries():
    m = parse_module((FIXTURE_DIR / "tiny_o1.ll").read_text())
    table = build_block_table(m)
    assert table.total_static_instructions() == sum(e.inst_count for e in table.entries)


def test_map_roundtrip(tmp_path):
    table = build_block_table(parse_module((FIXTURE_DIR / "tiny_o1.ll").read_text()))
    path = tmp_path / "bbid.map"
    write_block_table(table, path)
    assert read_block_table(path) == table
    lines = path.read_text().splitlines()
    assert lines[0] == "0\tgate\tentry\t2"
    assert all(len(l.split("\t")) == 4 for l in lines)


def test_unknown_block_raises():
    table = build_block_table(parse_module((FIXTURE_DIR / "tiny_o1.ll").read_text()))
    with pytest.raises(UnknownBlock):
        table[99]


def test_map_rejects_sparse_ids(tmp_path):
    path = tmp_path / "bad.map"
    path.write_text("0\tf\tentry\t2\n2\tf\tx\t1\n")
    with pytest.raises(MalformedIR):
        read_block_table(path)
