import pytest
from hypothesis import given, strategies as st

from nugget.analysis import AnalysisConfig, replay_trace
from nugget.errors import BadMagic, BlockTableMismatch, CorruptRecord, IndexOutOfRange
from nugget.ir import BlockEntry, BlockTable
from nugget.profiles import (
    IntervalProfile,
    ProfileSet,
    cumulative_count,
    profile_from_bytes,
    profile_to_bytes,
    read_profile,
    total_instructions,
    write_profile,
)


def _table(*counts):
    return BlockTable(
        entries=tuple(
            BlockEntry(bb_id=i, function_name="f", block_label=str(i), inst_count=c)
            for i, c in enumerate(counts)
        )
    )


def _pset(table, *intervals, interval_size=100):
    return ProfileSet(interval_size=interval_size, intervals=tuple(intervals), block_table=table)


def test_roundtrip_identity(tmp_path):
    table = _table(7)
    pset = replay_trace([0] * 40, table, AnalysisConfig(100))
    path = tmp_path / "p.profile"
    write_profile(pset, path)
    again = read_profile(path, table)
    assert again == pset
    write_profile(again, path)
    assert read_profile(path, table) == pset


def test_seven_instruction_fixture_shape():
    table = _table(7)
    pset = replay_trace([0] * 20, table, AnalysisConfig(100))
    assert pset.intervals[0].bbv == {0: 15}
    assert pset.intervals[0].actual_size == 105
    assert pset.intervals[1].partial
    assert pset.intervals[1].actual_size == 35


def test_bad_magic():
    with pytest.raises(BadMagic):
        profile_from_bytes(b"NOTPROF1" + b"\0" * 16, _table(1))


def test_weight_mismatch_is_corrupt():
    table = _table(7)
    pset = replay_trace([0] * 20, table, AnalysisConfig(100))
    data = bytearray(profile_to_bytes(pset))
    data[24:32] = (9999).to_bytes(8, "little")  # actual_size of record 0
    with pytest.raises(CorruptRecord):
        profile_from_bytes(bytes(data), table)


def test_block_out_of_range_is_table_mismatch():
    table = _table(7)
    pset = replay_trace([0] * 20, table, AnalysisConfig(100))
    data = profile_to_bytes(pset)
    with pytest.raises(BlockTableMismatch):
        profile_from_bytes(data, _table(7, 3))  # header says 1 block, table has 2


def test_cumulative_count_absent_block_is_zero():
    table = _table(5, 5)
    pset = replay_trace([0, 0, 0, 0], table, AnalysisConfig(10))
    assert cumulative_count(pset, 1, 0) == 0


def test_cumulative_count_sums_prefix():
    table = _table(5)
    pset = replay_trace([0] * 7, table, AnalysisConfig(10))
    # intervals of two executions each (10 instructions)
    assert cumulative_count(pset, 0, 0) == 2
    assert cumulative_count(pset, 0, 1) == 4
    assert cumulative_count(pset, 0, 2) == 6


def test_cumulative_count_index_checked():
    table = _table(5)
    pset = replay_trace([0] * 4, table, AnalysisConfig(10))
    with pytest.raises(IndexOutOfRange):
        cumulative_count(pset, 0, 99)


def test_total_instructions_empty():
    assert total_instructions(_pset(_table(3))) == 0


def test_total_instructions_sums_sizes():
    table = _table(7)
    pset = replay_trace([0] * 35, table, AnalysisConfig(100))
    sizes = [iv.actual_size for iv in pset.intervals]
    assert total_instructions(pset) == sum(sizes) == 245


def test_total_matches_aggregated_bbv():
    from nugget.profiles import aggregate_bbv

    table = _table(3, 4, 5)
    trace = [0, 1, 2, 1, 0, 2, 2, 1, 0, 1] * 12
    pset = replay_trace(trace, table, AnalysisConfig(37))
    agg = aggregate_bbv(pset)
    assert total_instructions(pset) == sum(
        count * table.inst_count(b) for b, count in agg.items()
    )


@given(
    trace=st.lists(st.integers(0, 3), min_size=1, max_size=200),
    size=st.integers(1, 40),
)
def test_write_read_identity_property(trace, size):
    table = _table(2, 3, 5, 7)
    pset = replay_trace(trace, table, AnalysisConfig(size))
    assert profile_from_bytes(profile_to_bytes(pset), table) == pset


@given(
    trace=st.lists(st.integers(0, 3), min_size=1, max_size=200),
    size=st.integers(1, 40),
)
def test_stamps_strictly_ordered(trace, size):
    table = _table(2, 3, 5, 7)
    pset = replay_trace(trace, table, AnalysisConfig(size))
    for iv in pset.intervals:
        stamps = list(iv.cstamp.values())
        assert len(set(stamps)) == len(stamps)


def test_partial_only_at_end_enforced():
    table = _table(5)
    first = IntervalProfile(0, 5, True, {0: 1}, {0: 5})
    second = IntervalProfile(1, 5, False, {0: 1}, {0: 10})
    data = profile_to_bytes(_pset(table, first, second, interval_size=5))
    with pytest.raises(CorruptRecord):
        profile_from_bytes(data, table)


def test_stamp_outside_interval_rejected():
    table = _table(5)
    bad = IntervalProfile(0, 5, False, {0: 1}, {0: 99})
    data = profile_to_bytes(_pset(table, bad, interval_size=5))
    with pytest.raises(CorruptRecord):
        profile_from_bytes(data, table)
