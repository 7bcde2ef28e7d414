"""Interval profile file format and queries.

Binary little-endian format, produced identically by the native
analysis runtime and the reference interpreter:

    header: magic "NUGPROF1", interval_size u64, block_count u64
    record: interval_id u64, actual_size u64, flags u32 (bit0 partial),
            entry_count u32, then entry_count x (bb_id u64, count u64,
            cstamp u64) in ascending bb_id order
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

from .errors import BadMagic, BlockTableMismatch, CorruptRecord, IndexOutOfRange
from .ir import BlockTable

MAGIC = b"NUGPROF1"
_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")
FLAG_PARTIAL = 0x1


@dataclass(frozen=True)
class IntervalProfile:
    """One discovered interval: its size and sparse behavioral signature."""

    interval_id: int
    actual_size: int
    partial: bool
    bbv: dict[int, int]
    cstamp: dict[int, int]


@dataclass(frozen=True)
class ProfileSet:
    interval_size: int
    intervals: tuple[IntervalProfile, ...]
    block_table: BlockTable

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def full_intervals(self) -> tuple[IntervalProfile, ...]:
        return tuple(iv for iv in self.intervals if not iv.partial)

    @property
    def partial_interval(self) -> IntervalProfile | None:
        if self.intervals and self.intervals[-1].partial:
            return self.intervals[-1]
        return None

    def interval_end(self, index: int) -> int:
        """Global counter value at which interval `index` ended."""
        if index < 0 or index >= len(self.intervals):
            raise IndexOutOfRange(f"interval {index} of {len(self.intervals)}")
        return sum(iv.actual_size for iv in self.intervals[: index + 1])

    def interval_start(self, index: int) -> int:
        return self.interval_end(index) - self.intervals[index].actual_size


def total_instructions(profiles: ProfileSet) -> int:
    return sum(iv.actual_size for iv in profiles.intervals)


def cumulative_count(profiles: ProfileSet, bb_id: int, through_interval: int) -> int:
    """Executions of bb_id from program start through the end of an interval."""
    if through_interval < 0 or through_interval >= len(profiles.intervals):
        raise IndexOutOfRange(
            f"interval {through_interval} of {len(profiles.intervals)}"
        )
    return sum(
        iv.bbv.get(bb_id, 0) for iv in profiles.intervals[: through_interval + 1]
    )


def aggregate_bbv(profiles: ProfileSet) -> dict[int, int]:
    """Whole-run execution count per block."""
    totals: dict[int, int] = {}
    for iv in profiles.intervals:
        for bb_id, count in iv.bbv.items():
            totals[bb_id] = totals.get(bb_id, 0) + count
    return totals


def write_profile(profiles: ProfileSet, path: str | Path) -> None:
    Path(path).write_bytes(profile_to_bytes(profiles))


def profile_to_bytes(profiles: ProfileSet) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(_U64.pack(profiles.interval_size))
    out.write(_U64.pack(len(profiles.block_table)))
    for iv in profiles.intervals:
        out.write(_U64.pack(iv.interval_id))
        out.write(_U64.pack(iv.actual_size))
        out.write(_U32.pack(FLAG_PARTIAL if iv.partial else 0))
        out.write(_U32.pack(len(iv.bbv)))
        for bb_id in sorted(iv.bbv):
            out.write(_U64.pack(bb_id))
            out.write(_U64.pack(iv.bbv[bb_id]))
            out.write(_U64.pack(iv.cstamp[bb_id]))
    return out.getvalue()


def read_profile(path: str | Path, table: BlockTable) -> ProfileSet:
    return profile_from_bytes(Path(path).read_bytes(), table)


def profile_from_bytes(data: bytes, table: BlockTable) -> ProfileSet:
    buf = io.BytesIO(data)
    if buf.read(8) != MAGIC:
        raise BadMagic("not a profile file (bad magic)")
    header = buf.read(16)
    if len(header) != 16:
        raise CorruptRecord(-1, "truncated header")
    interval_size = _U64.unpack_from(header, 0)[0]
    block_count = _U64.unpack_from(header, 8)[0]
    if block_count != len(table):
        raise BlockTableMismatch(
            f"profile has {block_count} blocks, table has {len(table)}"
        )

    intervals: list[IntervalProfile] = []
    position = 0
    while True:
        head = buf.read(24)
        if not head:
            break
        if len(head) != 24:
            raise CorruptRecord(len(intervals), "truncated record header")
        interval_id = _U64.unpack_from(head, 0)[0]
        actual_size = _U64.unpack_from(head, 8)[0]
        flags = _U32.unpack_from(head, 16)[0]
        entry_count = _U32.unpack_from(head, 20)[0]
        partial = bool(flags & FLAG_PARTIAL)
        if interval_id != len(intervals):
            raise CorruptRecord(interval_id, f"expected interval {len(intervals)}")
        if intervals and intervals[-1].partial:
            raise CorruptRecord(interval_id, "record after a partial interval")
        bbv: dict[int, int] = {}
        cstamp: dict[int, int] = {}
        weighted = 0
        for _ in range(entry_count):
            entry = buf.read(24)
            if len(entry) != 24:
                raise CorruptRecord(interval_id, "truncated entry")
            bb_id = _U64.unpack_from(entry, 0)[0]
            count = _U64.unpack_from(entry, 8)[0]
            stamp = _U64.unpack_from(entry, 16)[0]
            if bb_id >= len(table):
                raise BlockTableMismatch(f"bb_id {bb_id} out of range")
            if bb_id in bbv:
                raise CorruptRecord(interval_id, f"duplicate entry for bb {bb_id}")
            if count == 0:
                raise CorruptRecord(interval_id, f"zero count for bb {bb_id}")
            if not position < stamp <= position + actual_size:
                raise CorruptRecord(
                    interval_id, f"stamp {stamp} for bb {bb_id} outside interval"
                )
            bbv[bb_id] = count
            cstamp[bb_id] = stamp
            weighted += count * table.inst_count(bb_id)
        if weighted != actual_size:
            raise CorruptRecord(
                interval_id,
                f"bbv weights sum to {weighted}, actual_size is {actual_size}",
            )
        if len(set(cstamp.values())) != len(cstamp):
            raise CorruptRecord(interval_id, "tied count stamps")
        intervals.append(
            IntervalProfile(
                interval_id=interval_id,
                actual_size=actual_size,
                partial=partial,
                bbv=bbv,
                cstamp=cstamp,
            )
        )
        position += actual_size
    return ProfileSet(
        interval_size=interval_size,
        intervals=tuple(intervals),
        block_table=table,
    )
