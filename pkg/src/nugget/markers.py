"""Marker derivation from interval profiles.

A marker pins a point in execution as (block, required global execution
count): when the block completes its required_count-th execution, the
program has reached the marked position. End markers come from the
count-stamp vector (the last block to complete in the interval); start
markers reuse the previous interval's end marker; warmup markers reuse
an earlier end marker. Relaxed end markers trade up to `d` instructions
of precision for a less frequently executed block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .errors import IndexOutOfRange
from .profiles import ProfileSet, cumulative_count
from .selection import SelectionResult


class MarkerKind(str, Enum):
    WARMUP = "warmup"
    START = "start"
    END = "end"


@dataclass(frozen=True)
class Marker:
    bb_id: int
    required_count: int
    kind: MarkerKind
    relaxed: bool = False
    slack: int = 0

    def __post_init__(self):
        if self.required_count < 1:
            raise ValueError("required_count must be >= 1")
        if (self.slack == 0) == self.relaxed:
            raise ValueError("slack == 0 iff not relaxed")


@dataclass(frozen=True)
class NuggetSpec:
    """Markers and weight for one selected interval.

    `start` is absent for interval 0, whose region of interest begins at
    program entry; `warmup` is absent when no warmup was requested or no
    earlier boundary exists.
    """

    interval_id: int
    end: Marker
    weight: float
    start: Marker | None = None
    warmup: Marker | None = None


def derive_end_marker(profiles: ProfileSet, interval: int) -> Marker:
    """Exact end marker: the block holding the interval's largest count stamp."""
    if interval < 0 or interval >= len(profiles.intervals):
        raise IndexOutOfRange(f"interval {interval} of {len(profiles.intervals)}")
    record = profiles.intervals[interval]
    bb_star = max(record.cstamp, key=lambda b: record.cstamp[b])
    return Marker(
        bb_id=bb_star,
        required_count=cumulative_count(profiles, bb_star, interval),
        kind=MarkerKind.END,
    )


def derive_relaxed_marker(profiles: ProfileSet, interval: int, search_distance: int) -> Marker:
    """End marker within `search_distance` instructions of the boundary.

    Candidates are the blocks whose last completion lies inside the
    window; the least frequently executed one wins (ties: later stamp,
    then lower bb_id).
    """
    if interval < 0 or interval >= len(profiles.intervals):
        raise IndexOutOfRange(f"interval {interval} of {len(profiles.intervals)}")
    if search_distance < 0:
        raise ValueError("search_distance must be >= 0")
    record = profiles.intervals[interval]
    boundary = profiles.interval_end(interval)
    candidates = [b for b, stamp in record.cstamp.items() if stamp >= boundary - search_distance]
    chosen = min(candidates, key=lambda b: (record.bbv[b], -record.cstamp[b], b))
    slack = boundary - record.cstamp[chosen]
    return Marker(
        bb_id=chosen,
        required_count=cumulative_count(profiles, chosen, interval),
        kind=MarkerKind.END,
        relaxed=slack > 0,
        slack=slack,
    )


def relaxed_marker_diagnostics(
    profiles: ProfileSet, interval: int, search_distance: int
) -> dict[str, list[int]]:
    """Candidate rankings for a relaxed marker, for overhead analysis.

    `by_interval_bbv` is the selection order actually used; `by_cumulative`
    ranks by total executions before the boundary, which is what the
    counting hook's hardware cost scales with. The two can disagree.
    """
    if interval < 0 or interval >= len(profiles.intervals):
        raise IndexOutOfRange(f"interval {interval} of {len(profiles.intervals)}")
    record = profiles.intervals[interval]
    boundary = profiles.interval_end(interval)
    candidates = [
        b for b, stamp in record.cstamp.items() if stamp >= boundary - search_distance
    ]
    return {
        "by_interval_bbv": sorted(
            candidates, key=lambda b: (record.bbv[b], -record.cstamp[b], b)
        ),
        "by_cumulative": sorted(
            candidates,
            key=lambda b: (cumulative_count(profiles, b, interval), -record.cstamp[b], b),
        ),
    }


def build_nugget_spec(
    profiles: ProfileSet,
    selection: SelectionResult,
    warmup_intervals: int,
    search_distance: int = 0,
) -> list[NuggetSpec]:
    if warmup_intervals < 0:
        raise ValueError("warmup_intervals must be >= 0")
    specs = []
    for chosen in selection.chosen:
        i = chosen.interval_id
        if search_distance > 0:
            end = derive_relaxed_marker(profiles, i, search_distance)
        else:
            end = derive_end_marker(profiles, i)
        start = None
        if i > 0:
            start = replace(derive_end_marker(profiles, i - 1), kind=MarkerKind.START)
        warmup = None
        if warmup_intervals > 0 and i >= warmup_intervals + 1:
            warmup = replace(
                derive_end_marker(profiles, i - warmup_intervals - 1),
                kind=MarkerKind.WARMUP,
            )
        specs.append(
            NuggetSpec(
                interval_id=i,
                end=end,
                weight=chosen.weight,
                start=start,
                warmup=warmup,
            )
        )
    return specs


def _marker_to_json(marker: Marker | None):
    if marker is None:
        return None
    return {
        "kind": marker.kind.value,
        "bb_id": marker.bb_id,
        "required_count": marker.required_count,
        "relaxed": marker.relaxed,
        "slack": marker.slack,
    }


def _marker_from_json(obj) -> Marker | None:
    if obj is None:
        return None
    return Marker(
        bb_id=obj["bb_id"],
        required_count=obj["required_count"],
        kind=MarkerKind(obj["kind"]),
        relaxed=obj["relaxed"],
        slack=obj["slack"],
    )


def specs_to_json(specs: list[NuggetSpec]) -> str:
    payload = [
        {
            "interval_id": s.interval_id,
            "weight": s.weight,
            "warmup": _marker_to_json(s.warmup),
            "start": _marker_to_json(s.start),
            "end": _marker_to_json(s.end),
        }
        for s in specs
    ]
    return json.dumps(payload, indent=2) + "\n"


def specs_from_json(text: str) -> list[NuggetSpec]:
    return [
        NuggetSpec(
            interval_id=obj["interval_id"],
            weight=obj["weight"],
            warmup=_marker_from_json(obj["warmup"]),
            start=_marker_from_json(obj["start"]),
            end=_marker_from_json(obj["end"]),
        )
        for obj in json.loads(text)
    ]


def write_specs(specs: list[NuggetSpec], path: str | Path) -> None:
    Path(path).write_text(specs_to_json(specs), encoding="utf-8")


def read_specs(path: str | Path) -> list[NuggetSpec]:
    return specs_from_json(Path(path).read_text(encoding="utf-8"))
