"""Employment spells and day-level interval arithmetic.

A spell is the maximal merged interval during which a person holds any
license at a firm: overlapping or exactly adjacent license rows (gap of
zero days) collapse into one spell, and any row with an open end date makes
the containing spell open.

Day counting is inclusive of both endpoints: ``[d1, d2]`` covers
``d2 - d1 + 1`` days.  The activity predicate is strict on both sides:
active at *t* means ``start < t`` and (open end or ``end > t``).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Sequence

from .ingest import LicenseRecord

__all__ = [
    "EmploymentSpell",
    "EntityTimeline",
    "build_spells",
    "is_active",
    "overlap_days",
    "person_timelines",
    "person_firm_timelines",
    "merge_intervals",
]

Interval = tuple[date, "date | None"]


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Union of day sets as maximal merged intervals (adjacency merges too)."""
    items = sorted(intervals, key=lambda iv: iv[0])
    merged: list[Interval] = []
    for start, end in items:
        if merged:
            last_start, last_end = merged[-1]
            if last_end is None:
                continue  # open interval already swallows everything after
            if start <= last_end + timedelta(days=1):
                if end is None or end > last_end:
                    merged[-1] = (last_start, end)
                continue
        merged.append((start, end))
    return merged


def _clip_before(intervals: Sequence[Interval], t: date | None) -> list[tuple[int, int]]:
    """Intervals as inclusive ordinal pairs, truncated to days strictly before *t*.

    Open ends require *t*; without it they cannot be bounded.
    """
    out: list[tuple[int, int]] = []
    for start, end in intervals:
        s = start.toordinal()
        if end is None:
            if t is None:
                raise ValueError("open interval needs a truncation date")
            e = t.toordinal() - 1
        else:
            e = end.toordinal()
            if t is not None:
                e = min(e, t.toordinal() - 1)
        if s <= e:
            out.append((s, e))
    return out


def _intersect_days(a: Sequence[tuple[int, int]], b: Sequence[tuple[int, int]]) -> int:
    """Total days in the intersection of two sorted disjoint interval lists."""
    days = 0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            days += hi - lo + 1
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return days


@dataclass(frozen=True, slots=True)
class EmploymentSpell:
    """Maximal merged person-at-firm interval; ``end`` of None = still active."""

    person_id: str
    firm_id: str
    start: date
    end: date | None


@dataclass(frozen=True, slots=True)
class EntityTimeline:
    """Merged activity intervals of one entity (person, firm, or person-at-firm)."""

    entity_id: str
    spells: tuple[Interval, ...]

    @property
    def total_duration_days(self) -> int:
        """Days in the union of the spells.  Requires all spells closed."""
        return self.duration_days(None)

    def duration_days(self, before: date | None) -> int:
        """Days in the union, truncated to days strictly before *before*."""
        return sum(e - s + 1 for s, e in _clip_before(self.spells, before))


def build_spells(records: Iterable[LicenseRecord]) -> list[EmploymentSpell]:
    """Merge license rows into maximal employment spells per (person, firm)."""
    by_pair: dict[tuple[str, str], list[Interval]] = {}
    for r in records:
        by_pair.setdefault((r.person_id, r.firm_id), []).append(
            (r.effective_date, r.end_date)
        )
    spells: list[EmploymentSpell] = []
    for (pid, fid), intervals in by_pair.items():
        for start, end in merge_intervals(intervals):
            spells.append(EmploymentSpell(pid, fid, start, end))
    spells.sort(key=lambda s: (s.person_id, s.firm_id, s.start))
    return spells


def is_active(spells: Iterable[EmploymentSpell | Interval], t: date) -> bool:
    """Strict activity predicate: some spell has start < t and end absent or > t."""
    for item in spells:
        if isinstance(item, EmploymentSpell):
            start, end = item.start, item.end
        else:
            start, end = item
        if start < t and (end is None or end > t):
            return True
    return False


def overlap_days(a: EntityTimeline, b: EntityTimeline, t: date | None = None) -> int:
    """Calendar days both timelines cover, truncated to days before *t*.

    Symmetric; ``overlap_days(a, a)`` equals ``a``'s own day count.
    """
    return _intersect_days(_clip_before(a.spells, t), _clip_before(b.spells, t))


def person_timelines(spells: Iterable[EmploymentSpell]) -> dict[str, EntityTimeline]:
    """Per-person timeline merged across all firms."""
    by_person: dict[str, list[Interval]] = {}
    for s in spells:
        by_person.setdefault(s.person_id, []).append((s.start, s.end))
    return {
        pid: EntityTimeline(pid, tuple(merge_intervals(ivs)))
        for pid, ivs in by_person.items()
    }


def person_firm_timelines(
    spells: Iterable[EmploymentSpell],
) -> dict[tuple[str, str], EntityTimeline]:
    """Per (person, firm) timeline; spells are already maximal per pair."""
    by_pair: dict[tuple[str, str], list[Interval]] = {}
    for s in spells:
        by_pair.setdefault((s.person_id, s.firm_id), []).append((s.start, s.end))
    return {
        pair: EntityTimeline(pair[0], tuple(sorted(ivs, key=lambda iv: iv[0])))
        for pair, ivs in by_pair.items()
    }
