"""Joins of externally produced per-entity attributes onto the register.

Attribute files are CSV with the entity id in the first column (``sfcid``
for persons, ``prinCeRef`` for firms) and free-form attribute columns after
it.  Entities absent from the attribute table are excluded from ratio
denominators and surfaced through the coverage counts instead of silently
skewing the shares.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import IO, Sequence, Union

from .ingest import LicenseRecord
from .stats import YearlySeries, creation_termination_series
from .timeline import merge_intervals

__all__ = [
    "EntityKind",
    "AttributeTable",
    "GroupedCounts",
    "EnrichError",
    "load_attributes",
    "grouped_counts",
    "attribute_timeseries",
    "side_share_timeseries",
]


class EntityKind(str, Enum):
    PERSON = "person"
    FIRM = "firm"


class EnrichError(Exception):
    pass


@dataclass(frozen=True)
class AttributeTable:
    entity_kind: EntityKind
    columns: tuple[str, ...]
    rows: dict[str, dict[str, str]]

    def value(self, entity_id: str, attribute: str) -> str | None:
        row = self.rows.get(entity_id)
        if row is None:
            return None
        return row.get(attribute) or None


@dataclass(frozen=True)
class GroupedCounts:
    """Counts and shares per attribute value over matched entities."""

    groups: dict[str, tuple[int, float]]
    matched: int
    unmatched: int


_ID_COLUMNS = {"sfcid": EntityKind.PERSON, "prinCeRef": EntityKind.FIRM}


def load_attributes(source: Union[str, Path, IO[str], IO[bytes]]) -> AttributeTable:
    """Load an attribute CSV; duplicate entity ids are an error."""
    if isinstance(source, (str, Path)):
        fh: IO[str] = open(source, "r", encoding="utf-8-sig", newline="")
        owned = True
    elif isinstance(source, io.TextIOBase):
        fh, owned = source, False
    else:
        fh = io.TextIOWrapper(source, encoding="utf-8-sig", newline="")
        owned = False
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise EnrichError("attribute file is empty")
        id_col = header[0].strip()
        kind = _ID_COLUMNS.get(id_col)
        if kind is None:
            raise EnrichError(
                f"first column must be one of {sorted(_ID_COLUMNS)}, got {id_col!r}"
            )
        columns = tuple(c.strip() for c in header[1:])
        rows: dict[str, dict[str, str]] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            eid = row[0].strip()
            if not eid:
                raise EnrichError(f"row {line_no}: empty entity id")
            if eid in rows:
                raise EnrichError(f"row {line_no}: duplicate entity id {eid!r}")
            values = {
                col: row[i + 1].strip() if i + 1 < len(row) else ""
                for i, col in enumerate(columns)
            }
            rows[eid] = values
        return AttributeTable(entity_kind=kind, columns=columns, rows=rows)
    finally:
        if owned:
            fh.close()


def _entity_ids(records: Sequence[LicenseRecord], kind: EntityKind) -> set[str]:
    if kind is EntityKind.PERSON:
        return {r.person_id for r in records}
    return {r.firm_id for r in records}


def _covering_intervals(
    records: Sequence[LicenseRecord], kind: EntityKind
) -> dict[str, list[tuple[date, date | None]]]:
    out: dict[str, list[tuple[date, date | None]]] = {}
    for r in records:
        eid = r.person_id if kind is EntityKind.PERSON else r.firm_id
        out.setdefault(eid, []).append((r.effective_date, r.end_date))
    return out


def _active_on(intervals: list[tuple[date, date | None]], day: date) -> bool:
    return any(s <= day and (e is None or e >= day) for s, e in intervals)


def grouped_counts(
    records: Sequence[LicenseRecord],
    attributes: AttributeTable,
    group_by: str,
    at: date | None = None,
) -> GroupedCounts:
    """Distinct entities tallied by an attribute value.

    With *at*, only entities holding a license covering that day count.
    Ratios are over matched entities (attribute present and non-empty).
    """
    if group_by not in attributes.columns:
        raise EnrichError(f"unknown attribute {group_by!r}")
    entities = _entity_ids(records, attributes.entity_kind)
    if at is not None:
        cover = _covering_intervals(records, attributes.entity_kind)
        entities = {e for e in entities if _active_on(cover[e], at)}
    counts: Counter[str] = Counter()
    unmatched = 0
    for eid in entities:
        value = attributes.value(eid, group_by)
        if value is None:
            unmatched += 1
        else:
            counts[value] += 1
    matched = sum(counts.values())
    groups = {
        value: (count, count / matched)
        for value, count in sorted(counts.items(), key=lambda vc: (-vc[1], vc[0]))
    }
    return GroupedCounts(groups=groups, matched=matched, unmatched=unmatched)


def attribute_timeseries(
    records: Sequence[LicenseRecord],
    attributes: AttributeTable,
    attribute: str,
    value: str,
) -> YearlySeries:
    """Creation/termination series restricted to entities with attribute=value.

    The year span always matches the unfiltered data, so an empty filter
    yields an all-zero series rather than an empty one.
    """
    if attribute not in attributes.columns:
        raise EnrichError(f"unknown attribute {attribute!r}")
    kind = attributes.entity_kind
    keep = {
        eid
        for eid in _entity_ids(records, kind)
        if attributes.value(eid, attribute) == value
    }
    subset = [
        r
        for r in records
        if (r.person_id if kind is EntityKind.PERSON else r.firm_id) in keep
    ]
    full = creation_termination_series(records)
    filtered = creation_termination_series(subset)
    return YearlySeries(
        created={y: filtered.created.get(y, 0) for y in full.created},
        terminated={y: filtered.terminated.get(y, 0) for y in full.terminated},
    )


def side_share_timeseries(
    records: Sequence[LicenseRecord],
    attributes: AttributeTable,
    side_attribute: str = "side",
) -> dict[int, float | None]:
    """Buy-side share of labeled active firms, sampled each January 1st.

    Labels are the literal values ``buy`` and ``sell``; anything else is
    treated as unlabeled.  Years with no labeled active firm map to None.
    """
    if attributes.entity_kind is not EntityKind.FIRM:
        raise EnrichError("side shares need firm attributes")
    if side_attribute not in attributes.columns:
        raise EnrichError(f"unknown attribute {side_attribute!r}")
    if not records:
        return {}
    cover = {
        fid: merge_intervals(ivs)
        for fid, ivs in _covering_intervals(records, EntityKind.FIRM).items()
    }
    sides = {
        fid: attributes.value(fid, side_attribute)
        for fid in cover
        if attributes.value(fid, side_attribute) in ("buy", "sell")
    }
    first = min(r.effective_date for r in records).year
    last = max(
        max(r.effective_date for r in records),
        max((r.end_date for r in records if r.end_date), default=date.min),
    ).year
    out: dict[int, float | None] = {}
    for year in range(first, last + 1):
        day = date(year, 1, 1)
        buy = labeled = 0
        for fid, side in sides.items():
            if _active_on(cover[fid], day):
                labeled += 1
                if side == "buy":
                    buy += 1
        out[year] = buy / labeled if labeled else None
    return out
