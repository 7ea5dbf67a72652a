"""Exploratory statistics over the register: headline numbers, yearly
creation/termination series, activity mix, license-type combinations, and
firm rankings.

Conventions (documented, since the register itself fixes none of them):

* License tenure is the length of a single license row, not a merged spell;
  open rows are measured through the dataset horizon end.
* "Active on day d" for stats uses the inclusive covering predicate
  (start <= d <= end), unlike the strict snapshot-graph predicate.
* Time-series medians (active employees, RO share) sample the first day of
  each month across the horizon.
* A firm has "ceased" when none of its license rows is open-ended.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from datetime import date
from statistics import median
from typing import Iterable, Sequence

from .ingest import LicenseRecord, Role
from .timeline import EmploymentSpell, merge_intervals

__all__ = [
    "KeyStats",
    "YearlySeries",
    "key_stats",
    "creation_termination_series",
    "activity_distribution",
    "license_type_combinations",
    "top_firms_by_licensees",
]

DAYS_PER_YEAR = 365.25


@dataclass(frozen=True, slots=True)
class KeyStats:
    total_licenses: int
    total_employees: int
    total_firms: int
    median_tenure_years: float | None
    max_tenure_years: float | None
    firms_active_at_start: int
    firms_active_since_start: int
    firms_ceased: int
    median_ceased_lifespan_years: float | None
    avg_firms_per_employee: float | None
    avg_licensees_per_firm: float | None
    median_active_employees: int | None
    median_ro_proportion: float | None


@dataclass(frozen=True, slots=True)
class YearlySeries:
    """Per-year created/terminated counts, zero-filled over the year span."""

    created: dict[int, int]
    terminated: dict[int, int]

    @property
    def years(self) -> list[int]:
        return sorted(self.created)


class _DayCounter:
    """How many of a fixed set of inclusive intervals cover a given day."""

    def __init__(self, intervals: Iterable[tuple[int, int | None]]):
        starts: list[int] = []
        ends_after: list[int] = []  # first day no longer covered
        for s, e in intervals:
            starts.append(s)
            if e is not None:
                ends_after.append(e + 1)
        self._starts = sorted(starts)
        self._ends_after = sorted(ends_after)

    def count_at(self, day: int) -> int:
        return bisect_right(self._starts, day) - bisect_right(self._ends_after, day)


def _month_firsts(start: date, end: date) -> list[date]:
    out = []
    y, m = start.year, start.month
    while (y, m) <= (end.year, end.month):
        out.append(date(y, m, 1))
        m += 1
        if m == 13:
            y, m = y + 1, 1
    return out


def _row_interval(r: LicenseRecord, horizon_end: date) -> tuple[int, int]:
    end = r.end_date if r.end_date is not None else horizon_end
    return r.effective_date.toordinal(), end.toordinal()


def key_stats(
    records: Sequence[LicenseRecord],
    spells: Sequence[EmploymentSpell],
    horizon_end: date | None = None,
) -> KeyStats:
    """Headline dataset statistics.

    *horizon_end* bounds open licenses; it defaults to the latest date seen
    anywhere in the data.
    """
    if not records:
        return KeyStats(0, 0, 0, None, None, 0, 0, 0, None, None, None, None, None)

    if horizon_end is None:
        horizon_end = max(
            max(r.effective_date for r in records),
            max((r.end_date for r in records if r.end_date), default=date.min),
        )
    horizon_start = min(r.effective_date for r in records)
    h_end = horizon_end.toordinal()

    persons = {r.person_id for r in records}
    firms = {r.firm_id for r in records}

    tenures = [
        e - s + 1 for s, e in (_row_interval(r, horizon_end) for r in records)
    ]
    median_tenure = median(tenures) / DAYS_PER_YEAR
    max_tenure = max(tenures) / DAYS_PER_YEAR

    firm_intervals: dict[str, list[tuple[date, date | None]]] = {}
    for r in records:
        firm_intervals.setdefault(r.firm_id, []).append((r.effective_date, r.end_date))

    active_at_start = 0
    active_since_start = 0
    ceased_lifespans: list[int] = []
    for fid, ivs in firm_intervals.items():
        merged = merge_intervals(ivs)
        covers_start = any(
            s <= horizon_start and (e is None or e >= horizon_start) for s, e in merged
        )
        if covers_start:
            active_at_start += 1
            # continuous activity: one merged interval spans the whole horizon
            if any(
                s <= horizon_start and (e is None or e >= horizon_end)
                for s, e in merged
            ):
                active_since_start += 1
        if all(e is not None for _, e in ivs):
            first = min(s for s, _ in ivs).toordinal()
            last = max(e.toordinal() for _, e in ivs if e is not None)
            ceased_lifespans.append(last - first + 1)

    firms_per_person = Counter(
        (pid for pid, _ in {(r.person_id, r.firm_id) for r in records})
    )
    persons_per_firm = Counter(
        (fid for _, fid in {(r.person_id, r.firm_id) for r in records})
    )
    pair_count = sum(firms_per_person.values())

    # monthly-sampled series over merged per-person activity
    person_ivs: dict[str, list[tuple[date, date | None]]] = {}
    for s in spells:
        person_ivs.setdefault(s.person_id, []).append((s.start, s.end))
    person_units: list[tuple[int, int | None]] = []
    for ivs in person_ivs.values():
        for s_, e_ in merge_intervals(ivs):
            s_o = s_.toordinal()
            e_o = min(e_.toordinal(), h_end) if e_ is not None else None
            person_units.append((s_o, e_o))
    active_counter = _DayCounter(person_units)

    row_units = []
    ro_units = []
    for r in records:
        s_o = r.effective_date.toordinal()
        e_o = r.end_date.toordinal() if r.end_date is not None else None
        row_units.append((s_o, e_o))
        if r.role is Role.RESPONSIBLE_OFFICER:
            ro_units.append((s_o, e_o))
    rows_counter = _DayCounter(row_units)
    ro_counter = _DayCounter(ro_units)

    samples = [d.toordinal() for d in _month_firsts(horizon_start, horizon_end)]
    active_series = [active_counter.count_at(d) for d in samples]
    ro_props = []
    for d in samples:
        total = rows_counter.count_at(d)
        if total:
            ro_props.append(ro_counter.count_at(d) / total)

    return KeyStats(
        total_licenses=len(records),
        total_employees=len(persons),
        total_firms=len(firms),
        median_tenure_years=median_tenure,
        max_tenure_years=max_tenure,
        firms_active_at_start=active_at_start,
        firms_active_since_start=active_since_start,
        firms_ceased=len(ceased_lifespans),
        median_ceased_lifespan_years=(
            median(ceased_lifespans) / DAYS_PER_YEAR if ceased_lifespans else None
        ),
        avg_firms_per_employee=pair_count / len(persons),
        avg_licensees_per_firm=pair_count / len(firms),
        median_active_employees=(
            int(round(median(active_series))) if active_series else None
        ),
        median_ro_proportion=median(ro_props) if ro_props else None,
    )


def creation_termination_series(records: Iterable[LicenseRecord]) -> YearlySeries:
    """Licenses issued and terminated per calendar year.

    Open licenses contribute no termination.  Both maps are zero-filled over
    the full year span seen in the data.
    """
    created: Counter[int] = Counter()
    terminated: Counter[int] = Counter()
    for r in records:
        created[r.effective_date.year] += 1
        if r.end_date is not None:
            terminated[r.end_date.year] += 1
    if not created:
        return YearlySeries({}, {})
    years = range(
        min(min(created), min(terminated, default=9999)),
        max(max(created), max(terminated, default=0)) + 1,
    )
    return YearlySeries(
        created={y: created.get(y, 0) for y in years},
        terminated={y: terminated.get(y, 0) for y in years},
    )


def activity_distribution(records: Iterable[LicenseRecord]) -> dict[str, int]:
    """Row count per regulated-activity description."""
    return dict(Counter(r.activity_desc for r in records))


def license_type_combinations(
    records: Iterable[LicenseRecord], k: int
) -> dict[tuple[int, ...], int]:
    """Persons holding exactly the given size-*k* set of activity types.

    Each person is counted once, under the sorted tuple of their distinct
    activity types, and only if that set has size exactly *k*.
    """
    if k < 1:
        raise ValueError("combination size must be >= 1")
    types_by_person: dict[str, set[int]] = {}
    for r in records:
        types_by_person.setdefault(r.person_id, set()).add(r.activity_type)
    out: Counter[tuple[int, ...]] = Counter()
    for tset in types_by_person.values():
        if len(tset) == k:
            out[tuple(sorted(tset))] += 1
    return dict(out)


def top_firms_by_licensees(
    records: Iterable[LicenseRecord], n: int
) -> list[tuple[str, int]]:
    """Firms ranked by distinct licensees ever held, ties broken by firm id.

    A firm id is displayed under its most frequent English name (lexical
    tie-break), since names are not stable over time.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    persons_by_firm: dict[str, set[str]] = {}
    names_by_firm: dict[str, Counter[str]] = {}
    for r in records:
        persons_by_firm.setdefault(r.firm_id, set()).add(r.person_id)
        names_by_firm.setdefault(r.firm_id, Counter())[r.firm_name] += 1
    ranked = sorted(
        persons_by_firm.items(), key=lambda item: (-len(item[1]), item[0])
    )[:n]
    out = []
    for fid, persons in ranked:
        name = min(
            names_by_firm[fid].items(), key=lambda nc: (-nc[1], nc[0])
        )[0]
        out.append((name, len(persons)))
    return out
