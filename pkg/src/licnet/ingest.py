"""Register CSV ingestion: parse, validate, and normalize license rows.

Input contract
--------------
UTF-8 CSV, comma separated, double-quote quoting, header row required.
The twelve register columns may appear in any order (extra columns are
ignored):

    effectiveDate, endDate, fullname, sfcid, lcRole, prinCeName,
    prinCeNameChin, prinCeRef, regulatedActivity.status,
    regulatedActivity.actType, regulatedActivity.actDesc,
    regulatedActivity.cactDesc

Dates are ISO-8601 (YYYY-MM-DD).  An empty ``endDate`` marks a license that
is still active; it is represented as ``None``, never as a sentinel date.
Identity is carried by the opaque ids (``sfcid`` for persons, ``prinCeRef``
for firms); names are display-only and known to collide.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Union

__all__ = [
    "Role",
    "ActivityStatus",
    "LicenseRecord",
    "IngestOptions",
    "IngestReport",
    "IngestError",
    "Anomaly",
    "REGISTER_COLUMNS",
    "parse_register",
    "records_to_csv",
    "validate_records",
]

REGISTER_COLUMNS = (
    "effectiveDate",
    "endDate",
    "fullname",
    "sfcid",
    "lcRole",
    "prinCeName",
    "prinCeNameChin",
    "prinCeRef",
    "regulatedActivity.status",
    "regulatedActivity.actType",
    "regulatedActivity.actDesc",
    "regulatedActivity.cactDesc",
)


class Role(str, Enum):
    """Licensee role: supervised representative or responsible officer."""

    REPRESENTATIVE = "RE"
    RESPONSIBLE_OFFICER = "RO"


class ActivityStatus(str, Enum):
    REGISTERED = "R"
    ARCHIVED = "A"


class IngestError(Exception):
    """Fatal ingestion failure (bad header, or bad row under strict mode)."""


@dataclass(frozen=True, slots=True)
class LicenseRecord:
    """One register row: a person licensed for one activity at one firm."""

    effective_date: date
    end_date: date | None
    fullname: str
    person_id: str
    role: Role
    firm_name: str
    firm_name_chinese: str | None
    firm_id: str
    activity_status: ActivityStatus
    activity_type: int
    activity_desc: str
    activity_desc_chinese: str | None


@dataclass(frozen=True, slots=True)
class IngestOptions:
    strict: bool = False


@dataclass(slots=True)
class IngestReport:
    rows_read: int = 0
    rows_accepted: int = 0
    rows_rejected: int = 0
    rejection_reasons: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class Anomaly:
    """Legal-but-suspicious pattern found by :func:`validate_records`."""

    kind: str
    key: str
    detail: str


Source = Union[str, Path, IO[bytes], IO[str]]


def _open_text(source: Source) -> tuple[IO[str], bool]:
    """Return a text stream over *source* and whether we own (must close) it."""
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8-sig", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline=""), False


def _parse_date(text: str) -> date:
    return date.fromisoformat(text)


def parse_register(
    source: Source, options: IngestOptions | None = None
) -> tuple[list[LicenseRecord], IngestReport]:
    """Parse a register CSV into validated records plus an ingest report.

    Rows violating the record invariants are rejected and tallied by reason
    (lenient mode, the default) or raise :class:`IngestError` (strict mode).
    A missing required column is always fatal.  Input row order is preserved.
    """
    options = options or IngestOptions()
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty input: missing header row") from None
        positions = {name.strip(): i for i, name in enumerate(header)}
        missing = [c for c in REGISTER_COLUMNS if c not in positions]
        if missing:
            raise IngestError(f"missing required column(s): {', '.join(missing)}")
        cols = [positions[c] for c in REGISTER_COLUMNS]
        n_needed = max(cols) + 1

        records: list[LicenseRecord] = []
        report = IngestReport()
        reasons: Counter[str] = Counter()

        def reject(line_no: int, reason: str) -> None:
            if options.strict:
                raise IngestError(f"row {line_no}: {reason}")
            reasons[reason] += 1
            report.rows_rejected += 1

        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue  # blank line, not a data row
            report.rows_read += 1
            if len(row) < n_needed:
                reject(line_no, "field_count")
                continue
            (
                eff_s,
                end_s,
                fullname,
                person_id,
                role_s,
                firm_name,
                firm_name_cn,
                firm_id,
                status_s,
                act_type_s,
                act_desc,
                act_desc_cn,
            ) = (row[i].strip() for i in cols)

            try:
                effective = _parse_date(eff_s)
            except ValueError:
                reject(line_no, "bad_effective_date")
                continue
            end: date | None
            if end_s:
                try:
                    end = _parse_date(end_s)
                except ValueError:
                    reject(line_no, "bad_end_date")
                    continue
                if end < effective:
                    reject(line_no, "inverted_interval")
                    continue
            else:
                end = None
            if not person_id:
                reject(line_no, "empty_person_id")
                continue
            if not firm_id:
                reject(line_no, "empty_firm_id")
                continue
            try:
                role = Role(role_s)
            except ValueError:
                reject(line_no, "bad_role")
                continue
            try:
                status = ActivityStatus(status_s)
            except ValueError:
                reject(line_no, "bad_status")
                continue
            try:
                act_type = int(act_type_s)
            except ValueError:
                reject(line_no, "bad_activity_type")
                continue
            if not 1 <= act_type <= 10:
                reject(line_no, "bad_activity_type")
                continue

            records.append(
                LicenseRecord(
                    effective_date=effective,
                    end_date=end,
                    fullname=fullname,
                    person_id=person_id,
                    role=role,
                    firm_name=firm_name,
                    firm_name_chinese=firm_name_cn or None,
                    firm_id=firm_id,
                    activity_status=status,
                    activity_type=act_type,
                    activity_desc=act_desc,
                    activity_desc_chinese=act_desc_cn or None,
                )
            )
        report.rows_accepted = len(records)
        report.rejection_reasons = dict(sorted(reasons.items()))
        return records, report
    finally:
        if owned:
            stream.close()


def records_to_csv(records: Iterable[LicenseRecord], dest: Union[str, Path, IO[str]]) -> None:
    """Write records back out in the canonical register CSV layout.

    Open end dates serialize as empty fields, so re-parsing the output
    yields records equal to the input.
    """
    if isinstance(dest, (str, Path)):
        out: IO[str] = open(dest, "w", encoding="utf-8", newline="")
        owned = True
    else:
        out, owned = dest, False
    try:
        writer = csv.writer(out)
        writer.writerow(REGISTER_COLUMNS)
        for r in records:
            writer.writerow(
                (
                    r.effective_date.isoformat(),
                    r.end_date.isoformat() if r.end_date else "",
                    r.fullname,
                    r.person_id,
                    r.role.value,
                    r.firm_name,
                    r.firm_name_chinese or "",
                    r.firm_id,
                    r.activity_status.value,
                    str(r.activity_type),
                    r.activity_desc,
                    r.activity_desc_chinese or "",
                )
            )
    finally:
        if owned:
            out.close()


def validate_records(records: Iterable[LicenseRecord]) -> list[Anomaly]:
    """Flag suspicious-but-accepted patterns; never mutates the input.

    Kinds reported:

    * ``exact_duplicate`` -- identical row appears more than once
    * ``person_name_conflict`` -- one person id under several full names
    * ``firm_name_conflict`` -- one firm id under several English names
    * ``name_collision`` -- one English firm name shared by several firm ids
    """
    records = list(records)
    anomalies: list[Anomaly] = []

    dup = Counter(records)
    for rec, n in dup.items():
        if n > 1:
            anomalies.append(
                Anomaly(
                    kind="exact_duplicate",
                    key=f"{rec.person_id}/{rec.firm_id}/{rec.effective_date.isoformat()}",
                    detail=f"row repeated {n} times",
                )
            )

    person_names: dict[str, set[str]] = {}
    firm_names: dict[str, set[str]] = {}
    name_firms: dict[str, set[str]] = {}
    for r in records:
        person_names.setdefault(r.person_id, set()).add(r.fullname)
        firm_names.setdefault(r.firm_id, set()).add(r.firm_name)
        name_firms.setdefault(r.firm_name, set()).add(r.firm_id)

    for pid, names in person_names.items():
        if len(names) > 1:
            anomalies.append(
                Anomaly("person_name_conflict", pid, "names: " + "; ".join(sorted(names)))
            )
    for fid, names in firm_names.items():
        if len(names) > 1:
            anomalies.append(
                Anomaly("firm_name_conflict", fid, "names: " + "; ".join(sorted(names)))
            )
    for name, fids in name_firms.items():
        if len(fids) > 1:
            anomalies.append(
                Anomaly("name_collision", name, "firm ids: " + ", ".join(sorted(fids)))
            )

    anomalies.sort(key=lambda a: (a.kind, a.key))
    return anomalies
