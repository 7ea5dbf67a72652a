from __future__ import annotations

import os
from datetime import date, timedelta
from pathlib import Path

import pytest
from hypothesis import strategies as st

from licnet.ingest import ActivityStatus, LicenseRecord, Role

REPO_ROOT = Path(__file__).resolve().parent.parent

# Published register export (see README for the download step).  Golden
# tests skip when it is absent.
DATASET_ENV = "LICNET_REGISTER"
DEFAULT_DATASET = REPO_ROOT / "data" / "hk_sfc_register.csv"


def register_path() -> Path | None:
    env = os.environ.get(DATASET_ENV)
    if env:
        p = Path(env)
        return p if p.exists() else None
    return DEFAULT_DATASET if DEFAULT_DATASET.exists() else None


requires_dataset = pytest.mark.skipif(
    register_path() is None,
    reason="published register file not present (see README: dataset download)",
)


def mk_record(
    person="P1",
    firm="F1",
    start=date(2020, 1, 1),
    end=date(2020, 12, 31),
    *,
    role=Role.REPRESENTATIVE,
    act_type=1,
    fullname=None,
    firm_name=None,
    status=None,
) -> LicenseRecord:
    return LicenseRecord(
        effective_date=start,
        end_date=end,
        fullname=fullname or f"Name {person}",
        person_id=person,
        role=role,
        firm_name=firm_name or f"Firm {firm} Limited",
        firm_name_chinese=None,
        firm_id=firm,
        activity_status=status
        or (ActivityStatus.REGISTERED if end is None else ActivityStatus.ARCHIVED),
        activity_type=act_type,
        activity_desc=f"Activity {act_type}",
        activity_desc_chinese=None,
    )


BASE_DAY = date(2019, 1, 1)


@st.composite
def record_lists(
    draw,
    max_persons: int = 6,
    max_firms: int = 4,
    max_rows: int = 14,
    span_days: int = 1200,
    open_share: float = 0.25,
):
    """Small random register: ISO dates in a ~3 year window, some open ends."""
    n_rows = draw(st.integers(0, max_rows))
    rows = []
    for i in range(n_rows):
        person = f"P{draw(st.integers(1, max_persons))}"
        firm = f"F{draw(st.integers(1, max_firms))}"
        s_off = draw(st.integers(0, span_days))
        length = draw(st.integers(0, 400))
        start = BASE_DAY + timedelta(days=s_off)
        if draw(st.floats(0, 1)) < open_share:
            end = None
        else:
            end = start + timedelta(days=length)
        rows.append(
            mk_record(
                person,
                firm,
                start,
                end,
                act_type=draw(st.integers(1, 10)),
                role=draw(st.sampled_from([Role.REPRESENTATIVE, Role.RESPONSIBLE_OFFICER])),
            )
        )
    return rows
