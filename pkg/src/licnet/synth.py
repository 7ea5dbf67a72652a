"""Deterministic synthetic register generator for tests and desk runs.

Careers are simulated per person: a start date uniform in the horizon,
then a chain of jobs whose lengths are uniform in [0.5, 1.5] x mean tenure
(so the median tracks the mean), moving to a different firm with a
per-year turnover hazard.  Every employment emits one row per activity
type held, so the output exercises the same row-per-activity layout as the
real register.  Activity types are skewed toward type 1 to keep synthetic
distributions shaped like production data; the skew is cosmetic, not
calibrated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date, timedelta

from .ingest import ActivityStatus, LicenseRecord, Role

__all__ = ["SynthConfig", "generate"]

ACTIVITY_DESCS = {
    1: ("Dealing in Securities", "證券交易"),
    2: ("Dealing in Futures Contracts", "期貨合約交易"),
    3: ("Leveraged Foreign Exchange Trading", None),
    4: ("Advising on Securities", "就證券提供意見"),
    5: ("Advising on Futures Contracts", None),
    6: ("Advising on Corporate Finance", "就機構融資提供意見"),
    7: ("Providing Automated Trading Services", None),
    8: ("Securities Margin Financing", None),
    9: ("Asset Management", "資產管理"),
    10: ("Providing Credit Rating Services", None),
}

# heavy weight on type 1, echoing the production activity mix
ACTIVITY_WEIGHTS = {1: 35, 2: 8, 3: 1, 4: 20, 5: 3, 6: 7, 7: 1, 8: 2, 9: 15, 10: 1}

SURNAMES = ["CHAN", "WONG", "LEE", "ZHANG", "SMITH", "PATEL", "KIM", "SATO", "NG", "LAU"]
GIVEN = ["Wai Man", "Ka Yan", "Fan", "Mei", "James", "Priya", "Min Jun", "Yuki", "Hoi", "Chi"]
CJK = ["陳偉文", "黃嘉欣", "張帆", "李美", None, None, "金民俊", "佐藤雪", "吳凱", "劉志"]


@dataclass(frozen=True)
class SynthConfig:
    persons: int
    firms: int
    horizon_start: date
    horizon_end: date
    mean_tenure_days: int = 540
    firm_size_distribution: str = "uniform"  # "uniform" | "powerlaw"
    powerlaw_alpha: float = 1.5
    turnover_rate: float = 0.5  # per-year probability of moving on
    seed: int = 0


def _validate(config: SynthConfig) -> None:
    if config.persons < 1 or config.firms < 1:
        raise ValueError("persons and firms must be >= 1")
    if config.horizon_start >= config.horizon_end:
        raise ValueError("horizon start must precede horizon end")
    if not 0.0 <= config.turnover_rate <= 1.0:
        raise ValueError("turnover_rate must be in [0, 1]")
    if config.mean_tenure_days < 1:
        raise ValueError("mean_tenure_days must be >= 1")
    if config.firm_size_distribution not in ("uniform", "powerlaw"):
        raise ValueError(f"unknown firm size distribution: {config.firm_size_distribution!r}")


def generate(config: SynthConfig) -> list[LicenseRecord]:
    """Generate schema-valid register records, byte-stable per seed."""
    _validate(config)
    rng = random.Random(config.seed)
    h_start = config.horizon_start.toordinal()
    h_end = config.horizon_end.toordinal()

    if config.firm_size_distribution == "powerlaw":
        firm_weights = [(i + 1) ** -config.powerlaw_alpha for i in range(config.firms)]
    else:
        firm_weights = [1.0] * config.firms
    firm_ids = [f"SF{i:04d}" for i in range(config.firms)]
    firm_names = [f"Synthetic Firm {i:04d} Limited" for i in range(config.firms)]

    act_types = sorted(ACTIVITY_WEIGHTS)
    act_weights = [ACTIVITY_WEIGHTS[t] for t in act_types]

    records: list[LicenseRecord] = []
    for p in range(config.persons):
        pid = f"SP{p:05d}"
        surname = SURNAMES[p % len(SURNAMES)]
        given = GIVEN[(p // len(SURNAMES)) % len(GIVEN)]
        cjk = CJK[p % len(CJK)]
        fullname = f"{surname} {given}" + (f" {cjk}" if cjk else "")

        n_types = rng.choices([1, 2, 3, 4], weights=[30, 30, 25, 15])[0]
        held_set: set[int] = set()
        while len(held_set) < n_types:
            held_set.add(rng.choices(act_types, weights=act_weights)[0])
        held = sorted(held_set)

        day = rng.randint(h_start, h_end)
        firm = rng.choices(range(config.firms), weights=firm_weights)[0]
        while day <= h_end:
            tenure = max(1, round(rng.uniform(0.5, 1.5) * config.mean_tenure_days))
            end_day = day + tenure - 1
            open_ended = end_day >= h_end
            is_ro = rng.random() < 0.16
            for act in held:
                desc, cdesc = ACTIVITY_DESCS[act]
                records.append(
                    LicenseRecord(
                        effective_date=date.fromordinal(day),
                        end_date=None if open_ended else date.fromordinal(end_day),
                        fullname=fullname,
                        person_id=pid,
                        role=Role.RESPONSIBLE_OFFICER if is_ro else Role.REPRESENTATIVE,
                        firm_name=firm_names[firm],
                        firm_name_chinese=None,
                        firm_id=firm_ids[firm],
                        activity_status=(
                            ActivityStatus.REGISTERED
                            if open_ended
                            else ActivityStatus.ARCHIVED
                        ),
                        activity_type=act,
                        activity_desc=desc,
                        activity_desc_chinese=cdesc,
                    )
                )
            if open_ended:
                break
            years = tenure / 365.25
            p_move = 1.0 - (1.0 - config.turnover_rate) ** years
            if rng.random() >= p_move:
                break
            if config.firms > 1:
                new_firm = firm
                while new_firm == firm:
                    new_firm = rng.choices(range(config.firms), weights=firm_weights)[0]
                firm = new_firm
            day = end_day + 1 + rng.randint(1, 60)  # short gap between jobs

    records.sort(key=lambda r: (r.effective_date, r.person_id, r.firm_id, r.activity_type))
    return records
