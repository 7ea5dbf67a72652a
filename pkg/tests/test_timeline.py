from __future__ import annotations

from datetime import date, timedelta

from hypothesis import given, settings
from hypothesis import strategies as st

from licnet.timeline import (
    EntityTimeline,
    build_spells,
    is_active,
    overlap_days,
    person_firm_timelines,
)

from conftest import mk_record, record_lists
from oracles import day_set, record_day_sets, spell_day_sets


def spells_of(*rows):
    return build_spells(list(rows))


def test_adjacent_rows_merge_into_one_spell():
    spells = spells_of(
        mk_record(start=date(2020, 1, 1), end=date(2020, 6, 30)),
        mk_record(start=date(2020, 7, 1), end=date(2021, 1, 1)),
    )
    assert len(spells) == 1
    assert (spells[0].start, spells[0].end) == (date(2020, 1, 1), date(2021, 1, 1))


def test_open_row_absorbs_closed_row():
    spells = spells_of(
        mk_record(start=date(2020, 1, 1), end=date(2020, 12, 31)),
        mk_record(start=date(2020, 6, 1), end=None),
    )
    assert len(spells) == 1
    assert spells[0].start == date(2020, 1, 1)
    assert spells[0].end is None


def test_gap_of_one_day_does_not_merge():
    spells = spells_of(
        mk_record(start=date(2020, 1, 1), end=date(2020, 6, 30)),
        mk_record(start=date(2020, 7, 2), end=date(2020, 12, 31)),
    )
    assert len(spells) == 2


def test_different_firms_never_merge():
    spells = spells_of(
        mk_record(firm="F1"),
        mk_record(firm="F2"),
    )
    assert len(spells) == 2


@given(record_lists())
@settings(max_examples=80, deadline=None)
def test_spells_equal_brute_force_day_union(records):
    bound = date(2025, 1, 1)
    expected = record_day_sets(records, before=bound)
    got = spell_day_sets(build_spells(records), before=bound)
    assert got == expected


@given(record_lists())
@settings(max_examples=40, deadline=None)
def test_spells_are_disjoint_and_non_adjacent(records):
    by_pair = {}
    for s in build_spells(records):
        by_pair.setdefault((s.person_id, s.firm_id), []).append(s)
    for spells in by_pair.values():
        spells.sort(key=lambda s: s.start)
        for prev, nxt in zip(spells, spells[1:]):
            assert prev.end is not None
            # at least one uncovered day in between
            assert nxt.start > prev.end + timedelta(days=1)


def test_is_active_strict_at_boundaries():
    spell = spells_of(mk_record(start=date(2020, 1, 1), end=date(2020, 12, 31)))
    assert not is_active(spell, date(2020, 1, 1))
    assert is_active(spell, date(2020, 6, 15))
    assert not is_active(spell, date(2020, 12, 31))
    assert not is_active(spell, date(2021, 6, 1))


def test_is_active_open_interval():
    spell = spells_of(mk_record(start=date(2020, 1, 1), end=None))
    assert is_active(spell, date(2024, 2, 15))
    assert not is_active(spell, date(2019, 12, 31))


def tl(*intervals):
    return EntityTimeline("X", tuple(intervals))


def test_overlap_days_half_year():
    a = tl((date(2020, 1, 1), date(2020, 12, 31)))
    b = tl((date(2020, 7, 1), date(2021, 6, 30)))
    # frozen via day-set enumeration oracle
    assert overlap_days(a, b) == 184
    assert overlap_days(a, b) == len(
        day_set(date(2020, 1, 1), date(2020, 12, 31), None)
        & day_set(date(2020, 7, 1), date(2021, 6, 30), None)
    )


def test_overlap_days_identical_interval():
    a = tl((date(2020, 1, 1), date(2020, 1, 10)))
    assert overlap_days(a, a) == 10


def test_overlap_days_disjoint():
    a = tl((date(2020, 1, 1), date(2020, 1, 31)))
    b = tl((date(2020, 3, 1), date(2020, 3, 31)))
    assert overlap_days(a, b) == 0


def test_overlap_truncation_cuts_strictly_before_t():
    a = tl((date(2020, 1, 1), date(2020, 12, 31)))
    assert overlap_days(a, a, t=date(2020, 1, 2)) == 1  # only Jan 1 remains
    assert overlap_days(a, a, t=date(2020, 1, 1)) == 0


intervals_st = st.lists(
    st.tuples(st.integers(0, 500), st.integers(0, 120)).map(
        lambda se: (
            date(2020, 1, 1) + timedelta(days=se[0]),
            date(2020, 1, 1) + timedelta(days=se[0] + se[1]),
        )
    ),
    min_size=1,
    max_size=5,
)


@given(intervals_st, intervals_st, st.integers(0, 700))
@settings(max_examples=120, deadline=None)
def test_overlap_matches_enumeration_and_is_commutative(ivs_a, ivs_b, t_off):
    from licnet.timeline import merge_intervals

    a = tl(*merge_intervals(ivs_a))
    b = tl(*merge_intervals(ivs_b))
    t = date(2020, 1, 1) + timedelta(days=t_off)
    das = set().union(*(day_set(s, e, t) for s, e in a.spells))
    dbs = set().union(*(day_set(s, e, t) for s, e in b.spells))
    assert overlap_days(a, b, t) == len(das & dbs)
    assert overlap_days(a, b, t) == overlap_days(b, a, t)
    assert overlap_days(a, a, t) == len(das) == a.duration_days(t)


@given(intervals_st, intervals_st, st.integers(0, 600), st.integers(0, 100))
@settings(max_examples=60, deadline=None)
def test_overlap_monotone_in_truncation(ivs_a, ivs_b, t_off, delta):
    from licnet.timeline import merge_intervals

    a = tl(*merge_intervals(ivs_a))
    b = tl(*merge_intervals(ivs_b))
    t1 = date(2020, 1, 1) + timedelta(days=t_off)
    t2 = t1 + timedelta(days=delta)
    assert overlap_days(a, b, t1) <= overlap_days(a, b, t2)


def test_person_firm_timelines_duration():
    records = [
        mk_record(start=date(2020, 1, 1), end=date(2020, 1, 10)),
        mk_record(start=date(2020, 2, 1), end=date(2020, 2, 5)),
    ]
    tls = person_firm_timelines(build_spells(records))
    t = tls[("P1", "F1")]
    assert t.total_duration_days == 15
