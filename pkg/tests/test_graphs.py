from __future__ import annotations

import io
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given, settings

from licnet.graphs import (
    GraphMode,
    HorizonError,
    build_employee_graph,
    build_firm_graph,
    export_edge_list,
    export_graph,
    export_graphml,
    export_node_list,
    read_edge_list,
)
from licnet.metrics import compute_metrics
from licnet.timeline import build_spells

from conftest import mk_record, record_lists
from oracles import employee_graph_oracle, firm_graph_oracle

T = date(2021, 6, 1)


def graph_as_dict(graph):
    """{(id_a, id_b): (weight, normalized)} keyed by entity ids."""
    return {
        (src, dst): (w, nw) for src, dst, w, nw in graph.edge_rows()
    }


def test_single_shared_person_edge():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), None),
        mk_record("P1", "F2", date(2020, 6, 1), None),
    ]
    g = build_firm_graph(build_spells(records), T)
    assert g.nodes == ("F1", "F2")
    assert graph_as_dict(g) == {("F1", "F2"): (1.0, 1.0)}


def test_firm_nodes_require_active_employee():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), date(2020, 12, 31)),  # ended
        mk_record("P2", "F2", date(2020, 1, 1), None),
    ]
    g = build_firm_graph(build_spells(records), T)
    assert g.nodes == ("F2",)
    assert g.n_edges == 0


def test_firm_edge_counts_shared_history_even_if_person_left():
    records = [
        # P1 worked at both firms but is inactive at T; firms kept active by others
        mk_record("P1", "F1", date(2019, 1, 1), date(2019, 6, 30)),
        mk_record("P1", "F2", date(2019, 7, 1), date(2019, 12, 31)),
        mk_record("P2", "F1", date(2020, 1, 1), None),
        mk_record("P3", "F2", date(2020, 1, 1), None),
    ]
    g = build_firm_graph(build_spells(records), T)
    d = graph_as_dict(g)
    assert ("F1", "F2") in d
    assert d[("F1", "F2")][0] == 1.0
    # Employees(F1) = {P1, P2}, Employees(F2) = {P1, P3}
    assert d[("F1", "F2")][1] == pytest.approx(1 / 2)


def test_firm_graph_horizon_errors():
    spells = build_spells([mk_record(start=date(2020, 1, 1), end=date(2020, 12, 31))])
    with pytest.raises(HorizonError):
        build_firm_graph(spells, date(2019, 1, 1))
    with pytest.raises(HorizonError):
        build_firm_graph(spells, date(2021, 6, 1))


def test_empty_spells_empty_graph():
    g = build_firm_graph([], T)
    assert g.n_nodes == 0 and g.n_edges == 0
    e = build_employee_graph([], T)
    assert e.n_nodes == 0 and e.n_edges == 0


def test_employee_identical_careers_normalized_one():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), None),
        mk_record("P2", "F1", date(2020, 1, 1), None),
    ]
    g = build_employee_graph(build_spells(records), T)
    d = graph_as_dict(g)
    assert set(d) == {("P1", "P2")}
    w, nw = d[("P1", "P2")]
    assert w == float((T - timedelta(days=1)) - date(2020, 1, 1) == timedelta(0)) or w > 0
    assert nw == pytest.approx(1.0)


def test_employee_disjoint_tenures_no_edge():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), date(2020, 5, 31)),
        mk_record("P2", "F1", date(2020, 6, 1), None),
        mk_record("P1", "F2", date(2020, 6, 1), None),  # keeps P1 active at T
    ]
    g = build_employee_graph(build_spells(records), T)
    assert g.n_nodes == 2
    assert g.n_edges == 0


def test_employee_sum_vs_union_aggregation():
    # simultaneous co-employment at two firms
    records = []
    for firm in ("F1", "F2"):
        records += [
            mk_record("P1", firm, date(2020, 1, 1), None),
            mk_record("P2", firm, date(2020, 1, 1), None),
        ]
    spells = build_spells(records)
    g_sum = build_employee_graph(spells, T, aggregation="sum")
    g_union = build_employee_graph(spells, T, aggregation="union")
    days = (T - date(2020, 1, 1)).days  # days strictly before T
    assert graph_as_dict(g_sum)[("P1", "P2")][0] == pytest.approx(2 * days)
    assert graph_as_dict(g_union)[("P1", "P2")][0] == pytest.approx(days)
    # normalization stays within (0, 1] under both aggregations
    assert graph_as_dict(g_sum)[("P1", "P2")][1] == pytest.approx(1.0)
    assert graph_as_dict(g_union)[("P1", "P2")][1] == pytest.approx(1.0)


@given(record_lists(max_persons=10, max_firms=5, max_rows=20))
@settings(max_examples=100, deadline=None)
def test_firm_graph_matches_oracle(records):
    spells = build_spells(records)
    for offset in (200, 700, 1300):
        t = date(2019, 1, 1) + timedelta(days=offset)
        try:
            g = build_firm_graph(spells, t)
        except HorizonError:
            continue
        nodes, edges = firm_graph_oracle(spells, t)
        assert list(g.nodes) == nodes
        got = graph_as_dict(g)
        assert set(got) == set(edges)
        for key, (w, nw) in edges.items():
            assert got[key][0] == w
            assert got[key][1] == pytest.approx(nw, rel=1e-12)


@given(record_lists(max_persons=8, max_firms=4, max_rows=18))
@settings(max_examples=100, deadline=None)
def test_employee_graph_matches_oracle_both_aggregations(records):
    spells = build_spells(records)
    for offset in (400, 1000):
        t = date(2019, 1, 1) + timedelta(days=offset)
        for aggregation in ("sum", "union"):
            try:
                g = build_employee_graph(spells, t, aggregation=aggregation)
            except HorizonError:
                continue
            nodes, edges = employee_graph_oracle(spells, t, aggregation)
            assert list(g.nodes) == nodes
            got = graph_as_dict(g)
            assert set(got) == set(edges)
            for key, (w, nw) in edges.items():
                assert got[key][0] == w
                assert got[key][1] == pytest.approx(nw, rel=1e-12)


@given(record_lists(max_persons=8, max_firms=5, max_rows=16))
@settings(max_examples=60, deadline=None)
def test_graph_invariants(records):
    spells = build_spells(records)
    t = date(2021, 1, 1)
    for build in (build_firm_graph, build_employee_graph):
        try:
            g = build(spells, t)
        except HorizonError:
            continue
        assert np.all(g.edge_a < g.edge_b)  # no self-loops, canonical order
        pairs = list(zip(g.edge_a.tolist(), g.edge_b.tolist()))
        assert len(pairs) == len(set(pairs))  # no duplicates
        assert np.all(g.weight > 0)
        if g.n_edges:
            assert float(g.normalized_weight.min()) > 0
            assert float(g.normalized_weight.max()) <= 1.0 + 1e-12


@given(record_lists(max_persons=8, max_firms=5, max_rows=16))
@settings(max_examples=40, deadline=None)
def test_firm_edge_weights_monotone_in_time(records):
    spells = build_spells(records)
    t1 = date(2020, 6, 1)
    t2 = date(2021, 6, 1)
    try:
        g1 = build_firm_graph(spells, t1)
        g2 = build_firm_graph(spells, t2)
    except HorizonError:
        return
    d1, d2 = graph_as_dict(g1), graph_as_dict(g2)
    still_active = set(g2.nodes)
    for (fa, fb), (w1, _) in d1.items():
        if fa in still_active and fb in still_active:
            assert (fa, fb) in d2
            assert d2[(fa, fb)][0] >= w1


def test_node_count_equals_active_entities():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), None),
        mk_record("P2", "F1", date(2021, 5, 30), None),  # starts just before T
        mk_record("P3", "F2", date(2021, 6, 1), None),  # starts exactly at T
    ]
    g = build_employee_graph(build_spells(records), T)
    assert g.nodes == ("P1", "P2")


# --- export / import ---------------------------------------------------------


def small_graph():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), None),
        mk_record("P1", "F2", date(2020, 2, 1), None),
        mk_record("P2", "F2", date(2020, 3, 1), None),
        mk_record("P2", "F3", date(2020, 4, 1), None),
    ]
    return build_firm_graph(build_spells(records), T)


def test_export_empty_graph_is_header_only():
    g = build_firm_graph([], T)
    assert export_edge_list(g) == "source_id,target_id,weight,normalized_weight\n"


def test_export_one_edge_line_per_edge():
    g = small_graph()
    lines = export_edge_list(g).strip().splitlines()
    assert len(lines) == 1 + g.n_edges
    assert lines[0] == "source_id,target_id,weight,normalized_weight"


def test_unknown_export_format_errors():
    with pytest.raises(ValueError, match="format"):
        export_graph(small_graph(), "dot")


def test_graphml_escapes_and_parses():
    import xml.etree.ElementTree as ET

    g = small_graph()
    xml = export_graphml(g, labels={"F1": 'A & B "quoted" <firm>'})
    root = ET.fromstring(xml)
    ns = "{http://graphml.graphdrawing.org/xmlns}"
    nodes = root.findall(f".//{ns}node")
    edges = root.findall(f".//{ns}edge")
    assert len(nodes) == g.n_nodes
    assert len(edges) == g.n_edges


def test_edge_list_roundtrip_preserves_metrics():
    g = small_graph()
    edges_csv = export_edge_list(g)
    nodes_csv = export_node_list(g)
    back = read_edge_list(
        io.StringIO(edges_csv), io.StringIO(nodes_csv), mode=GraphMode.FIRM_FIRM
    )
    assert back.nodes == g.nodes
    assert graph_as_dict(back) == graph_as_dict(g)
    m1 = compute_metrics(g)
    m2 = compute_metrics(back)
    assert m1 == m2


def test_read_edge_list_without_nodes_drops_isolates():
    records = [
        mk_record("P1", "F1", date(2020, 1, 1), None),
        mk_record("P1", "F2", date(2020, 2, 1), None),
        mk_record("P9", "F9", date(2020, 1, 1), None),  # isolated firm
    ]
    g = build_firm_graph(build_spells(records), T)
    assert g.n_nodes == 3
    back = read_edge_list(io.StringIO(export_edge_list(g)))
    assert back.n_nodes == 2
