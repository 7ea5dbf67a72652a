"""Brute-force reference implementations the fast paths are checked against.

Everything here favors obviousness over speed: day sets are literal Python
sets of date ordinals, graphs are dicts, and optimal partitions come from
exhaustive enumeration.
"""

from __future__ import annotations

from datetime import date
from itertools import combinations
from math import sqrt
from typing import Iterable, Sequence

from licnet.ingest import LicenseRecord
from licnet.timeline import EmploymentSpell


def day_set(start: date, end: date | None, before: date | None) -> set[int]:
    """Inclusive day ordinals of [start, end], truncated to days < before."""
    if end is None:
        if before is None:
            raise ValueError("open interval needs a bound")
        last = before.toordinal() - 1
    else:
        last = end.toordinal()
        if before is not None:
            last = min(last, before.toordinal() - 1)
    return set(range(start.toordinal(), last + 1))


def record_day_sets(records: Iterable[LicenseRecord], before: date | None = None):
    """(person, firm) -> set of covered day ordinals, straight from rows."""
    out: dict[tuple[str, str], set[int]] = {}
    for r in records:
        out.setdefault((r.person_id, r.firm_id), set()).update(
            day_set(r.effective_date, r.end_date, before)
        )
    return out


def spell_day_sets(spells: Iterable[EmploymentSpell], before: date | None = None):
    out: dict[tuple[str, str], set[int]] = {}
    for s in spells:
        out.setdefault((s.person_id, s.firm_id), set()).update(
            day_set(s.start, s.end, before)
        )
    return out


def active_entities(spells: Sequence[EmploymentSpell], t: date, field: str) -> set[str]:
    """Entities with a spell satisfying the strict activity predicate at t."""
    out = set()
    for s in spells:
        if s.start < t and (s.end is None or s.end > t):
            out.add(getattr(s, field))
    return out


def firm_graph_oracle(spells: Sequence[EmploymentSpell], t: date):
    """All-pairs firm projection: nodes, {(fa, fb): (weight, norm)} by firm id."""
    firms = sorted(active_entities(spells, t, "firm_id"))
    employees: dict[str, set[str]] = {f: set() for f in firms}
    for s in spells:
        if s.firm_id in employees and s.start < t:
            employees[s.firm_id].add(s.person_id)
    edges = {}
    for fa, fb in combinations(firms, 2):
        shared = employees[fa] & employees[fb]
        if shared:
            w = len(shared)
            norm = w / sqrt(len(employees[fa]) * len(employees[fb]))
            edges[(fa, fb)] = (float(w), norm)
    return firms, edges


def employee_graph_oracle(
    spells: Sequence[EmploymentSpell], t: date, aggregation: str = "sum"
):
    """All-pairs employee projection via literal day-set intersection."""
    persons = sorted(active_entities(spells, t, "person_id"))
    pset = set(persons)
    by_person_firm: dict[str, dict[str, set[int]]] = {p: {} for p in persons}
    for s in spells:
        if s.person_id in pset:
            days = day_set(s.start, s.end, t)
            if days:
                by_person_firm[s.person_id].setdefault(s.firm_id, set()).update(days)

    def duration(p: str) -> int:
        firm_days = by_person_firm[p].values()
        if aggregation == "sum":
            return sum(len(d) for d in firm_days)
        u: set[int] = set()
        for d in firm_days:
            u |= d
        return len(u)

    edges = {}
    for pa, pb in combinations(persons, 2):
        if aggregation == "sum":
            days = sum(
                len(by_person_firm[pa][f] & by_person_firm[pb][f])
                for f in by_person_firm[pa]
                if f in by_person_firm[pb]
            )
        else:
            union: set[int] = set()
            for f in by_person_firm[pa]:
                if f in by_person_firm[pb]:
                    union |= by_person_firm[pa][f] & by_person_firm[pb][f]
            days = len(union)
        if days > 0:
            norm = days / max(duration(pa), duration(pb))
            edges[(pa, pb)] = (float(days), norm)
    return persons, edges


# --- plain-dict graph helpers -------------------------------------------------


def adjacency(graph) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {i: set() for i in range(graph.n_nodes)}
    for a, b in zip(graph.edge_a, graph.edge_b):
        adj[int(a)].add(int(b))
        adj[int(b)].add(int(a))
    return adj


def clustering_oracle(graph) -> float:
    adj = adjacency(graph)
    n = graph.n_nodes
    if n == 0:
        return 0.0
    total = 0.0
    for u, nb in adj.items():
        k = len(nb)
        if k < 2:
            continue
        links = sum(1 for v, w in combinations(nb, 2) if w in adj[v])
        total += 2.0 * links / (k * (k - 1))
    return total / n


def bfs_oracle(adj: dict[int, set[int]], src: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def path_length_oracle(graph) -> float:
    adj = adjacency(graph)
    comps = components_oracle(adj)
    comp = max(comps, key=len)
    total = pairs = 0
    for s in comp:
        for v, d in bfs_oracle(adj, s).items():
            if v != s:
                total += d
                pairs += 1
    return total / pairs


def components_oracle(adj: dict[int, set[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for u in adj:
        if u in seen:
            continue
        members = sorted(bfs_oracle(adj, u))
        seen.update(members)
        comps.append(members)
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def modularity_oracle(graph, labels: Sequence[int], resolution: float = 1.0,
                      weighted: bool = False) -> float:
    """Literal double sum over node pairs of (A_ij - gamma k_i k_j / 2m)."""
    n = graph.n_nodes
    A = [[0.0] * n for _ in range(n)]
    for a, b, w in zip(graph.edge_a, graph.edge_b, graph.weight):
        wt = float(w) if weighted else 1.0
        A[int(a)][int(b)] = wt
        A[int(b)][int(a)] = wt
    k = [sum(row) for row in A]
    m2 = sum(k)
    if m2 == 0:
        return 0.0
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += A[i][j] - resolution * k[i] * k[j] / m2
    return q / m2


def all_partitions(items: Sequence[int]):
    """Every set partition of *items* (restricted-growth enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in all_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] + [first]] + sub[i + 1 :]
        yield [[first]] + sub


def best_modularity_oracle(graph, resolution: float = 1.0) -> float:
    """Exhaustive maximum modularity over all partitions (tiny graphs only)."""
    n = graph.n_nodes
    best = float("-inf")
    for part in all_partitions(list(range(n))):
        labels = [0] * n
        for cid, block in enumerate(part):
            for node in block:
                labels[node] = cid
        best = max(best, modularity_oracle(graph, labels, resolution))
    return best
