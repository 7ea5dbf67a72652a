"""Temporal one-mode projections of the person-firm relation.

Two snapshot constructions share one graph type:

* Firm mode: nodes are firms with at least one active employee at *t*
  (strict predicate).  Two firms are linked when at least one person has a
  spell at each that started before *t*; the weight is the number of such
  shared persons, normalized by the geometric mean of the two firms'
  historical employee sets.

* Employee mode: nodes are persons active at *t*.  Two persons are linked
  when their employment at some common firm overlaps by at least one day
  before *t*; the weight is the overlap day count, normalized by the longer
  of the two careers (both truncated to days before *t*).

Overlap aggregation across firms is ``sum`` by default (simultaneous
overlap at two firms counts twice); ``union`` counts each calendar day
once.  The normalization denominator follows the same aggregation (summed
per-firm tenure days vs. career-day union) so normalized weights stay in
(0, 1] under either mode.

Shared employees are not required to be active at *t* themselves: edges
look at history before *t*, only the endpoints must pass the activity
predicate.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence, Union
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .timeline import EmploymentSpell

__all__ = [
    "GraphMode",
    "SnapshotGraph",
    "HorizonError",
    "build_firm_graph",
    "build_employee_graph",
    "export_graph",
    "export_edge_list",
    "export_node_list",
    "export_graphml",
    "read_edge_list",
]


class GraphMode(str, Enum):
    FIRM_FIRM = "firm"
    EMPLOYEE_EMPLOYEE = "employee"
    RANDOM = "random"


class HorizonError(ValueError):
    """Snapshot date falls outside the span covered by the spells."""


@dataclass(frozen=True, eq=False)
class SnapshotGraph:
    """Weighted undirected graph at one timestamp.

    Edges are stored once with ``edge_a[i] < edge_b[i]``, sorted by the
    (a, b) index pair; node indices refer into ``nodes``.
    """

    timestamp: date | None
    mode: GraphMode | None
    nodes: tuple[str, ...]
    edge_a: np.ndarray = field(repr=False)
    edge_b: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)
    normalized_weight: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edge_a)

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {nid: i for i, nid in enumerate(self.nodes)}

    @cached_property
    def degrees(self) -> np.ndarray:
        both = np.concatenate([self.edge_a, self.edge_b])
        return np.bincount(both, minlength=self.n_nodes).astype(np.int64)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) adjacency over both edge directions."""
        src = np.concatenate([self.edge_a, self.edge_b])
        dst = np.concatenate([self.edge_b, self.edge_a])
        order = np.argsort(src, kind="stable")
        indices = dst[order]
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n_nodes), out=indptr[1:])
        return indptr, indices

    def isolated_nodes(self) -> list[str]:
        return [self.nodes[i] for i in np.flatnonzero(self.degrees == 0)]

    def edge_rows(self) -> Iterable[tuple[str, str, float, float]]:
        for a, b, w, nw in zip(
            self.edge_a, self.edge_b, self.weight, self.normalized_weight
        ):
            yield self.nodes[a], self.nodes[b], float(w), float(nw)

    @staticmethod
    def from_edges(
        nodes: Sequence[str],
        edges: Mapping[tuple[int, int], tuple[float, float]],
        *,
        timestamp: date | None = None,
        mode: GraphMode | None = None,
    ) -> "SnapshotGraph":
        """Build from {(a, b): (weight, normalized_weight)} with a < b."""
        keys = sorted(edges)
        a = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        b = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        if len(keys) and (np.any(a >= b) or np.any(b >= len(nodes)) or np.any(a < 0)):
            raise ValueError("edge endpoints must satisfy 0 <= a < b < n_nodes")
        w = np.fromiter((edges[k][0] for k in keys), dtype=np.float64, count=len(keys))
        nw = np.fromiter((edges[k][1] for k in keys), dtype=np.float64, count=len(keys))
        if np.any(w <= 0):
            raise ValueError("edge weights must be positive")
        return SnapshotGraph(
            timestamp=timestamp,
            mode=mode,
            nodes=tuple(nodes),
            edge_a=a,
            edge_b=b,
            weight=w,
            normalized_weight=nw,
        )


def _empty_graph(t: date | None, mode: GraphMode) -> SnapshotGraph:
    z = np.zeros(0, dtype=np.int64)
    zf = np.zeros(0, dtype=np.float64)
    return SnapshotGraph(t, mode, (), z, z.copy(), zf, zf.copy())


def _check_horizon(spells: Sequence[EmploymentSpell], t: date) -> None:
    earliest = min(s.start for s in spells)
    has_open = any(s.end is None for s in spells)
    latest = None if has_open else max(s.end for s in spells)  # type: ignore[type-var]
    if t < earliest or (latest is not None and t > latest):
        hi = "open" if latest is None else latest.isoformat()
        raise HorizonError(
            f"snapshot date {t.isoformat()} outside spell horizon "
            f"[{earliest.isoformat()}, {hi}]"
        )


def build_firm_graph(
    spells: Sequence[EmploymentSpell],
    t: date,
    *,
    employee_scope: str = "history",
) -> SnapshotGraph:
    """Firm-mode snapshot at *t*.

    ``employee_scope="history"`` counts a firm's employee set over spells
    starting before *t* (the default, consistent with the edge rule);
    ``"alltime"`` ignores the time bound in the shared-employee sets.
    """
    if employee_scope not in ("history", "alltime"):
        raise ValueError(f"unknown employee_scope: {employee_scope!r}")
    if not spells:
        return _empty_graph(t, GraphMode.FIRM_FIRM)
    _check_horizon(spells, t)

    active_firms: set[str] = set()
    for s in spells:
        if s.start < t and (s.end is None or s.end > t):
            active_firms.add(s.firm_id)
    nodes = tuple(sorted(active_firms))
    index = {fid: i for i, fid in enumerate(nodes)}

    # person -> node firms in scope; firm -> employee count in scope
    firm_sets: dict[str, set[int]] = {}
    for s in spells:
        if employee_scope == "history" and not s.start < t:
            continue
        fi = index.get(s.firm_id)
        if fi is not None:
            firm_sets.setdefault(s.person_id, set()).add(fi)

    employee_count = np.zeros(len(nodes), dtype=np.int64)
    pair_weight: dict[tuple[int, int], int] = {}
    for firms in firm_sets.values():
        for fi in firms:
            employee_count[fi] += 1
        if len(firms) > 1:
            for a, b in combinations(sorted(firms), 2):
                pair_weight[(a, b)] = pair_weight.get((a, b), 0) + 1

    edges = {
        (a, b): (
            float(w),
            w / float(np.sqrt(employee_count[a] * employee_count[b])),
        )
        for (a, b), w in pair_weight.items()
    }
    return SnapshotGraph.from_edges(
        nodes, edges, timestamp=t, mode=GraphMode.FIRM_FIRM
    )


class _PairDays:
    """Accumulates (a, b) -> day counts from per-firm numpy batches."""

    def __init__(self, n: int):
        self._n = n
        self._keys: list[np.ndarray] = []
        self._days: list[np.ndarray] = []
        self._pending = 0

    def add(self, a: np.ndarray, b: np.ndarray, days: np.ndarray) -> None:
        self._keys.append(a * self._n + b)
        self._days.append(days)
        self._pending += len(days)
        if self._pending > 20_000_000:
            self._compact()

    def _compact(self) -> None:
        keys = np.concatenate(self._keys)
        days = np.concatenate(self._days)
        uniq, inv = np.unique(keys, return_inverse=True)
        summed = np.bincount(inv, weights=days)
        self._keys = [uniq]
        self._days = [summed]
        self._pending = len(uniq)

    def finalize(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self._keys:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy(), np.zeros(0, dtype=np.float64)
        self._compact()
        keys, days = self._keys[0], self._days[0]
        return keys // self._n, keys % self._n, days


def build_employee_graph(
    spells: Sequence[EmploymentSpell],
    t: date,
    *,
    aggregation: str = "sum",
) -> SnapshotGraph:
    """Employee-mode snapshot at *t* (see module docstring for semantics)."""
    if aggregation not in ("sum", "union"):
        raise ValueError(f"unknown aggregation: {aggregation!r}")
    if not spells:
        return _empty_graph(t, GraphMode.EMPLOYEE_EMPLOYEE)
    _check_horizon(spells, t)

    active: set[str] = set()
    for s in spells:
        if s.start < t and (s.end is None or s.end > t):
            active.add(s.person_id)
    nodes = tuple(sorted(active))
    index = {pid: i for i, pid in enumerate(nodes)}
    n = len(nodes)
    t_ord = t.toordinal()

    # spell units per firm, clipped to days strictly before t, active persons only
    units_by_firm: dict[str, list[tuple[int, int, int]]] = {}
    for s in spells:
        pi = index.get(s.person_id)
        if pi is None:
            continue
        s_ord = s.start.toordinal()
        e_ord = t_ord - 1 if s.end is None else min(s.end.toordinal(), t_ord - 1)
        if s_ord <= e_ord:
            units_by_firm.setdefault(s.firm_id, []).append((s_ord, e_ord, pi))

    duration = np.zeros(n, dtype=np.int64)
    if aggregation == "sum":
        acc = _PairDays(n)
        for units in units_by_firm.values():
            units.sort()
            starts = np.fromiter((u[0] for u in units), dtype=np.int64, count=len(units))
            ends = np.fromiter((u[1] for u in units), dtype=np.int64, count=len(units))
            pis = np.fromiter((u[2] for u in units), dtype=np.int64, count=len(units))
            np.add.at(duration, pis, ends - starts + 1)
            for i in range(len(units)):
                hi = int(np.searchsorted(starts, ends[i], side="right"))
                if hi <= i + 1:
                    continue
                js = slice(i + 1, hi)
                days = np.minimum(ends[i], ends[js]) - starts[js] + 1
                pa = np.full(hi - i - 1, pis[i])
                pb = pis[js]
                mask = pa != pb  # same-person units are disjoint, but stay safe
                lo = np.minimum(pa, pb)[mask]
                hb = np.maximum(pa, pb)[mask]
                acc.add(lo, hb, days[mask].astype(np.float64))
        a_arr, b_arr, days_arr = acc.finalize()
    else:
        # union mode: keep per-pair interval lists, count union days at the end
        pair_ivs: dict[tuple[int, int], list[tuple[int, int]]] = {}
        person_ivs: dict[int, list[tuple[int, int]]] = {}
        for units in units_by_firm.values():
            units.sort()
            for i, (s1, e1, p1) in enumerate(units):
                person_ivs.setdefault(p1, []).append((s1, e1))
                for s2, e2, p2 in units[i + 1 :]:
                    if s2 > e1:
                        break
                    if p1 == p2:
                        continue
                    key = (p1, p2) if p1 < p2 else (p2, p1)
                    pair_ivs.setdefault(key, []).append((s2, min(e1, e2)))
        for pi, ivs in person_ivs.items():
            duration[pi] = _union_days(ivs)
        items = sorted(pair_ivs.items())
        a_arr = np.fromiter((k[0] for k, _ in items), dtype=np.int64, count=len(items))
        b_arr = np.fromiter((k[1] for k, _ in items), dtype=np.int64, count=len(items))
        days_arr = np.fromiter(
            (_union_days(ivs) for _, ivs in items), dtype=np.float64, count=len(items)
        )

    if len(a_arr):
        order = np.lexsort((b_arr, a_arr))
        a_arr, b_arr, days_arr = a_arr[order], b_arr[order], days_arr[order]
        denom = np.maximum(duration[a_arr], duration[b_arr]).astype(np.float64)
        norm = days_arr / denom
    else:
        norm = np.zeros(0, dtype=np.float64)

    return SnapshotGraph(
        timestamp=t,
        mode=GraphMode.EMPLOYEE_EMPLOYEE,
        nodes=nodes,
        edge_a=a_arr.astype(np.int64),
        edge_b=b_arr.astype(np.int64),
        weight=days_arr.astype(np.float64),
        normalized_weight=norm,
    )


def _union_days(intervals: list[tuple[int, int]]) -> int:
    total = 0
    cur_s = cur_e = None
    for s, e in sorted(intervals):
        if cur_e is None or s > cur_e + 1:
            if cur_e is not None:
                total += cur_e - cur_s + 1
            cur_s, cur_e = s, e
        elif e > cur_e:
            cur_e = e
    if cur_e is not None:
        total += cur_e - cur_s + 1
    return total


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------

EDGE_HEADER = ["source_id", "target_id", "weight", "normalized_weight"]
NODE_HEADER = ["node_id", "label"]


def export_edge_list(graph: SnapshotGraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EDGE_HEADER)
    for src, dst, wt, nwt in graph.edge_rows():
        w.writerow([src, dst, repr(wt), repr(nwt)])
    return buf.getvalue()


def export_node_list(graph: SnapshotGraph, labels: Mapping[str, str] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(NODE_HEADER)
    for nid in graph.nodes:
        w.writerow([nid, (labels or {}).get(nid, "")])
    return buf.getvalue()


def export_graphml(graph: SnapshotGraph, labels: Mapping[str, str] | None = None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <key id="normalized_weight" for="edge" attr.name="normalized_weight"'
        ' attr.type="double"/>',
        '  <graph edgedefault="undirected">',
    ]
    for nid in graph.nodes:
        label = (labels or {}).get(nid)
        if label:
            lines.append(
                f"    <node id={quoteattr(nid)}>"
                f'<data key="label">{escape(label)}</data></node>'
            )
        else:
            lines.append(f"    <node id={quoteattr(nid)}/>")
    for src, dst, wt, nwt in graph.edge_rows():
        lines.append(
            f"    <edge source={quoteattr(src)} target={quoteattr(dst)}>"
            f'<data key="weight">{wt!r}</data>'
            f'<data key="normalized_weight">{nwt!r}</data></edge>'
        )
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def export_graph(graph: SnapshotGraph, format: str, labels: Mapping[str, str] | None = None) -> bytes:
    """Serialize a graph; formats: ``edgelist`` (CSV) or ``graphml``."""
    if format == "edgelist":
        return export_edge_list(graph).encode("utf-8")
    if format == "graphml":
        return export_graphml(graph, labels).encode("utf-8")
    raise ValueError(f"unknown graph export format: {format!r}")


def read_edge_list(
    edges_source: Union[str, Path, IO[str]],
    nodes_source: Union[str, Path, IO[str], None] = None,
    *,
    mode: GraphMode | None = None,
    timestamp: date | None = None,
) -> SnapshotGraph:
    """Load a graph from an exported edge list (plus optional node list).

    Without a node list, isolated nodes are unrecoverable; with one, the
    node order of the original graph is preserved.
    """

    def _rows(src):
        if isinstance(src, (str, Path)):
            with open(src, "r", encoding="utf-8", newline="") as fh:
                yield from csv.reader(fh)
        else:
            yield from csv.reader(src)

    node_ids: list[str] = []
    if nodes_source is not None:
        rows = _rows(nodes_source)
        header = next(rows, None)
        if header is None or header[0] != "node_id":
            raise ValueError("node list must start with a node_id header")
        node_ids = [r[0] for r in rows if r]

    raw_edges: list[tuple[str, str, float, float]] = []
    rows = _rows(edges_source)
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != EDGE_HEADER:
        raise ValueError(f"edge list must have header {','.join(EDGE_HEADER)}")
    for r in rows:
        if not r:
            continue
        raw_edges.append((r[0], r[1], float(r[2]), float(r[3])))

    if not node_ids:
        seen = {e[0] for e in raw_edges} | {e[1] for e in raw_edges}
        node_ids = sorted(seen)
    index = {nid: i for i, nid in enumerate(node_ids)}
    edges: dict[tuple[int, int], tuple[float, float]] = {}
    for src, dst, wt, nwt in raw_edges:
        try:
            a, b = index[src], index[dst]
        except KeyError as exc:
            raise ValueError(f"edge endpoint {exc} missing from node list") from None
        if a == b:
            raise ValueError(f"self-loop on {src}")
        if a > b:
            a, b = b, a
        if (a, b) in edges:
            raise ValueError(f"duplicate edge {src}-{dst}")
        edges[(a, b)] = (wt, nwt)
    return SnapshotGraph.from_edges(node_ids, edges, timestamp=timestamp, mode=mode)
