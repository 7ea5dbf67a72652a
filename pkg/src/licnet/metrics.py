"""Structural metrics of snapshot graphs.

All metrics run on the unweighted skeleton: degree histogram, mean local
clustering (nodes of degree < 2 count as zero and stay in the mean),
average shortest-path length over the largest connected component (exact
all-sources BFS, or a seeded sampled-sources estimate), and component
structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graphs import SnapshotGraph

__all__ = [
    "PathLengthMethod",
    "MetricsReport",
    "PathLengthUndefined",
    "degree_distribution",
    "average_clustering",
    "average_path_length",
    "connected_components",
    "compute_metrics",
]


class PathLengthUndefined(ValueError):
    """Raised when no path exists to average over (edgeless graph)."""


@dataclass(frozen=True, slots=True)
class PathLengthMethod:
    method: str  # "exact" | "sampled"
    sources: int | None = None
    seed: int | None = None


@dataclass(frozen=True, slots=True)
class MetricsReport:
    node_count: int
    edge_count: int
    degree_histogram: dict[int, int]
    average_clustering: float
    average_path_length: float | None
    path_length_method: PathLengthMethod | None
    component_sizes: list[int]
    isolated_nodes: list[str]


def degree_distribution(graph: SnapshotGraph) -> dict[int, int]:
    """Unweighted degree tally: degree -> node count."""
    if graph.n_nodes == 0:
        return {}
    counts = np.bincount(graph.degrees)
    return {int(d): int(c) for d, c in enumerate(counts) if c > 0}


def _gather_neighbors(
    indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray
) -> np.ndarray:
    """Concatenated neighbor lists of all frontier nodes (ragged gather)."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    within = np.arange(total, dtype=np.int64) - np.repeat(
        np.cumsum(counts) - counts, counts
    )
    return indices[np.repeat(starts, counts) + within]


def _bfs_distances(
    indptr: np.ndarray, indices: np.ndarray, source: int, n: int
) -> np.ndarray:
    """Hop distances from *source*; unreachable nodes get -1."""
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        neigh = _gather_neighbors(indptr, indices, frontier)
        neigh = neigh[dist[neigh] < 0]
        if neigh.size == 0:
            break
        frontier = np.unique(neigh)
        d += 1
        dist[frontier] = d
    return dist


def connected_components(graph: SnapshotGraph) -> list[np.ndarray]:
    """Node-index arrays of the maximal connected sets.

    Ordered by decreasing size, then by smallest contained index.
    """
    n = graph.n_nodes
    if n == 0:
        return []
    indptr, indices = graph.csr
    unseen = graph.degrees == 0
    comps: list[np.ndarray] = [
        np.array([i], dtype=np.int64) for i in np.flatnonzero(unseen)
    ]
    visited = unseen.copy()
    for start in range(n):
        if visited[start]:
            continue
        dist = _bfs_distances(indptr, indices, start, n)
        members = np.flatnonzero(dist >= 0)
        visited[members] = True
        comps.append(members)
    comps.sort(key=lambda c: (-len(c), int(c[0])))
    return comps


def average_clustering(graph: SnapshotGraph) -> float:
    """Mean local clustering over all nodes (triangle-based, unweighted)."""
    n = graph.n_nodes
    if n == 0:
        return 0.0
    deg = graph.degrees
    # orient every edge toward the higher (degree, index) endpoint; each
    # triangle is then counted exactly once, at its lowest-ranked corner
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), deg))] = np.arange(n)
    a, b = graph.edge_a, graph.edge_b
    fwd = rank[a] < rank[b]
    src = np.where(fwd, a, b)
    dst = np.where(fwd, b, a)
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    tri = np.zeros(n, dtype=np.int64)
    marks = np.zeros(n, dtype=bool)
    for u in range(n):
        nb = dst[indptr[u] : indptr[u + 1]]
        if len(nb) < 2:
            continue
        marks[nb] = True
        gathered = _gather_neighbors(indptr, dst, nb)
        hits = marks[gathered]
        n_hits = int(hits.sum())
        if n_hits:
            tri[u] += n_hits
            counts = indptr[nb + 1] - indptr[nb]
            owners = np.repeat(nb, counts)
            np.add.at(tri, owners[hits], 1)
            np.add.at(tri, gathered[hits], 1)
        marks[nb] = False

    denom = deg * (deg - 1)
    local = np.zeros(n, dtype=np.float64)
    mask = denom > 0
    local[mask] = 2.0 * tri[mask] / denom[mask]
    return float(local.mean())


def average_path_length(
    graph: SnapshotGraph,
    method: str = "exact",
    seed: int | None = None,
    sources: int = 1000,
) -> tuple[float, PathLengthMethod]:
    """Mean shortest-path distance over the largest connected component.

    ``exact`` averages over all ordered reachable pairs; ``sampled`` BFS-es
    from *sources* seeded uniformly drawn source nodes and averages their
    distances to every other component node.
    """
    if graph.n_nodes < 2:
        raise ValueError("path length needs at least 2 nodes")
    if graph.n_edges == 0:
        raise PathLengthUndefined("graph has no edges")
    comp = max(connected_components(graph), key=len)
    size = len(comp)
    indptr, indices = graph.csr
    n = graph.n_nodes

    if method == "exact":
        srcs = comp
        record = PathLengthMethod("exact")
    elif method == "sampled":
        if seed is None:
            raise ValueError("sampled path length requires a seed")
        k = min(sources, size)
        rng = np.random.default_rng(seed)
        srcs = rng.choice(comp, size=k, replace=False)
        record = PathLengthMethod("sampled", sources=k, seed=seed)
    else:
        raise ValueError(f"unknown path length method: {method!r}")

    total = 0
    for s in srcs:
        dist = _bfs_distances(indptr, indices, int(s), n)
        total += int(dist[dist > 0].sum())
    value = total / (len(srcs) * (size - 1))
    return value, record


def compute_metrics(
    graph: SnapshotGraph,
    path_method: str = "exact",
    seed: int | None = None,
    sources: int = 1000,
) -> MetricsReport:
    """Full metric suite; path length is None when the graph has no edges."""
    comps = connected_components(graph)
    if graph.n_edges > 0 and graph.n_nodes >= 2:
        apl, record = average_path_length(graph, path_method, seed, sources)
    else:
        apl, record = None, None
    return MetricsReport(
        node_count=graph.n_nodes,
        edge_count=graph.n_edges,
        degree_histogram=degree_distribution(graph),
        average_clustering=average_clustering(graph),
        average_path_length=apl,
        path_length_method=record,
        component_sizes=[len(c) for c in comps],
        isolated_nodes=graph.isolated_nodes(),
    )


def mean_degree(report: MetricsReport) -> float:
    """2m/n from a metrics report (0 for the empty graph)."""
    if report.node_count == 0:
        return 0.0
    return 2.0 * report.edge_count / report.node_count


def histogram_series(histogram: dict[int, int]) -> Iterable[tuple[int, int]]:
    """(degree, count) pairs in ascending degree order."""
    return sorted(histogram.items())
