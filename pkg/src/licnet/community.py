"""Louvain community detection by modularity maximization.

Two-phase scheme: seeded-shuffle local moves to the neighboring community
with the largest modularity gain (ties go to the lowest community id),
then aggregation of communities into super-nodes, repeated until the
modularity gain of a pass drops below 1e-7.

Modularity uses the Newman-Girvan form with a resolution multiplier on the
null term.  The default is the unweighted skeleton; ``weighted=True`` uses
raw edge weights (not normalized weights).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graphs import SnapshotGraph

__all__ = ["Partition", "louvain", "modularity"]

PASS_TOLERANCE = 1e-7


@dataclass(frozen=True)
class Partition:
    """Node-to-community assignment with its modularity score."""

    assignment: dict[str, int]
    modularity: float
    passes: int
    seed: int
    modularity_trace: tuple[float, ...]

    @property
    def community_count(self) -> int:
        return len(set(self.assignment.values())) if self.assignment else 0

    def sizes(self) -> list[int]:
        counts: dict[int, int] = {}
        for c in self.assignment.values():
            counts[c] = counts.get(c, 0) + 1
        return sorted(counts.values(), reverse=True)


def _edge_weights(graph: SnapshotGraph, weighted: bool) -> np.ndarray:
    if weighted:
        return graph.weight.astype(np.float64)
    return np.ones(graph.n_edges, dtype=np.float64)


def _labels_from(
    graph: SnapshotGraph, assignment: Mapping[str, int] | Sequence[int]
) -> np.ndarray:
    if isinstance(assignment, Mapping):
        try:
            return np.array([assignment[nid] for nid in graph.nodes], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"assignment misses node {exc}") from None
    if len(assignment) != graph.n_nodes:
        raise ValueError(
            f"assignment covers {len(assignment)} nodes, graph has {graph.n_nodes}"
        )
    return np.asarray(assignment, dtype=np.int64)


def modularity(
    graph: SnapshotGraph,
    assignment: Mapping[str, int] | Sequence[int],
    resolution: float = 1.0,
    weighted: bool = False,
) -> float:
    """Quality of a partition; 0.0 for an edgeless graph by convention."""
    labels = _labels_from(graph, assignment)
    w = _edge_weights(graph, weighted)
    m = float(w.sum())
    if m == 0.0:
        return 0.0
    strength = np.zeros(graph.n_nodes, dtype=np.float64)
    np.add.at(strength, graph.edge_a, w)
    np.add.at(strength, graph.edge_b, w)
    intra = w[labels[graph.edge_a] == labels[graph.edge_b]].sum()
    _, inv = np.unique(labels, return_inverse=True)
    tot = np.bincount(inv, weights=strength)
    return float(intra / m - resolution * np.square(tot / (2.0 * m)).sum())


def _local_moves(
    adj: list[list[tuple[int, float]]],
    strength: np.ndarray,
    m2: float,
    resolution: float,
    rng: random.Random,
) -> tuple[np.ndarray, bool]:
    """Sweep greedy moves until stable; returns (labels, any_move)."""
    n = len(adj)
    comm = np.arange(n, dtype=np.int64)
    tot = strength.copy()
    moved_ever = False
    order = list(range(n))
    while True:
        rng.shuffle(order)
        moves = 0
        for i in order:
            ci = int(comm[i])
            k_i = strength[i]
            tot[ci] -= k_i
            links: dict[int, float] = {ci: 0.0}
            for j, w in adj[i]:
                cj = int(comm[j])
                links[cj] = links.get(cj, 0.0) + w
            best_c, best_gain = ci, links[ci] - resolution * tot[ci] * k_i / m2
            for c in sorted(links):
                gain = links[c] - resolution * tot[c] * k_i / m2
                if gain > best_gain:
                    best_c, best_gain = c, gain
            tot[best_c] += k_i
            if best_c != ci:
                comm[i] = best_c
                moves += 1
        if moves == 0:
            break
        moved_ever = True
    return comm, moved_ever


def louvain(
    graph: SnapshotGraph,
    resolution: float = 1.0,
    seed: int = 0,
    weighted: bool = False,
) -> Partition:
    """Run Louvain on a snapshot graph; deterministic for a given seed."""
    if graph.n_nodes == 0:
        raise ValueError("cannot detect communities on an empty graph")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    rng = random.Random(seed)
    n = graph.n_nodes

    # level-graph state: simple edges u<v plus per-node self-loop mass
    edge_u = graph.edge_a.astype(np.int64)
    edge_v = graph.edge_b.astype(np.int64)
    edge_w = _edge_weights(graph, weighted)
    loops = np.zeros(n, dtype=np.float64)
    n_cur = n
    orig_to_level = np.arange(n, dtype=np.int64)  # original node -> level node

    trace: list[float] = []
    passes = 0
    final_labels = np.arange(n, dtype=np.int64)

    while True:
        strength = 2.0 * loops
        np.add.at(strength, edge_u, edge_w)
        np.add.at(strength, edge_v, edge_w)
        m2 = float(strength.sum())
        if m2 == 0.0:
            trace.append(0.0)
            passes += 1
            break
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n_cur)]
        for u, v, w in zip(edge_u, edge_v, edge_w):
            adj[u].append((int(v), float(w)))
            adj[v].append((int(u), float(w)))

        comm, moved = _local_moves(adj, strength, m2, resolution, rng)
        passes += 1
        final_labels = comm[orig_to_level]
        trace.append(modularity(graph, final_labels, resolution, weighted))
        if not moved:
            break
        if len(trace) >= 2 and trace[-1] - trace[-2] < PASS_TOLERANCE:
            break

        # aggregate communities into super-nodes
        uniq, dense = np.unique(comm, return_inverse=True)
        n_next = len(uniq)
        if n_next == n_cur:
            break
        new_loops = np.zeros(n_next, dtype=np.float64)
        np.add.at(new_loops, dense, loops)
        cu, cv = dense[edge_u], dense[edge_v]
        intra = cu == cv
        np.add.at(new_loops, cu[intra], edge_w[intra])
        lo = np.minimum(cu[~intra], cv[~intra])
        hi = np.maximum(cu[~intra], cv[~intra])
        if len(lo):
            key = lo * n_next + hi
            uk, kinv = np.unique(key, return_inverse=True)
            edge_w = np.bincount(kinv, weights=edge_w[~intra])
            edge_u = uk // n_next
            edge_v = uk % n_next
        else:
            edge_u = np.zeros(0, dtype=np.int64)
            edge_v = np.zeros(0, dtype=np.int64)
            edge_w = np.zeros(0, dtype=np.float64)
        loops = new_loops
        orig_to_level = dense[orig_to_level]
        n_cur = n_next

    # dense community ids in order of first appearance over node index
    remap: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for idx, nid in enumerate(graph.nodes):
        c = int(final_labels[idx])
        if c not in remap:
            remap[c] = len(remap)
        assignment[nid] = remap[c]

    return Partition(
        assignment=assignment,
        modularity=trace[-1],
        passes=passes,
        seed=seed,
        modularity_trace=tuple(trace),
    )
