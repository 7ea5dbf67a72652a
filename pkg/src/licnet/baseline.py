"""Random-graph null models matched to a real snapshot.

``gnm`` (the default) draws a uniform simple graph with the same node and
edge counts as the real graph; ``gnp`` uses independent edges with
p = 2m / (n(n-1)).  Comparison runs derive per-run seeds as seed + run
index and reuse the same path-length method as the real graph, so the two
columns are computed identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GraphMode, SnapshotGraph
from .metrics import MetricsReport, compute_metrics, mean_degree

__all__ = ["BaselineAverages", "BaselineComparison", "generate_er", "compare"]


def _sample_pair_indices(total: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """m distinct integers uniform over [0, total), ascending."""
    if m == total:
        return np.arange(total, dtype=np.int64)
    if total <= 4_000_000:
        return np.sort(rng.permutation(total)[:m].astype(np.int64))
    # rejection batches: keep first occurrences in draw order, top up as needed
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < m:
        need = m - len(chosen)
        batch = rng.integers(0, total, size=int(need * 1.1) + 16, dtype=np.int64)
        pool = np.concatenate([chosen, batch])
        _, first = np.unique(pool, return_index=True)
        chosen = pool[np.sort(first)]
    return np.sort(chosen[:m])


def _decode_pairs(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographic pair index -> (i, j) with i < j < n."""

    def pairs_before(i: np.ndarray) -> np.ndarray:
        return i * (2 * n - i - 1) // 2

    c = 2 * n - 1
    i = np.floor((c - np.sqrt(c * c - 8.0 * k)) / 2.0).astype(np.int64)
    i = np.clip(i, 0, n - 2)
    for _ in range(2):  # fix float rounding, off by at most one per step
        i = np.where(pairs_before(i + 1) <= k, i + 1, i)
        i = np.where(pairs_before(i) > k, i - 1, i)
    j = k - pairs_before(i) + i + 1
    return i, j


def generate_er(
    n: int,
    m: int | None = None,
    p: float | None = None,
    seed: int = 0,
) -> SnapshotGraph:
    """Sample a simple undirected random graph on n nodes.

    Give exactly one of *m* (uniform over graphs with m edges) or *p*
    (independent edge probability).  Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if (m is None) == (p is None):
        raise ValueError("give exactly one of m or p")
    total = n * (n - 1) // 2
    rng = np.random.default_rng(seed)
    if p is not None:
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        m = int(rng.binomial(total, p)) if total else 0
    assert m is not None
    if not 0 <= m <= total:
        raise ValueError(f"m must be in [0, {total}]")

    idx = _sample_pair_indices(total, m, rng)
    a, b = _decode_pairs(idx, n) if m else (np.zeros(0, np.int64), np.zeros(0, np.int64))
    width = len(str(n - 1))
    nodes = tuple(f"n{i:0{width}d}" for i in range(n))
    ones = np.ones(m, dtype=np.float64)
    return SnapshotGraph(
        timestamp=None,
        mode=GraphMode.RANDOM,
        nodes=nodes,
        edge_a=a,
        edge_b=b,
        weight=ones,
        normalized_weight=ones.copy(),
    )


@dataclass(frozen=True)
class BaselineAverages:
    """Metric suite averaged over the baseline runs."""

    node_count: float
    edge_count: float
    edge_counts: tuple[int, ...]
    mean_degree: float
    average_clustering: float
    average_clustering_std: float
    average_path_length: float | None
    average_path_length_std: float | None
    largest_component_fraction: float
    degree_histogram: dict[int, float]


@dataclass(frozen=True)
class BaselineComparison:
    real_metrics: MetricsReport
    baseline_metrics: BaselineAverages
    runs: int
    seed: int
    model: str

    def ratios(self) -> dict[str, float | None]:
        """real / baseline per headline metric (None when undefined)."""
        base = self.baseline_metrics
        real = self.real_metrics
        out: dict[str, float | None] = {}
        out["average_clustering"] = (
            real.average_clustering / base.average_clustering
            if base.average_clustering
            else None
        )
        out["average_path_length"] = (
            real.average_path_length / base.average_path_length
            if real.average_path_length and base.average_path_length
            else None
        )
        rd = mean_degree(real)
        out["mean_degree"] = rd / base.mean_degree if base.mean_degree else None
        return out


def compare(
    real: SnapshotGraph,
    model: str = "gnm",
    runs: int = 5,
    seed: int = 0,
    path_method: str = "exact",
    path_sources: int = 1000,
) -> BaselineComparison:
    """Metric suite of *real* against matched random graphs, averaged."""
    if model not in ("gnm", "gnp"):
        raise ValueError(f"unknown baseline model: {model!r}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    n, m = real.n_nodes, real.n_edges
    real_report = compute_metrics(real, path_method, seed=seed, sources=path_sources)

    reports: list[MetricsReport] = []
    for r in range(runs):
        run_seed = seed + r
        if model == "gnm":
            g = generate_er(n, m=m, seed=run_seed)
        else:
            p = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
            g = generate_er(n, p=p, seed=run_seed)
        reports.append(compute_metrics(g, path_method, seed=run_seed, sources=path_sources))

    clus = np.array([r.average_clustering for r in reports])
    apls = [r.average_path_length for r in reports]
    have_apl = all(x is not None for x in apls)
    apl_arr = np.array(apls, dtype=np.float64) if have_apl else None
    hist_sum: dict[int, float] = {}
    for rep in reports:
        for d, c in rep.degree_histogram.items():
            hist_sum[d] = hist_sum.get(d, 0.0) + c
    largest_frac = float(
        np.mean(
            [
                (r.component_sizes[0] / r.node_count) if r.node_count else 0.0
                for r in reports
            ]
        )
    )
    baseline = BaselineAverages(
        node_count=float(np.mean([r.node_count for r in reports])),
        edge_count=float(np.mean([r.edge_count for r in reports])),
        edge_counts=tuple(r.edge_count for r in reports),
        mean_degree=float(np.mean([mean_degree(r) for r in reports])),
        average_clustering=float(clus.mean()),
        average_clustering_std=float(clus.std()),
        average_path_length=float(apl_arr.mean()) if apl_arr is not None else None,
        average_path_length_std=float(apl_arr.std()) if apl_arr is not None else None,
        largest_component_fraction=largest_frac,
        degree_histogram={d: s / runs for d, s in sorted(hist_sum.items())},
    )
    return BaselineComparison(
        real_metrics=real_report,
        baseline_metrics=baseline,
        runs=runs,
        seed=seed,
        model=model,
    )
