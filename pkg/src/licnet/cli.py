"""Command-line pipelines over the register.

Subcommands: ingest, stats, graph, metrics, communities, baseline, enrich,
synth.  Every option can also come from a flat key-value config file
(``--config``); a flag given on the command line wins over the file.  Config
keys are the long flag names without the leading dashes, e.g.::

    input = register.csv
    outdir = out
    at = 2024-02-15
    path-method = sampled
    seed = 7

All artifacts are deterministic: JSON is written with sorted keys and every
JSON artifact embeds the resolved run configuration under ``provenance``.
Randomness everywhere derives from the single config seed through
:func:`derive_seed` (seed plus a purpose tag), so a whole run is
reproducible from one number.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import baseline as baseline_mod
from . import community as community_mod
from . import enrich as enrich_mod
from . import stats as stats_mod
from . import synth as synth_mod
from .graphs import (
    GraphMode,
    SnapshotGraph,
    build_employee_graph,
    build_firm_graph,
    export_edge_list,
    export_graphml,
    export_node_list,
    read_edge_list,
)
from .ingest import IngestOptions, LicenseRecord, parse_register, records_to_csv, validate_records
from .metrics import compute_metrics, mean_degree
from .timeline import build_spells

__all__ = ["RunConfig", "derive_seed", "main"]

DEFAULT_SEED = 1729
USAGE_ERROR = 2


def derive_seed(seed: int, purpose: str) -> int:
    """Stable per-purpose seed: first 8 bytes of sha256("{seed}:{purpose}")."""
    digest = hashlib.sha256(f"{seed}:{purpose}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**31)


@dataclass(frozen=True)
class RunConfig:
    """Resolved options of one subcommand run; embedded in JSON artifacts."""

    subcommand: str
    options: dict[str, Any]

    def provenance(self) -> dict[str, Any]:
        return {"subcommand": self.subcommand, **self.options}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# option resolution and artifact plumbing
# ---------------------------------------------------------------------------


def _read_config_file(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


class _Options:
    """Flag-over-config-file resolution for one run."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._file = _read_config_file(args.config) if args.config else {}
        self.resolved: dict[str, Any] = {}

    def get(self, key: str, default: Any = None, cast=None, required: bool = False) -> Any:
        attr = key.replace("-", "_")
        value = getattr(self._args, attr, None)
        if value is None and key in self._file:
            raw = self._file[key]
            value = (cast or str)(raw) if cast is not str else raw
        elif value is not None and cast and isinstance(value, str):
            value = cast(value)
        if value is None:
            value = default
        if value is None and required:
            raise UsageError(f"missing required option --{key}")
        self.resolved[key] = value
        return value


def _parse_date(text: str) -> date:
    return date.fromisoformat(text)


def _parse_dates(text: str) -> list[date]:
    return [date.fromisoformat(part.strip()) for part in text.split(",") if part.strip()]


def _flag(value: str) -> bool:
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _jsonable(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, dict):
        return {str(_jsonable(k)): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    return value


def _write_json(path: Path, payload: dict[str, Any], config: RunConfig, summary: str) -> None:
    payload = dict(payload)
    payload["provenance"] = config.provenance()
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")
    print(f"wrote {path}: {summary}")


def _write_text(path: Path, text: str, summary: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}: {summary}")


def _load_records(opts: _Options) -> list[LicenseRecord]:
    input_path = opts.get("input", cast=str, required=True)
    strict = opts.get("strict", default=False, cast=_flag)
    records, report = parse_register(input_path, IngestOptions(strict=bool(strict)))
    if report.rows_rejected:
        print(
            f"note: {report.rows_rejected} of {report.rows_read} rows rejected "
            f"({', '.join(f'{k}={v}' for k, v in report.rejection_reasons.items())})",
            file=sys.stderr,
        )
    return records


def _load_graph(opts: _Options) -> SnapshotGraph:
    edges = opts.get("edges", cast=str, required=True)
    nodes = opts.get("nodes", cast=str)
    return read_edge_list(edges, nodes)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_ingest(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    records, report = parse_register(
        opts.get("input", cast=str, required=True),
        IngestOptions(strict=bool(opts.get("strict", default=False, cast=_flag))),
    )
    config = RunConfig("ingest", opts.resolved)
    _write_json(
        outdir / "ingest_report.json",
        {
            "rows_read": report.rows_read,
            "rows_accepted": report.rows_accepted,
            "rows_rejected": report.rows_rejected,
            "rejection_reasons": report.rejection_reasons,
            "unique_persons": len({r.person_id for r in records}),
            "unique_firms": len({r.firm_id for r in records}),
        },
        config,
        f"{report.rows_read} rows read, {report.rows_accepted} accepted, "
        f"{report.rows_rejected} rejected",
    )
    anomalies = validate_records(records)
    _write_json(
        outdir / "anomalies.json",
        {"count": len(anomalies), "anomalies": anomalies},
        config,
        f"{len(anomalies)} anomalies",
    )


def _cmd_stats(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    horizon_end = opts.get("horizon-end", cast=_parse_date)
    records = _load_records(opts)
    spells = build_spells(records)
    config = RunConfig("stats", opts.resolved)

    ks = stats_mod.key_stats(records, spells, horizon_end=horizon_end)
    _write_json(
        outdir / "key_stats.json",
        dataclasses.asdict(ks),
        config,
        f"{ks.total_licenses} licenses, {ks.total_employees} employees, "
        f"{ks.total_firms} firms",
    )

    dist = stats_mod.activity_distribution(records)
    _write_json(
        outdir / "activity_distribution.json",
        {"counts": dist, "total": sum(dist.values())},
        config,
        f"{len(dist)} activity kinds",
    )

    series = stats_mod.creation_termination_series(records)
    _write_json(
        outdir / "yearly_series.json",
        {"created": series.created, "terminated": series.terminated},
        config,
        f"{len(series.created)} years",
    )

    persons = len({r.person_id for r in records})
    combos: dict[str, Any] = {}
    single_share = None
    for k in range(1, 5):
        combo = stats_mod.license_type_combinations(records, k)
        combos[str(k)] = [
            {"types": list(types), "persons": count}
            for types, count in sorted(combo.items(), key=lambda tc: (-tc[1], tc[0]))
        ]
        if k == 1 and persons:
            single_share = sum(combo.values()) / persons
    _write_json(
        outdir / "license_combinations.json",
        {"combinations": combos, "single_type_share": single_share},
        config,
        "combination sizes 1-4",
    )

    top = stats_mod.top_firms_by_licensees(records, 20)
    _write_json(
        outdir / "top_firms.json",
        {"firms": [{"name": name, "licensees": count} for name, count in top]},
        config,
        f"top {len(top)} firms",
    )


def _node_labels(records: Iterable[LicenseRecord], mode: GraphMode) -> dict[str, str]:
    from collections import Counter

    counts: dict[str, Counter[str]] = {}
    for r in records:
        if mode is GraphMode.FIRM_FIRM:
            counts.setdefault(r.firm_id, Counter())[r.firm_name] += 1
        else:
            counts.setdefault(r.person_id, Counter())[r.fullname] += 1
    return {
        eid: min(c.items(), key=lambda nc: (-nc[1], nc[0]))[0] for eid, c in counts.items()
    }


def _cmd_graph(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    mode_name = opts.get("mode", default="firm", cast=str)
    dates = opts.get("at", cast=_parse_dates, required=True)
    aggregation = opts.get("overlap-aggregation", default="sum", cast=str)
    scope = opts.get("employee-scope", default="history", cast=str)
    write_graphml = bool(opts.get("graphml", default=False, cast=_flag))
    if mode_name not in ("firm", "employee"):
        raise UsageError(f"unknown graph mode {mode_name!r}")
    records = _load_records(opts)
    spells = build_spells(records)
    config = RunConfig("graph", opts.resolved)

    for t in dates:
        if mode_name == "firm":
            graph = build_firm_graph(spells, t, employee_scope=scope)
        else:
            graph = build_employee_graph(spells, t, aggregation=aggregation)
        labels = _node_labels(records, graph.mode)
        prefix = f"{mode_name}_{t.isoformat()}"
        summary = (
            f"{mode_name} graph at {t.isoformat()}: "
            f"{graph.n_nodes} nodes, {graph.n_edges} edges"
        )
        _write_text(outdir / f"{prefix}_edges.csv", export_edge_list(graph), summary)
        _write_text(
            outdir / f"{prefix}_nodes.csv",
            export_node_list(graph, labels),
            f"{graph.n_nodes} nodes",
        )
        _write_json(
            outdir / f"{prefix}_summary.json",
            {
                "timestamp": t,
                "mode": graph.mode,
                "node_count": graph.n_nodes,
                "edge_count": graph.n_edges,
                "isolated_nodes": graph.isolated_nodes(),
            },
            config,
            summary,
        )
        if write_graphml:
            _write_text(
                outdir / f"{prefix}.graphml",
                export_graphml(graph, labels),
                f"graphml, {graph.n_nodes} nodes",
            )


def _cmd_metrics(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    method = opts.get("path-method", default="exact", cast=str)
    sources = int(opts.get("sources", default=1000, cast=int))
    seed = int(opts.get("seed", default=DEFAULT_SEED, cast=int))
    graph = _load_graph(opts)
    config = RunConfig("metrics", opts.resolved)
    report = compute_metrics(
        graph, method, seed=derive_seed(seed, "path-sample"), sources=sources
    )
    apl = "n/a" if report.average_path_length is None else f"{report.average_path_length:.4f}"
    _write_json(
        outdir / "metrics.json",
        dataclasses.asdict(report),
        config,
        f"{report.node_count} nodes, clustering {report.average_clustering:.4f}, "
        f"path length {apl}",
    )
    hist_lines = ["degree,count"] + [
        f"{d},{c}" for d, c in sorted(report.degree_histogram.items())
    ]
    _write_text(
        outdir / "degree_histogram.csv",
        "\n".join(hist_lines) + "\n",
        f"{len(report.degree_histogram)} distinct degrees",
    )


def _cmd_communities(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    resolution = float(opts.get("resolution", default=1.0, cast=float))
    weighted = bool(opts.get("weighted", default=False, cast=_flag))
    seed = int(opts.get("seed", default=DEFAULT_SEED, cast=int))
    graph = _load_graph(opts)
    config = RunConfig("communities", opts.resolved)
    part = community_mod.louvain(
        graph, resolution=resolution, seed=derive_seed(seed, "louvain"), weighted=weighted
    )
    lines = ["node_id,community_id"] + [
        f"{nid},{part.assignment[nid]}" for nid in graph.nodes
    ]
    _write_text(
        outdir / "partition.csv",
        "\n".join(lines) + "\n",
        f"{part.community_count} communities",
    )
    _write_json(
        outdir / "communities.json",
        {
            "modularity": part.modularity,
            "passes": part.passes,
            "seed": part.seed,
            "community_count": part.community_count,
            "sizes": part.sizes(),
        },
        config,
        f"{part.community_count} communities, modularity {part.modularity:.4f}",
    )


def _cmd_baseline(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    model = opts.get("er-model", default="gnm", cast=str)
    runs = int(opts.get("runs", default=5, cast=int))
    method = opts.get("path-method", default="exact", cast=str)
    sources = int(opts.get("sources", default=1000, cast=int))
    seed = int(opts.get("seed", default=DEFAULT_SEED, cast=int))
    graph = _load_graph(opts)
    config = RunConfig("baseline", opts.resolved)
    cmp_ = baseline_mod.compare(
        graph,
        model=model,
        runs=runs,
        seed=derive_seed(seed, "baseline"),
        path_method=method,
        path_sources=sources,
    )
    real = cmp_.real_metrics
    base = cmp_.baseline_metrics
    _write_json(
        outdir / "baseline.json",
        {
            "model": cmp_.model,
            "runs": cmp_.runs,
            "seed": cmp_.seed,
            "real": dataclasses.asdict(real),
            "real_mean_degree": mean_degree(real),
            "baseline": dataclasses.asdict(base),
            "ratios": cmp_.ratios(),
        },
        config,
        f"{cmp_.model} x{cmp_.runs}: clustering {real.average_clustering:.4f} vs "
        f"{base.average_clustering:.4f}",
    )


def _cmd_enrich(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    attr_path = opts.get("attributes", cast=str, required=True)
    group_by = opts.get("group-by", cast=str)
    at = opts.get("at", cast=_parse_date)
    series_filter = opts.get("series-filter", cast=str)
    side_share = bool(opts.get("side-share", default=False, cast=_flag))
    if not (group_by or series_filter or side_share):
        raise UsageError("enrich needs --group-by, --series-filter, or --side-share")
    records = _load_records(opts)
    table = enrich_mod.load_attributes(attr_path)
    config = RunConfig("enrich", opts.resolved)

    if group_by:
        counts = enrich_mod.grouped_counts(records, table, group_by, at=at)
        _write_json(
            outdir / "grouped_counts.json",
            {
                "attribute": group_by,
                "at": at,
                "groups": {
                    v: {"count": c, "ratio": ratio}
                    for v, (c, ratio) in counts.groups.items()
                },
                "matched": counts.matched,
                "unmatched": counts.unmatched,
            },
            config,
            f"{len(counts.groups)} values, coverage {counts.matched}/"
            f"{counts.matched + counts.unmatched}",
        )
    if series_filter:
        if "=" not in series_filter:
            raise UsageError("--series-filter must look like attribute=value")
        attr, _, value = series_filter.partition("=")
        series = enrich_mod.attribute_timeseries(records, table, attr.strip(), value.strip())
        _write_json(
            outdir / "attribute_series.json",
            {
                "filter": {"attribute": attr.strip(), "value": value.strip()},
                "created": series.created,
                "terminated": series.terminated,
            },
            config,
            f"{len(series.created)} years for {series_filter}",
        )
    if side_share:
        shares = enrich_mod.side_share_timeseries(records, table)
        _write_json(
            outdir / "side_share.json",
            {"buy_side_share": shares},
            config,
            f"{len(shares)} years",
        )


def _cmd_synth(opts: _Options) -> None:
    outdir = Path(opts.get("outdir", cast=str, required=True))
    config_obj = synth_mod.SynthConfig(
        persons=int(opts.get("persons", default=100, cast=int)),
        firms=int(opts.get("firms", default=10, cast=int)),
        horizon_start=opts.get("start", default=date(2003, 4, 1), cast=_parse_date),
        horizon_end=opts.get("end", default=date(2024, 3, 1), cast=_parse_date),
        mean_tenure_days=int(opts.get("mean-tenure-days", default=540, cast=int)),
        firm_size_distribution=opts.get("firm-sizes", default="uniform", cast=str),
        powerlaw_alpha=float(opts.get("powerlaw-alpha", default=1.5, cast=float)),
        turnover_rate=float(opts.get("turnover", default=0.5, cast=float)),
        seed=derive_seed(int(opts.get("seed", default=DEFAULT_SEED, cast=int)), "synth"),
    )
    records = synth_mod.generate(config_obj)
    out_path = outdir / "synthetic_register.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        records_to_csv(records, fh)
    print(
        f"wrote {out_path}: {len(records)} rows, "
        f"{config_obj.persons} persons, {config_obj.firms} firms"
    )


_COMMANDS = {
    "ingest": _cmd_ingest,
    "stats": _cmd_stats,
    "graph": _cmd_graph,
    "metrics": _cmd_metrics,
    "communities": _cmd_communities,
    "baseline": _cmd_baseline,
    "enrich": _cmd_enrich,
    "synth": _cmd_synth,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="licnet",
        description="Register analytics: spells, projection networks, metrics, baselines",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--outdir", help="artifact output directory")
        p.add_argument("--seed", help="master seed (default 1729)")

    p = sub.add_parser("ingest", help="parse and validate a register CSV")
    common(p)
    p.add_argument("--input", help="register CSV path")
    p.add_argument("--strict", nargs="?", const="true", help="fail on first bad row")

    p = sub.add_parser("stats", help="headline statistics and series")
    common(p)
    p.add_argument("--input")
    p.add_argument("--strict", nargs="?", const="true")
    p.add_argument("--horizon-end", help="override dataset end date (YYYY-MM-DD)")

    p = sub.add_parser("graph", help="build snapshot projection graphs")
    common(p)
    p.add_argument("--input")
    p.add_argument("--strict", nargs="?", const="true")
    p.add_argument("--mode", choices=["firm", "employee"])
    p.add_argument("--at", help="snapshot date(s), comma separated")
    p.add_argument("--overlap-aggregation", choices=["sum", "union"])
    p.add_argument("--employee-scope", choices=["history", "alltime"])
    p.add_argument("--graphml", nargs="?", const="true", help="also write GraphML")

    p = sub.add_parser("metrics", help="metric suite over an exported edge list")
    common(p)
    p.add_argument("--edges", help="edge list CSV")
    p.add_argument("--nodes", help="node list CSV (keeps isolated nodes)")
    p.add_argument("--path-method", choices=["exact", "sampled"])
    p.add_argument("--sources", help="sampled-source count (default 1000)")

    p = sub.add_parser("communities", help="Louvain partition of an edge list")
    common(p)
    p.add_argument("--edges")
    p.add_argument("--nodes")
    p.add_argument("--resolution")
    p.add_argument("--weighted", nargs="?", const="true")

    p = sub.add_parser("baseline", help="matched random-graph comparison")
    common(p)
    p.add_argument("--edges")
    p.add_argument("--nodes")
    p.add_argument("--er-model", choices=["gnm", "gnp"])
    p.add_argument("--runs")
    p.add_argument("--path-method", choices=["exact", "sampled"])
    p.add_argument("--sources")

    p = sub.add_parser("enrich", help="attribute joins and grouped aggregates")
    common(p)
    p.add_argument("--input")
    p.add_argument("--strict", nargs="?", const="true")
    p.add_argument("--attributes", help="attribute CSV (sfcid or prinCeRef first)")
    p.add_argument("--group-by", help="attribute to tally distinct entities by")
    p.add_argument("--at", help="restrict to entities active on this date")
    p.add_argument("--series-filter", help="attribute=value yearly series")
    p.add_argument("--side-share", nargs="?", const="true", help="buy-side share per year")

    p = sub.add_parser("synth", help="generate a synthetic register CSV")
    common(p)
    p.add_argument("--persons")
    p.add_argument("--firms")
    p.add_argument("--start")
    p.add_argument("--end")
    p.add_argument("--mean-tenure-days")
    p.add_argument("--firm-sizes", choices=["uniform", "powerlaw"])
    p.add_argument("--powerlaw-alpha")
    p.add_argument("--turnover")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _Options(args)
        _COMMANDS[args.subcommand](opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary, exit 1 with diagnostic
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
