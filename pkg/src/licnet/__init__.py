"""License-register analytics: employment spells, co-affiliation snapshot
networks, structural metrics, Louvain communities, and random baselines."""

from .baseline import BaselineComparison, compare, generate_er
from .community import Partition, louvain, modularity
from .enrich import (
    AttributeTable,
    GroupedCounts,
    attribute_timeseries,
    grouped_counts,
    load_attributes,
    side_share_timeseries,
)
from .graphs import (
    GraphMode,
    SnapshotGraph,
    build_employee_graph,
    build_firm_graph,
    export_graph,
    read_edge_list,
)
from .ingest import (
    Anomaly,
    IngestOptions,
    IngestReport,
    LicenseRecord,
    parse_register,
    records_to_csv,
    validate_records,
)
from .metrics import (
    MetricsReport,
    average_clustering,
    average_path_length,
    compute_metrics,
    connected_components,
    degree_distribution,
)
from .stats import (
    KeyStats,
    YearlySeries,
    activity_distribution,
    creation_termination_series,
    key_stats,
    license_type_combinations,
    top_firms_by_licensees,
)
from .synth import SynthConfig, generate
from .timeline import (
    EmploymentSpell,
    EntityTimeline,
    build_spells,
    is_active,
    overlap_days,
)

__version__ = "0.1.0"
