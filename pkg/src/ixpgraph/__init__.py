"""Inter-IXP multigraph construction, analysis and QoS path embedding."""

from .analytics import (
    CoverageReport,
    GreedyResult,
    MultiplicityStats,
    ccdf,
    coverage,
    greedy_anchors,
    pair_multiplicity_stats,
    parse_as_prefixes,
    parse_relationships,
)
from .engine import (
    Embedding,
    EngineState,
    FailureReport,
    Request,
    SamplerConfig,
    SelectionPolicy,
    check_conservation,
    handle_pathlet_failure,
    hybrid_admit,
    release_embedding,
    sample_paths,
    select_path,
    try_embed,
)
from .ingest import (
    AttributeModel,
    ParseError,
    SynthesisPolicy,
    attach_endpoints,
    build_multigraph,
    format_report,
    load_graph,
    parse_membership,
    save_graph,
    snapshot_report,
)
from .multigraph import ACCESS, TRANSIT, Endpoint, GraphError, InsufficientResidual, Multigraph, Pathlet
from .oracle import OracleRefused, offline_optimal
from .paths import Path, enumerate_paths, k_shortest_paths, min_latency_path, random_walk_paths
from .prefixes import PrefixSet
from .sim import ScenarioConfig, Workload, generate_workload, run_simulation, scripted_workload, simulate

__version__ = "0.1.0"
