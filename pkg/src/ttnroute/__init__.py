"""Time-dependent multimodal routing with node-level timetable indices."""

from .model import (
    Connection,
    EdgeAtf,
    INFINITE_DURATION,
    INFINITE_TIME,
    Journey,
    JourneyLeg,
    NodeRecord,
    TransportGraph,
    format_time,
    is_finite,
    parse_time,
)
from .atf import chain_atf, eval_atf, merge_atf, prune_dominated
from .nodeindex import (
    ASC,
    CHS,
    CstIndex,
    DSC,
    FcIndex,
    build_cst,
    build_fc,
    build_node_indices,
    query_cst,
    query_fc,
    query_node,
)
from .tch import TchGraph, build_tch, compute_down_bboxes, contract, order_nodes
from .search import (
    ALL_ALGORITHMS,
    GRAPH_ALGORITHMS,
    QueryRequest,
    QueryResult,
    dijkstra,
    forward_search,
    unpack_journey,
    validate_utd_path,
)
from .csa import MergedTimetable, build_merged, csa_query
from .datagen import (
    SyntheticTemplate,
    default_template,
    generate_synthetic,
    load_dataset,
    write_dataset,
)
from .engine import BuildRecord, Router, report_build_stats
from .bench import AgreementError, BenchReport, run_bench, sample_queries, write_report

__version__ = "0.1.0"
