"""Benchmark harness: identical random query sets over every requested
algorithm, per-query records, aggregate tables, and the cross-checks that
serve as the primary correctness tripwire: all graph-based algorithms must
agree exactly, and the connection scan may never beat them.
"""

from __future__ import annotations

import csv
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import BuildRecord, Router, report_build_stats
from .model import INFINITE_TIME, TransportGraph, format_time, is_finite
from .search import ALGO_CSA, GRAPH_ALGORITHMS, QueryRequest


class AgreementError(RuntimeError):
    """Two graph-based algorithms disagreed, or CSA beat the graph."""


@dataclass(frozen=True)
class QueryRecord:
    algorithm: str
    source: str
    target: str
    depart: int
    arrival: int  # INFINITE_TIME when unreachable
    found: bool
    expanded: int
    settled: int
    wall_ns: int


@dataclass(frozen=True)
class AlgoSummary:
    algorithm: str
    n_queries: int
    found: int
    pct_found: float
    mean_wall_ns: float
    median_wall_ns: float
    mean_expanded: float


@dataclass
class BenchReport:
    n_queries: int
    seed: int
    algorithms: list[str]
    records: list[QueryRecord] = field(default_factory=list)
    summaries: list[AlgoSummary] = field(default_factory=list)
    builds: list[BuildRecord] = field(default_factory=list)


def sample_queries(graph: TransportGraph, n: int, seed: int) -> list[tuple[str, str, int]]:
    """n uniform (source, target, departure) triples over the service day."""
    rng = random.Random(seed)
    ids = [rec.id for rec in graph.nodes]
    return [(rng.choice(ids), rng.choice(ids), rng.randrange(0, 86_400)) for _ in range(n)]


def run_bench(
    graph: TransportGraph,
    algorithms,
    n_queries: int,
    seed: int,
    router: Router | None = None,
) -> BenchReport:
    """Run every algorithm over one shared query set.

    Structures are built up front so per-query timing never includes
    preparation. Raises AgreementError naming the first divergent query.
    """
    algorithms = list(algorithms)
    if router is None:
        router = Router(graph)
    for algo in algorithms:
        router.prepare(algo)

    queries = sample_queries(graph, n_queries, seed)
    report = BenchReport(n_queries=n_queries, seed=seed, algorithms=algorithms)
    arrivals: dict[str, list[int]] = {}

    for algo in algorithms:
        algo_arrivals = []
        for source, target, depart in queries:
            res = router.query(QueryRequest(source, target, depart, algo))
            algo_arrivals.append(res.arrival)
            report.records.append(
                QueryRecord(
                    algorithm=algo,
                    source=source,
                    target=target,
                    depart=depart,
                    arrival=res.arrival,
                    found=res.found,
                    expanded=res.expanded_nodes,
                    settled=res.settled_edges,
                    wall_ns=res.wall_ns,
                )
            )
        arrivals[algo] = algo_arrivals

    _cross_check(queries, arrivals)
    report.summaries = _summarize(report)
    report.builds = report_build_stats(router)
    return report


def _cross_check(queries, arrivals: dict[str, list[int]]) -> None:
    graph_algos = [a for a in arrivals if a in GRAPH_ALGORITHMS]
    for qi, (source, target, depart) in enumerate(queries):
        values = {algo: arrivals[algo][qi] for algo in graph_algos}
        if values and len(set(values.values())) > 1:
            detail = ", ".join(f"{a}={format_time(v)}" for a, v in sorted(values.items()))
            raise AgreementError(
                f"divergent arrivals on query {qi} "
                f"({source}->{target} at {format_time(depart)}): {detail}"
            )
        if ALGO_CSA in arrivals and graph_algos:
            graph_arr = values[graph_algos[0]]
            csa_arr = arrivals[ALGO_CSA][qi]
            if csa_arr < graph_arr:
                raise AgreementError(
                    f"csa beat the graph on query {qi} "
                    f"({source}->{target} at {format_time(depart)}): "
                    f"csa={format_time(csa_arr)} graph={format_time(graph_arr)}"
                )


def _summarize(report: BenchReport) -> list[AlgoSummary]:
    out = []
    per_algo: dict[str, list[QueryRecord]] = {}
    for rec in report.records:
        per_algo.setdefault(rec.algorithm, []).append(rec)
    for algo in report.algorithms:
        recs = per_algo.get(algo, [])
        n = len(recs)
        found = sum(1 for r in recs if r.found)
        walls = [r.wall_ns for r in recs]
        out.append(
            AlgoSummary(
                algorithm=algo,
                n_queries=n,
                found=found,
                pct_found=(100.0 * found / n) if n else 0.0,
                mean_wall_ns=statistics.fmean(walls) if walls else 0.0,
                median_wall_ns=statistics.median(walls) if walls else 0.0,
                mean_expanded=statistics.fmean(r.expanded for r in recs) if recs else 0.0,
            )
        )
    return out


def write_report(report: BenchReport, outdir) -> None:
    """queries.csv: one row per query x algorithm; summary.md: aggregates."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    with open(outdir / "queries.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["algorithm", "source", "target", "depart_s", "arrival_s", "found", "expanded", "settled", "wall_ns"]
        )
        for r in report.records:
            w.writerow(
                [
                    r.algorithm,
                    r.source,
                    r.target,
                    r.depart,
                    r.arrival if is_finite(r.arrival) else "",
                    int(r.found),
                    r.expanded,
                    r.settled,
                    r.wall_ns,
                ]
            )

    lines = [
        "# Benchmark summary",
        "",
        f"- queries: {report.n_queries}",
        f"- seed: {report.seed}",
        "",
        "## Query performance",
        "",
        "| algorithm | %P | mean wall (ms) | median wall (ms) | mean expanded |",
        "|---|---:|---:|---:|---:|",
    ]
    for s in report.summaries:
        lines.append(
            f"| {s.algorithm} | {s.pct_found:.1f} | {s.mean_wall_ns / 1e6:.4f} "
            f"| {s.median_wall_ns / 1e6:.4f} | {s.mean_expanded:.1f} |"
        )
    if report.builds:
        lines += [
            "",
            "## Precomputation",
            "",
            "| structure | build (s) | elements | bytes |",
            "|---|---:|---:|---:|",
        ]
        for b in report.builds:
            lines.append(f"| {b.name} | {b.seconds:.3f} | {b.elements} | {b.n_bytes} |")
    lines.append("")
    (outdir / "summary.md").write_text("\n".join(lines), encoding="utf-8")
