"""Dataset ingestion (CSV, walk-limit filtering) and the synthetic graph
generator used by the benchmark sweeps.

CSV contract (UTF-8, header row, comma-separated):
    nodes.csv        node_id,lat,lon
    footpaths.csv    from_id,to_id,duration_s
    connections.csv  from_id,to_id,dep_s,arr_s,trip_label

``duration_s`` is the walking time at the reference speed of 1 m/s, so it
doubles as the footpath length in metres; footpaths longer than the walk
limit are dropped and remaining durations are rescaled by the configured
speed.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

from .model import Connection, EdgeAtf, INFINITE_DURATION, TransportGraph

DEFAULT_WALK_LIMIT_M = 600.0
DEFAULT_WALK_SPEED_MPS = 1.0

NODES_CSV = "nodes.csv"
FOOTPATHS_CSV = "footpaths.csv"
CONNECTIONS_CSV = "connections.csv"


@dataclass(frozen=True)
class SyntheticTemplate:
    """Edge template applied by the generator: a walk plus one timetable."""

    walk: int
    connections: tuple[Connection, ...]


def default_template() -> SyntheticTemplate:
    """59 rides spaced 15 minutes from 06:00, 10-minute ride, 404 s walk.

    The size and walking duration mirror a dense inner-city stop pair; the
    spacing and ride time are fixture values.
    """
    first = 6 * 3600
    conns = tuple(
        Connection(first + i * 900, first + i * 900 + 600, f"ride{i:02d}") for i in range(59)
    )
    return SyntheticTemplate(walk=404, connections=conns)


def _parse_error(path, line_no, msg):
    return ValueError(f"{path}:{line_no}: {msg}")


def _read_rows(path: Path, expected_header: list[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise _parse_error(path, 1, "missing header row") from None
        if [h.strip() for h in header] != expected_header:
            raise _parse_error(path, 1, f"expected header {','.join(expected_header)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise _parse_error(path, line_no, f"expected {len(expected_header)} fields, got {len(row)}")
            yield line_no, row


def load_dataset(
    directory,
    walk_limit_m: float = DEFAULT_WALK_LIMIT_M,
    walk_speed_mps: float = DEFAULT_WALK_SPEED_MPS,
) -> TransportGraph:
    """Build a graph from the three-CSV dataset directory."""
    directory = Path(directory)
    nodes_path = directory / NODES_CSV
    foot_path = directory / FOOTPATHS_CSV
    conn_path = directory / CONNECTIONS_CSV

    graph = TransportGraph()
    for line_no, row in _read_rows(nodes_path, ["node_id", "lat", "lon"]):
        try:
            lat, lon = float(row[1]), float(row[2])
        except ValueError:
            raise _parse_error(nodes_path, line_no, f"bad coordinates {row[1]!r},{row[2]!r}") from None
        if graph.has_node(row[0]):
            raise _parse_error(nodes_path, line_no, f"duplicate node id {row[0]!r}")
        graph.add_node(row[0], lat, lon)

    # group rows per edge pair so each edge is inserted exactly once;
    # pruning belongs to the algebra, not to ingestion
    walks: dict[tuple[str, str], int] = {}
    conns: dict[tuple[str, str], list[Connection]] = {}

    for line_no, row in _read_rows(foot_path, ["from_id", "to_id", "duration_s"]):
        try:
            distance_m = float(row[2])
        except ValueError:
            raise _parse_error(foot_path, line_no, f"bad duration {row[2]!r}") from None
        if distance_m < 0:
            raise _parse_error(foot_path, line_no, f"negative duration {row[2]!r}")
        for node in (row[0], row[1]):
            if not graph.has_node(node):
                raise _parse_error(foot_path, line_no, f"unknown node id {node!r}")
        if distance_m > walk_limit_m:
            continue
        dur = int(round(distance_m / walk_speed_mps))
        key = (row[0], row[1])
        if key not in walks or dur < walks[key]:
            walks[key] = dur

    for line_no, row in _read_rows(conn_path, ["from_id", "to_id", "dep_s", "arr_s", "trip_label"]):
        try:
            dep, arr = int(row[2]), int(row[3])
        except ValueError:
            raise _parse_error(conn_path, line_no, f"bad times {row[2]!r},{row[3]!r}") from None
        for node in (row[0], row[1]):
            if not graph.has_node(node):
                raise _parse_error(conn_path, line_no, f"unknown node id {node!r}")
        if arr < dep or dep < 0:
            raise _parse_error(conn_path, line_no, f"connection arrives before departing: {dep},{arr}")
        conns.setdefault((row[0], row[1]), []).append(Connection(dep, arr, row[4]))

    for key in sorted(set(walks) | set(conns)):
        walk = walks.get(key, INFINITE_DURATION)
        table = sorted(conns.get(key, []), key=lambda c: (c.departure, c.arrival))
        graph.add_edge(key[0], key[1], EdgeAtf(walk, table))
    graph.validate()
    return graph


def write_dataset(graph: TransportGraph, directory) -> None:
    """Emit the three CSVs in the ingestion format (canonical row order)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    order = sorted(range(graph.n_nodes), key=lambda i: graph.nodes[i].id)

    with open(directory / NODES_CSV, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "lat", "lon"])
        for i in order:
            rec = graph.nodes[i]
            w.writerow([rec.id, repr(rec.lat), repr(rec.lon)])

    with open(directory / FOOTPATHS_CSV, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["from_id", "to_id", "duration_s"])
        for i in order:
            for v, atf in graph.out[i]:
                if atf.has_walk:
                    w.writerow([graph.nodes[i].id, graph.nodes[v].id, atf.walk])

    with open(directory / CONNECTIONS_CSV, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["from_id", "to_id", "dep_s", "arr_s", "trip_label"])
        for i in order:
            for v, atf in graph.out[i]:
                for d, a, tr in zip(atf.deps, atf.arrs, atf.trips):
                    w.writerow([graph.nodes[i].id, graph.nodes[v].id, d, a, tr])


def generate_synthetic(
    n_nodes: int,
    k_out: int,
    pct_timetable: float,
    template: SyntheticTemplate | None = None,
    seed: int = 0,
) -> TransportGraph:
    """Random graph: every node gets exactly ``k_out`` outgoing edges to
    distinct targets, all carrying the template walk; ``pct_timetable``
    percent of edges (rounded, chosen by the seed) also carry the template
    timetable. Coordinates land on a 0.1 x 0.1 degree patch.
    """
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if not 0 <= k_out < n_nodes:
        raise ValueError(f"out-degree {k_out} impossible with {n_nodes} nodes")
    if not 0 <= pct_timetable <= 100:
        raise ValueError(f"timetable percentage {pct_timetable} outside [0, 100]")
    if template is None:
        template = default_template()

    rng = random.Random(seed)
    width = max(3, len(str(n_nodes - 1)))
    graph = TransportGraph()
    for i in range(n_nodes):
        graph.add_node(f"n{i:0{width}d}", rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1))

    edges: list[tuple[int, int]] = []
    for u in range(n_nodes):
        pool = [v for v in range(n_nodes) if v != u]
        edges.extend((u, v) for v in rng.sample(pool, k_out))

    n_tt = round(len(edges) * pct_timetable / 100)
    tt_slots = set(rng.sample(range(len(edges)), n_tt)) if edges else set()

    for ei, (u, v) in enumerate(edges):
        table = template.connections if ei in tt_slots else ()
        graph.add_edge(graph.nodes[u].id, graph.nodes[v].id, EdgeAtf(template.walk, table))
    graph.validate()
    return graph
