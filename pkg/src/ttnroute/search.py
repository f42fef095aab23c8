"""Query algorithms: time-dependent Dijkstra over edge functions, Dijkstra
accelerated by node-level indices, and forward search over the contraction
hierarchy with up-then-down pruning and bounding boxes.

Every algorithm returns the same result shape: earliest arrival, a journey
of concrete legs, and search-effort counters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Optional, Sequence

from .model import (
    INFINITE_TIME,
    Journey,
    JourneyLeg,
    TransportGraph,
    is_finite,
)
from .tch import TchGraph, _haversine_m, bbox_contains

ALGO_CSA = "csa"
ALGO_DIJ_TTE = "dij-tte"
ALGO_DIJ_CST = "dij-cst"
ALGO_DIJ_FC_ASC = "dij-fc-asc"
ALGO_DIJ_FC_DSC = "dij-fc-dsc"
ALGO_FS_TCH_TTE = "fs-tch-tte"
ALGO_FS_TCH_CST = "fs-tch-cst"
ALGO_FS_TCH_FC_ASC = "fs-tch-fc-asc"
ALGO_FS_TCH_FC_DSC = "fs-tch-fc-dsc"
ALGO_FS_TCH_FC_CHS = "fs-tch-fc-chs"

DIJKSTRA_ALGORITHMS = (ALGO_DIJ_TTE, ALGO_DIJ_CST, ALGO_DIJ_FC_ASC, ALGO_DIJ_FC_DSC)
FORWARD_ALGORITHMS = (
    ALGO_FS_TCH_TTE,
    ALGO_FS_TCH_CST,
    ALGO_FS_TCH_FC_ASC,
    ALGO_FS_TCH_FC_DSC,
    ALGO_FS_TCH_FC_CHS,
)
GRAPH_ALGORITHMS = DIJKSTRA_ALGORITHMS + FORWARD_ALGORITHMS
ALL_ALGORITHMS = (ALGO_CSA,) + GRAPH_ALGORITHMS

HEURISTIC_ZERO = "zero"
HEURISTIC_GEO = "geo_lower_bound"


class JourneyCorruptionError(RuntimeError):
    """Unpacking hit inconsistent times; signals a chaining bug."""


@dataclass(frozen=True)
class QueryRequest:
    source: str
    target: str
    depart: int
    algorithm: str = ALGO_DIJ_TTE


@dataclass
class QueryResult:
    arrival: int
    journey: Optional[Journey]
    expanded_nodes: int
    settled_edges: int
    wall_ns: int = 0
    tch_path: Optional[tuple[int, ...]] = None

    @property
    def found(self) -> bool:
        return is_finite(self.arrival)


def _check_request(graph: TransportGraph, req: QueryRequest) -> tuple[int, int]:
    s = graph.node_index(req.source)
    d = graph.node_index(req.target)
    if not is_finite(req.depart) or req.depart < 0:
        raise ValueError(f"departure time must be finite and non-negative, got {req.depart}")
    return s, d


def dijkstra(graph: TransportGraph, req: QueryRequest, node_indices=None) -> QueryResult:
    """Label-setting earliest-arrival search.

    With ``node_indices`` the per-node structure answers all outgoing edges
    of an extracted node at once; without it each edge is evaluated by its
    own binary search. Stale heap entries are skipped on extraction and not
    counted as expansions.
    """
    s, d = _check_request(graph, req)
    t0 = req.depart
    start_ns = time.perf_counter_ns()

    n = graph.n_nodes
    dist = [INFINITE_TIME] * n
    pred = [-1] * n
    dist[s] = t0
    heap = [(t0, s)]
    out = graph.out
    expanded = 0
    settled = 0

    while heap:
        t, u = heappop(heap)
        if t != dist[u]:
            continue
        expanded += 1
        if u == d:
            break
        idx = node_indices[u] if node_indices is not None else None
        if idx is None:
            for v, atf in out[u]:
                settled += 1
                a = atf.arrival_at(t)
                if a < dist[v]:
                    dist[v] = a
                    pred[v] = u
                    heappush(heap, (a, v))
        else:
            for v, a in idx.arrivals(t):
                settled += 1
                if a < dist[v]:
                    dist[v] = a
                    pred[v] = u
                    heappush(heap, (a, v))

    arrival = dist[d]
    journey = _graph_journey(graph, pred, s, d, t0, arrival) if is_finite(arrival) else None
    return QueryResult(
        arrival=arrival if is_finite(arrival) else INFINITE_TIME,
        journey=journey,
        expanded_nodes=expanded,
        settled_edges=settled,
        wall_ns=time.perf_counter_ns() - start_ns,
    )


def _graph_journey(graph: TransportGraph, pred, s, d, t0, arrival) -> Journey:
    if s == d:
        return Journey((), t0)
    hops = []
    v = d
    while v != s:
        u = pred[v]
        if u < 0:
            raise JourneyCorruptionError("predecessor chain broken")
        hops.append((u, v))
        v = u
    hops.reverse()
    legs = []
    t = t0
    nodes = graph.nodes
    for u, v in hops:
        atf = graph.edge_atf(u, v)
        resolved = atf.board(t)
        if resolved is None:
            raise JourneyCorruptionError("journey replay found no service")
        a, board, alight, mode, trip = resolved
        legs.append(JourneyLeg(nodes[u].id, nodes[v].id, board, alight, mode, trip))
        t = a
    if t != arrival:
        raise JourneyCorruptionError(f"replayed arrival {t} != search arrival {arrival}")
    return Journey(tuple(legs), t)


def forward_search(
    tch: TchGraph,
    req: QueryRequest,
    heuristic: str = HEURISTIC_ZERO,
    node_indices=None,
    chs_truncation: bool = False,
) -> QueryResult:
    """Best-first search over the hierarchy restricted to up-then-down paths.

    A label reached over a downward edge may only relax downward edges, and
    downward edges from a node are skipped entirely when the target lies
    outside its down-reachable bounding box. With ``chs_truncation`` the
    per-node cascade walk stops at the current node's level while in the
    down phase.
    """
    graph = tch.graph
    s, d = _check_request(graph, req)
    t0 = req.depart
    start_ns = time.perf_counter_ns()

    if heuristic == HEURISTIC_ZERO:
        vmax = None
    elif heuristic == HEURISTIC_GEO:
        vmax = tch.max_speed_mps
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}")

    n = graph.n_nodes
    nodes = graph.nodes
    level = tch.level
    boxes = tch.down_bbox
    lat_d, lon_d = nodes[d].lat, nodes[d].lon

    hcache: list[int] = [-1] * n

    def h(v: int) -> int:
        if vmax is None:
            return 0
        cached = hcache[v]
        if cached < 0:
            cached = int(_haversine_m(nodes[v].lat, nodes[v].lon, lat_d, lon_d) / vmax)
            hcache[v] = cached
        return cached

    # phase 0: still on the up prefix; phase 1: committed to the down path
    dist = [[INFINITE_TIME] * n, [INFINITE_TIME] * n]
    pred: list[list[Optional[tuple[int, int]]]] = [[None] * n, [None] * n]
    dist[0][s] = t0
    heap = [(t0 + h(s), t0, s, 0)]
    expanded = 0
    settled = 0
    found_phase = -1

    while heap:
        _, t, u, ph = heappop(heap)
        if t != dist[ph][u]:
            continue
        expanded += 1
        if u == d:
            found_phase = ph
            break
        lvl_u = level[u]
        allow_down = bbox_contains(boxes[u], lat_d, lon_d)
        if ph == 1 and not allow_down:
            continue

        if node_indices is not None and node_indices[u] is not None:
            idx = node_indices[u]
            if chs_truncation and ph == 1:
                pairs = idx.arrivals(t, truncate_above_level=lvl_u)
            else:
                pairs = idx.arrivals(t)
            for v, a in pairs:
                settled += 1
                if a >= INFINITE_TIME:
                    continue
                if level[v] > lvl_u:
                    if ph == 1:
                        continue
                    nph = 0
                else:
                    if not allow_down:
                        continue
                    nph = 1
                if a < dist[nph][v]:
                    dist[nph][v] = a
                    pred[nph][v] = (u, ph)
                    heappush(heap, (a + h(v), a, v, nph))
        else:
            for e in tch.out[u]:
                v = e.target
                if level[v] > lvl_u:
                    if ph == 1:
                        continue
                    nph = 0
                else:
                    if not allow_down:
                        continue
                    nph = 1
                settled += 1
                a = e.atf.arrival_at(t)
                if a < dist[nph][v]:
                    dist[nph][v] = a
                    pred[nph][v] = (u, ph)
                    heappush(heap, (a + h(v), a, v, nph))

    if found_phase < 0:
        best = min(dist[0][d], dist[1][d])
        arrival = best
        found_phase = 0 if dist[0][d] <= dist[1][d] else 1
    else:
        arrival = dist[found_phase][d]

    journey = None
    path = None
    if is_finite(arrival):
        path = _trace_tch_path(pred, s, d, found_phase)
        journey = unpack_journey(tch, path, t0)
        if journey.arrival != arrival:
            raise JourneyCorruptionError(
                f"unpacked arrival {journey.arrival} != search arrival {arrival}"
            )
    return QueryResult(
        arrival=arrival if is_finite(arrival) else INFINITE_TIME,
        journey=journey,
        expanded_nodes=expanded,
        settled_edges=settled,
        wall_ns=time.perf_counter_ns() - start_ns,
        tch_path=tuple(path) if path is not None else None,
    )


def _trace_tch_path(pred, s, d, phase) -> list[int]:
    path = [d]
    v, ph = d, phase
    while v != s:
        prev = pred[ph][v]
        if prev is None:
            raise JourneyCorruptionError("forward-search predecessor chain broken")
        v, ph = prev
        path.append(v)
    path.reverse()
    return path


def unpack_journey(tch: TchGraph, path: Sequence[int], depart: int) -> Journey:
    """Expand a hierarchy path into original-edge legs by shortcut recursion."""
    if len(path) <= 1:
        return Journey((), depart)
    legs: list[JourneyLeg] = []
    t = depart
    for u, v in zip(path, path[1:]):
        t = _unpack_edge(tch, u, v, t, legs)
    return Journey(tuple(legs), t)


def _unpack_edge(tch: TchGraph, u: int, v: int, t: int, legs: list[JourneyLeg]) -> int:
    e = tch.edge(u, v)
    if e is None:
        raise JourneyCorruptionError(f"no hierarchy edge {u}->{v}")
    a = e.atf.arrival_at(t)
    if not is_finite(a):
        raise JourneyCorruptionError(f"edge {u}->{v} offers no service at {t}")
    if e.original is not None and e.original.arrival_at(t) == a:
        resolved = e.original.board(t)
        arrival, board, alight, mode, trip = resolved
        nodes = tch.graph.nodes
        legs.append(JourneyLeg(nodes[u].id, nodes[v].id, board, alight, mode, trip))
        return arrival
    for m in e.middles:
        e1 = tch.edge(u, m)
        e2 = tch.edge(m, v)
        if e1 is None or e2 is None:
            continue
        t1 = e1.atf.arrival_at(t)
        if is_finite(t1) and e2.atf.arrival_at(t1) == a:
            _unpack_edge(tch, u, m, t, legs)
            return _unpack_edge(tch, m, v, t1, legs)
    raise JourneyCorruptionError(f"no constituent of {u}->{v} reproduces arrival {a}")


def validate_utd_path(tch: TchGraph, path: Sequence[int]) -> bool:
    """Check the up-then-down shape: levels rise strictly, then fall strictly,
    with a unique apex."""
    if len(path) <= 1:
        return True
    lv = [tch.level[v] for v in path]
    i = 0
    while i + 1 < len(lv) and lv[i] < lv[i + 1]:
        i += 1
    # i is the apex position; the remainder must strictly descend
    for j in range(i, len(lv) - 1):
        if lv[j] <= lv[j + 1]:
            return False
    return True
