"""Connection Scan Algorithm baseline over one merged timetable.

Two departures from the textbook scan: connections of zero length are
re-scanned to a fixpoint whenever an arrival improves (chains of same-
instant hops would otherwise be order-dependent), and footpaths are relaxed
from a stop only off transit arrivals, so walking legs never chain. The
footpath firing is keyed on the best transit arrival seen per stop rather
than on label improvement, which keeps every journey without consecutive
walks reachable; walk-after-walk journeys remain out of reach by design.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

from .model import INFINITE_TIME, Journey, JourneyLeg, TransportGraph, is_finite
from .search import QueryRequest, QueryResult


@dataclass
class MergedTimetable:
    """Every connection of the graph in one departure-sorted sequence."""

    graph: TransportGraph
    dep: list[int]
    arr: list[int]
    src: list[int]
    dst: list[int]
    trip: list[str]
    footpaths: list[list[tuple[int, int]]]  # per stop: (neighbour, seconds)
    zero_length: list[int]                  # indices with dep == arr

    @property
    def size(self) -> int:
        return len(self.dep)

    def footpath_count(self) -> int:
        return sum(len(f) for f in self.footpaths)


def build_merged(graph: TransportGraph) -> MergedTimetable:
    """Flatten edge timetables into one globally sorted connection list."""
    rows = []
    footpaths: list[list[tuple[int, int]]] = [[] for _ in range(graph.n_nodes)]
    for u, adj in enumerate(graph.out):
        for v, atf in adj:
            for d, a, tr in zip(atf.deps, atf.arrs, atf.trips):
                rows.append((d, a, u, v, tr))
            if atf.has_walk:
                footpaths[u].append((v, atf.walk))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    dep = [r[0] for r in rows]
    arr = [r[1] for r in rows]
    src = [r[2] for r in rows]
    dst = [r[3] for r in rows]
    trip = [r[4] for r in rows]
    zero = [i for i, (d, a) in enumerate(zip(dep, arr)) if d == a]
    return MergedTimetable(graph, dep, arr, src, dst, trip, footpaths, zero)


def csa_query(mt: MergedTimetable, req: QueryRequest) -> QueryResult:
    graph = mt.graph
    s = graph.node_index(req.source)
    d = graph.node_index(req.target)
    if not is_finite(req.depart) or req.depart < 0:
        raise ValueError(f"departure time must be finite and non-negative, got {req.depart}")
    t0 = req.depart
    start_ns = time.perf_counter_ns()

    n = graph.n_nodes
    tau = [INFINITE_TIME] * n
    tau[s] = t0
    # best transit arrival whose footpaths were already relaxed, per stop
    fired = [INFINITE_TIME] * n
    fired[s] = t0
    evt: list[Optional[tuple]] = [None] * n
    scanned = 0
    relaxed = 0

    for w, dur in mt.footpaths[s]:
        relaxed += 1
        a = t0 + dur
        if a < tau[w]:
            tau[w] = a
            evt[w] = ("walk", s, -1, t0, dur)

    dep, arr, src, dst = mt.dep, mt.arr, mt.src, mt.dst
    footpaths = mt.footpaths

    def process(ci: int) -> bool:
        nonlocal relaxed
        changed = False
        a = arr[ci]
        if tau[src[ci]] <= dep[ci]:
            v = dst[ci]
            if a < tau[v]:
                tau[v] = a
                evt[v] = ("conn", ci)
                changed = True
            if a < fired[v]:
                fired[v] = a
                for w, dur in footpaths[v]:
                    relaxed += 1
                    na = a + dur
                    if na < tau[w]:
                        tau[w] = na
                        # remember the ride that fired this footpath so the
                        # journey never shows a walk growing out of a walk
                        evt[w] = ("walk", v, ci, a, dur)
                        changed = True
        return changed

    zero = mt.zero_length
    i = bisect_left(dep, t0)
    m = mt.size
    while i < m:
        if dep[i] > tau[d]:
            break
        scanned += 1
        if process(i):
            while True:
                again = False
                for z in zero:
                    scanned += 1
                    if process(z):
                        again = True
                if not again:
                    break
        i += 1

    arrival = tau[d]
    journey = _csa_journey(mt, evt, s, d, t0, arrival) if is_finite(arrival) else None
    return QueryResult(
        arrival=arrival if is_finite(arrival) else INFINITE_TIME,
        journey=journey,
        expanded_nodes=scanned,
        settled_edges=relaxed,
        wall_ns=time.perf_counter_ns() - start_ns,
    )


def _csa_journey(mt: MergedTimetable, evt, s, d, t0, arrival) -> Journey:
    if s == d:
        return Journey((), t0)
    nodes = mt.graph.nodes
    legs = []
    v = d
    while v != s:
        e = evt[v]
        if e is None:
            raise RuntimeError("csa journey chain broken")
        if e[0] == "conn":
            ci = e[1]
            u = mt.src[ci]
            legs.append(
                JourneyLeg(nodes[u].id, nodes[v].id, mt.dep[ci], mt.arr[ci], "transit", mt.trip[ci])
            )
            v = u
        else:
            _, u, firing_ci, base, dur = e
            legs.append(JourneyLeg(nodes[u].id, nodes[v].id, base, base + dur, "walk", ""))
            if firing_ci >= 0:
                pu = mt.src[firing_ci]
                legs.append(
                    JourneyLeg(
                        nodes[pu].id,
                        nodes[u].id,
                        mt.dep[firing_ci],
                        mt.arr[firing_ci],
                        "transit",
                        mt.trip[firing_ci],
                    )
                )
                v = pu
            else:
                v = u
    legs.reverse()
    return Journey(tuple(legs), arrival)
