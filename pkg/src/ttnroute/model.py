"""Domain types: the integer time axis, timetables, edge arrival-time
functions, the multimodal graph, and journeys.

All times are integer seconds since service-day midnight. A single sentinel,
``INFINITE_TIME``, compares greater than every finite time and doubles as the
infinite walk duration ("no foot link").
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional

INFINITE_TIME = 2**62
INFINITE_DURATION = INFINITE_TIME

MAX_FINITE_TIME = 2**31 - 1


def is_finite(t: int) -> bool:
    return t < INFINITE_TIME


def clamp_infinite(t: int) -> int:
    """Normalize any past-the-sentinel sum back to the sentinel."""
    return t if t < INFINITE_TIME else INFINITE_TIME


def add_duration(t: int, d: int) -> int:
    """t + d where the infinite sentinel absorbs."""
    s = t + d
    return s if s < INFINITE_TIME else INFINITE_TIME


def parse_time(text: str) -> int:
    """Parse 'HH:MM' or 'HH:MM:SS' into seconds since midnight."""
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"bad time {text!r}, expected HH:MM[:SS]")
    try:
        h, m = int(parts[0]), int(parts[1])
        s = int(parts[2]) if len(parts) == 3 else 0
    except ValueError:
        raise ValueError(f"bad time {text!r}, expected HH:MM[:SS]") from None
    if not (0 <= m < 60 and 0 <= s < 60 and h >= 0):
        raise ValueError(f"bad time {text!r}")
    return h * 3600 + m * 60 + s


def format_time(t: int) -> str:
    if not is_finite(t):
        return "inf"
    h, rest = divmod(t, 3600)
    m, s = divmod(rest, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


@dataclass(frozen=True)
class Connection:
    """One scheduled ride: departure and arrival seconds plus a trip tag."""

    departure: int
    arrival: int
    trip: str = ""

    def __post_init__(self):
        if self.arrival < self.departure:
            raise ValueError(
                f"connection arrives before it departs: "
                f"({self.departure}, {self.arrival})"
            )
        if self.departure < 0:
            raise ValueError(f"negative departure {self.departure}")


class EdgeAtf:
    """One edge's arrival-time function: optional walk plus a timetable.

    The timetable is kept as parallel lists sorted by (departure, arrival);
    trip labels live out-of-line from the sort keys. ``best_arrs`` holds
    suffix minima of the arrivals so evaluation stays exact and O(log n)
    even when a table contains internally dominated connections.
    """

    __slots__ = ("walk", "deps", "arrs", "trips", "best_arrs", "best_idx")

    def __init__(self, walk: int = INFINITE_DURATION, connections: Iterable[Connection] = ()):
        conns = list(connections)
        deps = [c.departure for c in conns]
        arrs = [c.arrival for c in conns]
        for i in range(1, len(conns)):
            if (deps[i - 1], arrs[i - 1]) > (deps[i], arrs[i]):
                raise ValueError("timetable not sorted by (departure, arrival)")
        self.walk = walk if walk < INFINITE_DURATION else INFINITE_DURATION
        self.deps = deps
        self.arrs = arrs
        self.trips = [c.trip for c in conns]
        n = len(arrs)
        best_arrs = [0] * n
        best_idx = [0] * n
        best = INFINITE_TIME
        bi = -1
        for i in range(n - 1, -1, -1):
            if arrs[i] < best:
                best, bi = arrs[i], i
            best_arrs[i] = best
            best_idx[i] = bi
        self.best_arrs = best_arrs
        self.best_idx = best_idx

    @property
    def size(self) -> int:
        return len(self.deps)

    @property
    def has_walk(self) -> bool:
        return self.walk < INFINITE_DURATION

    def is_empty(self) -> bool:
        return not self.deps and not self.has_walk

    def connections(self) -> list[Connection]:
        return [Connection(d, a, r) for d, a, r in zip(self.deps, self.arrs, self.trips)]

    def arrival_at(self, t: int) -> int:
        """Earliest arrival when present at the edge's source at time t."""
        best = t + self.walk
        i = bisect_left(self.deps, t)
        if i < len(self.deps) and self.best_arrs[i] < best:
            best = self.best_arrs[i]
        return best if best < INFINITE_TIME else INFINITE_TIME

    def successor(self, t: int) -> int:
        """Index of the earliest connection departing at or after t, or -1."""
        i = bisect_left(self.deps, t)
        return i if i < len(self.deps) else -1

    def board(self, t: int) -> Optional[tuple[int, int, int, str, str]]:
        """Resolve the concrete leg taken at time t.

        Returns (arrival, board, alight, mode, trip) or None when the edge
        offers nothing at t. Walking wins ties so legs never depend on the
        schedule when they do not have to.
        """
        walk_arr = t + self.walk
        i = bisect_left(self.deps, t)
        bus_arr = self.best_arrs[i] if i < len(self.deps) else INFINITE_TIME
        if walk_arr <= bus_arr:
            if walk_arr >= INFINITE_TIME:
                return None
            return (walk_arr, t, walk_arr, "walk", "")
        if bus_arr >= INFINITE_TIME:
            return None
        j = self.best_idx[i]
        return (bus_arr, self.deps[j], self.arrs[j], "transit", self.trips[j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeAtf):
            return NotImplemented
        return (
            self.walk == other.walk
            and self.deps == other.deps
            and self.arrs == other.arrs
            and self.trips == other.trips
        )

    def __hash__(self):
        return hash((self.walk, tuple(self.deps), tuple(self.arrs)))

    def __repr__(self):
        w = format_time(self.walk) if self.has_walk else "inf"
        return f"EdgeAtf(walk={w}, size={self.size})"


@dataclass(frozen=True)
class NodeRecord:
    id: str
    lat: float
    lon: float


@dataclass(frozen=True)
class JourneyLeg:
    source: str
    target: str
    board: int
    alight: int
    mode: str  # "walk" | "transit"
    trip: str = ""


@dataclass(frozen=True)
class Journey:
    """Contiguous legs from source to target; empty legs = stay in place."""

    legs: tuple[JourneyLeg, ...]
    arrival: int


class TransportGraph:
    """Directed multimodal graph with one merged EdgeAtf per (source, target).

    Construction is single-writer; once built the graph is read-only shared
    state for any number of concurrent queries. Adjacency lists are kept
    sorted by target node id.
    """

    def __init__(self):
        self.nodes: list[NodeRecord] = []
        self.out: list[list[tuple[int, EdgeAtf]]] = []
        self._index: dict[str, int] = {}

    # -- nodes ------------------------------------------------------------

    def add_node(self, node_id: str, lat: float, lon: float) -> int:
        if node_id in self._index:
            raise ValueError(f"duplicate node id {node_id!r}")
        idx = len(self.nodes)
        self.nodes.append(NodeRecord(node_id, lat, lon))
        self.out.append([])
        self._index[node_id] = idx
        return idx

    def node_index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValueError(f"unknown node id {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(adj) for adj in self.out)

    # -- edges ------------------------------------------------------------

    def add_edge(self, from_id: str, to_id: str, atf: EdgeAtf) -> None:
        """Insert an edge; parallel inserts merge into the stored function."""
        # import here to avoid a cycle: atf algebra builds on these types
        from .atf import merge_atf

        u = self.node_index(from_id)
        v = self.node_index(to_id)
        if atf.is_empty():
            raise ValueError(f"edge {from_id!r}->{to_id!r} has neither walk nor timetable")
        adj = self.out[u]
        for pos, (tgt, old) in enumerate(adj):
            if tgt == v:
                adj[pos] = (v, merge_atf(old, atf))
                return
        adj.append((v, atf))
        adj.sort(key=lambda e: self.nodes[e[0]].id)

    def edge_atf(self, u: int, v: int) -> Optional[EdgeAtf]:
        for tgt, atf in self.out[u]:
            if tgt == v:
                return atf
        return None

    def out_edges(self, u: int) -> list[tuple[int, EdgeAtf]]:
        return self.out[u]

    def total_connections(self) -> int:
        return sum(atf.size for adj in self.out for _, atf in adj)

    def validate(self) -> None:
        """Check the structural invariants; raises ValueError on violation."""
        for u, adj in enumerate(self.out):
            seen = set()
            last_id = None
            for v, atf in adj:
                if not 0 <= v < self.n_nodes:
                    raise ValueError(f"edge from {self.nodes[u].id} to missing node index {v}")
                if v in seen:
                    raise ValueError(f"duplicate edge {self.nodes[u].id}->{self.nodes[v].id}")
                seen.add(v)
                tid = self.nodes[v].id
                if last_id is not None and tid < last_id:
                    raise ValueError(f"adjacency of {self.nodes[u].id} not sorted by target id")
                last_id = tid
                if atf.is_empty():
                    raise ValueError(f"empty edge {self.nodes[u].id}->{tid}")
