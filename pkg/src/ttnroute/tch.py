"""Time-dependent contraction hierarchies.

Nodes are contracted in a heuristic order (edge difference plus depth, lazy
re-evaluation); contracting a node inserts, for every in/out neighbour pair
still uncontracted, a shortcut carrying the chained arrival-time function of
the two parent edges, merged into any existing edge. No witness search is
run: shortcut functions are pointwise minima, so extra shortcuts cost space
but never correctness. Down-reachable bounding boxes over the finished
hierarchy let the forward search skip hopeless downward relaxations.
"""

from __future__ import annotations

import heapq
import math
from typing import Optional, Sequence

from .atf import chain_atf, chain_is_empty, merge_atf
from .model import EdgeAtf, INFINITE_DURATION, TransportGraph


class TchEdge:
    """Final edge of the contracted graph.

    ``original`` is the base-graph function when the pair existed before
    contraction; ``middles`` lists the contracted nodes whose shortcuts were
    merged in, in insertion order, for path unpacking.
    """

    __slots__ = ("target", "atf", "middles", "original")

    def __init__(self, target: int, atf: EdgeAtf, middles: tuple[int, ...], original: Optional[EdgeAtf]):
        self.target = target
        self.atf = atf
        self.middles = middles
        self.original = original


class TchGraph:
    def __init__(self, graph: TransportGraph, level, order, out, n_shortcuts):
        self.graph = graph
        self.level = level          # node index -> hierarchy rank
        self.order = order          # rank -> node index
        self.out = out              # node index -> list[TchEdge]
        self.n_shortcuts = n_shortcuts
        self.down_bbox = None       # filled by compute_down_bboxes
        self.max_speed_mps = _max_speed(graph)

    @property
    def n_edges(self) -> int:
        return sum(len(adj) for adj in self.out)

    def edge(self, u: int, v: int) -> Optional[TchEdge]:
        for e in self.out[u]:
            if e.target == v:
                return e
        return None

    def adjacency(self) -> list[list[tuple[int, EdgeAtf]]]:
        """(target, atf) view used by the node-index builders."""
        return [[(e.target, e.atf) for e in adj] for adj in self.out]


class _WorkEdge:
    __slots__ = ("atf", "middles", "original")

    def __init__(self, atf, middles, original):
        self.atf = atf
        self.middles = middles
        self.original = original


def _haversine_m(lat1, lon1, lat2, lon2) -> float:
    r = 6_371_000.0
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(a))


def _max_speed(graph: TransportGraph) -> Optional[float]:
    """Fastest observed metres per second; None when unbounded or unknown."""
    best = 0.0
    nodes = graph.nodes
    for u, adj in enumerate(graph.out):
        for v, atf in adj:
            dist = _haversine_m(nodes[u].lat, nodes[u].lon, nodes[v].lat, nodes[v].lon)
            if dist <= 0.0:
                continue
            if atf.has_walk:
                if atf.walk == 0:
                    return None
                best = max(best, dist / atf.walk)
            for d, a in zip(atf.deps, atf.arrs):
                if a == d:
                    return None
                best = max(best, dist / (a - d))
    return best if best > 0.0 else None


class _Contraction:
    """Working graph shared by the ordering heuristic and contraction."""

    def __init__(self, graph: TransportGraph):
        n = graph.n_nodes
        self.graph = graph
        self.out: list[dict[int, _WorkEdge]] = [dict() for _ in range(n)]
        self.inn: list[set[int]] = [set() for _ in range(n)]
        for u, adj in enumerate(graph.out):
            for v, atf in adj:
                self.out[u][v] = _WorkEdge(atf, [], atf)
                self.inn[v].add(u)
        self.depth = [0] * n
        self.level = [-1] * n
        self.order: list[int] = []
        self.final_out: list[list[TchEdge]] = [[] for _ in range(n)]
        self.n_shortcuts = 0

    def score(self, v: int, w_edge_diff: float, w_depth: float) -> float:
        inserted = 0
        out_v = self.out[v]
        for u in self.inn[v]:
            if u == v:
                continue
            f_uv = self.out[u][v].atf
            for w, e_vw in out_v.items():
                if w == v or w == u:
                    continue
                if not chain_is_empty(f_uv, e_vw.atf):
                    inserted += 1
        removed = len(self.inn[v]) + len(out_v)
        return w_edge_diff * (inserted - removed) + w_depth * self.depth[v]

    def contract(self, v: int) -> None:
        out_v = self.out[v]
        neighbours = (self.inn[v] | set(out_v)) - {v}
        for u in sorted(self.inn[v]):
            if u == v:
                continue
            f_uv = self.out[u][v].atf
            for w in sorted(out_v):
                if w == v or w == u:
                    continue
                f_vw = out_v[w].atf
                if chain_is_empty(f_uv, f_vw):
                    continue
                shortcut = chain_atf(f_uv, f_vw)
                existing = self.out[u].get(w)
                if existing is not None:
                    existing.atf = merge_atf(existing.atf, shortcut)
                    existing.middles.append(v)
                else:
                    self.out[u][w] = _WorkEdge(shortcut, [v], None)
                    self.inn[w].add(u)
                self.n_shortcuts += 1

        # freeze v's remaining edges: they can never change again
        for w in sorted(out_v):
            e = out_v[w]
            self.final_out[v].append(TchEdge(w, e.atf, tuple(e.middles), e.original))
            self.inn[w].discard(v)
        for u in sorted(self.inn[v]):
            if u == v:
                continue
            e = self.out[u].pop(v)
            self.final_out[u].append(TchEdge(v, e.atf, tuple(e.middles), e.original))
        self.out[v] = {}
        self.inn[v] = set()

        self.level[v] = len(self.order)
        self.order.append(v)
        for x in neighbours:
            if self.depth[x] < self.depth[v] + 1:
                self.depth[x] = self.depth[v] + 1

    def finish(self) -> TchGraph:
        nodes = self.graph.nodes
        for adj in self.final_out:
            adj.sort(key=lambda e: nodes[e.target].id)
        return TchGraph(self.graph, self.level, self.order, self.final_out, self.n_shortcuts)


def build_tch(graph: TransportGraph, w_edge_diff: float = 1.0, w_depth: float = 1.0) -> TchGraph:
    """Order and contract in one pass; returns the finished hierarchy."""
    if graph.n_nodes == 0:
        raise ValueError("cannot contract an empty graph")
    work = _Contraction(graph)
    heap = [(work.score(v, w_edge_diff, w_depth), v) for v in range(graph.n_nodes)]
    heapq.heapify(heap)
    contracted = [False] * graph.n_nodes
    while heap:
        s, v = heapq.heappop(heap)
        if contracted[v]:
            continue
        s_now = work.score(v, w_edge_diff, w_depth)
        if heap and s_now > heap[0][0]:
            heapq.heappush(heap, (s_now, v))
            continue
        work.contract(v)
        contracted[v] = True
    tch = work.finish()
    tch.down_bbox = compute_down_bboxes(tch)
    return tch


def order_nodes(graph: TransportGraph, w_edge_diff: float = 1.0, w_depth: float = 1.0) -> list[int]:
    """Contraction ranks per node under the weighted heuristic."""
    return build_tch(graph, w_edge_diff, w_depth).level


def contract(graph: TransportGraph, order: Sequence[int]) -> TchGraph:
    """Contract along a given node order (a permutation of node indices)."""
    if sorted(order) != list(range(graph.n_nodes)):
        raise ValueError("order must be a permutation of all node indices")
    work = _Contraction(graph)
    for v in order:
        work.contract(v)
    tch = work.finish()
    tch.down_bbox = compute_down_bboxes(tch)
    return tch


def compute_down_bboxes(tch: TchGraph) -> list[tuple[float, float, float, float]]:
    """Per node, the lat/lon rectangle covering its down-edge closure.

    Processed in increasing hierarchy order so every down target is already
    final when its sources aggregate it.
    """
    nodes = tch.graph.nodes
    level = tch.level
    boxes: list[Optional[tuple[float, float, float, float]]] = [None] * len(nodes)
    for v in tch.order:
        rec = nodes[v]
        lo_lat = hi_lat = rec.lat
        lo_lon = hi_lon = rec.lon
        for e in tch.out[v]:
            if level[e.target] < level[v]:
                b = boxes[e.target]
                if b[0] < lo_lat:
                    lo_lat = b[0]
                if b[1] < lo_lon:
                    lo_lon = b[1]
                if b[2] > hi_lat:
                    hi_lat = b[2]
                if b[3] > hi_lon:
                    hi_lon = b[3]
        boxes[v] = (lo_lat, lo_lon, hi_lat, hi_lon)
    return boxes


def bbox_contains(box: tuple[float, float, float, float], lat: float, lon: float) -> bool:
    return box[0] <= lat <= box[2] and box[1] <= lon <= box[3]
