"""Per-graph query engine.

A Router owns one immutable graph, lazily builds whatever precomputed
structure an algorithm needs (merged timetable, hierarchy, node indices on
either graph), records build cost, and dispatches queries. Queries share
the built structures read-only, so one Router serves any number of
concurrent callers once prepared.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import cache as cachemod
from .csa import build_merged, csa_query
from .model import TransportGraph
from .nodeindex import build_node_indices
from .search import (
    ALGO_CSA,
    ALGO_DIJ_CST,
    ALGO_DIJ_FC_ASC,
    ALGO_DIJ_FC_DSC,
    ALGO_DIJ_TTE,
    ALGO_FS_TCH_CST,
    ALGO_FS_TCH_FC_ASC,
    ALGO_FS_TCH_FC_CHS,
    ALGO_FS_TCH_FC_DSC,
    ALGO_FS_TCH_TTE,
    ALL_ALGORITHMS,
    FORWARD_ALGORITHMS,
    HEURISTIC_ZERO,
    QueryRequest,
    QueryResult,
    dijkstra,
    forward_search,
)
from .tch import build_tch

_INDEX_KIND = {
    ALGO_DIJ_CST: ("cst", False),
    ALGO_DIJ_FC_ASC: ("asc", False),
    ALGO_DIJ_FC_DSC: ("dsc", False),
    ALGO_FS_TCH_CST: ("cst", True),
    ALGO_FS_TCH_FC_ASC: ("asc", True),
    ALGO_FS_TCH_FC_DSC: ("dsc", True),
    ALGO_FS_TCH_FC_CHS: ("chs", True),
}


@dataclass(frozen=True)
class BuildRecord:
    name: str
    seconds: float
    elements: int
    n_bytes: int


class Router:
    def __init__(
        self,
        graph: TransportGraph,
        w_edge_diff: float = 1.0,
        w_depth: float = 1.0,
        heuristic: str = HEURISTIC_ZERO,
    ):
        self.graph = graph
        self.w_edge_diff = w_edge_diff
        self.w_depth = w_depth
        self.heuristic = heuristic
        self._tch = None
        self._merged = None
        self._indices: dict[tuple[str, bool], list] = {}
        self.build_stats: dict[str, BuildRecord] = {}

    # -- structures ---------------------------------------------------------

    def tch(self):
        if self._tch is None:
            t0 = time.perf_counter()
            self._tch = build_tch(self.graph, self.w_edge_diff, self.w_depth)
            secs = time.perf_counter() - t0
            self.build_stats["tch"] = BuildRecord(
                "tch", secs, self._tch.n_edges, len(cachemod.tch_bytes(self._tch))
            )
        return self._tch

    def merged(self):
        if self._merged is None:
            t0 = time.perf_counter()
            self._merged = build_merged(self.graph)
            secs = time.perf_counter() - t0
            mt = self._merged
            approx = 16 * mt.size + sum(len(t) for t in mt.trip) + 12 * mt.footpath_count()
            self.build_stats["csa-merged"] = BuildRecord("csa-merged", secs, mt.size, approx)
        return self._merged

    def indices(self, kind: str, on_tch: bool):
        key = (kind, on_tch)
        if key not in self._indices:
            if on_tch:
                tch = self.tch()
                adjacency = tch.adjacency()
                levels = tch.level if kind == "chs" else None
            else:
                adjacency = self.graph.out
                levels = None
            t0 = time.perf_counter()
            built = build_node_indices(adjacency, kind, levels)
            secs = time.perf_counter() - t0
            if kind == "cst":
                elements = sum(ix.matrix.size for ix in built if ix is not None)
                n_bytes = len(cachemod.cst_bytes(built))
            else:
                elements = sum(ix.total_augmented() for ix in built if ix is not None)
                n_bytes = len(cachemod.fc_bytes(built))
            name = ("tch-" if on_tch else "") + ("ttn-cst" if kind == "cst" else f"ttn-fc-{kind}")
            self.build_stats[name] = BuildRecord(name, secs, elements, n_bytes)
            self._indices[key] = built
        return self._indices[key]

    def adopt_cache(self, bundle: cachemod.CacheBundle) -> None:
        """Reuse structures from a loaded cache bundle instead of building."""
        if bundle.graph is not self.graph:
            raise ValueError("cache bundle belongs to a different graph object")
        if bundle.tch is not None:
            self._tch = bundle.tch
        for key, built in bundle.indices.items():
            self._indices[key] = built

    # -- queries ------------------------------------------------------------

    def prepare(self, algorithm: str) -> None:
        if algorithm not in ALL_ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        if algorithm == ALGO_CSA:
            self.merged()
        elif algorithm in _INDEX_KIND:
            kind, on_tch = _INDEX_KIND[algorithm]
            self.indices(kind, on_tch)
        elif algorithm in FORWARD_ALGORITHMS:
            self.tch()

    def query(self, req: QueryRequest) -> QueryResult:
        algo = req.algorithm
        if algo == ALGO_CSA:
            return csa_query(self.merged(), req)
        if algo == ALGO_DIJ_TTE:
            return dijkstra(self.graph, req)
        if algo in (ALGO_DIJ_CST, ALGO_DIJ_FC_ASC, ALGO_DIJ_FC_DSC):
            kind, on_tch = _INDEX_KIND[algo]
            return dijkstra(self.graph, req, node_indices=self.indices(kind, on_tch))
        if algo == ALGO_FS_TCH_TTE:
            return forward_search(self.tch(), req, heuristic=self.heuristic)
        if algo in (ALGO_FS_TCH_CST, ALGO_FS_TCH_FC_ASC, ALGO_FS_TCH_FC_DSC, ALGO_FS_TCH_FC_CHS):
            kind, on_tch = _INDEX_KIND[algo]
            return forward_search(
                self.tch(),
                req,
                heuristic=self.heuristic,
                node_indices=self.indices(kind, on_tch),
                chs_truncation=(algo == ALGO_FS_TCH_FC_CHS),
            )
        raise ValueError(f"unknown algorithm {algo!r}")


def report_build_stats(router: Router) -> list[BuildRecord]:
    """Build wall time, element count, and serialized bytes per structure."""
    return [router.build_stats[name] for name in sorted(router.build_stats)]
