"""Node-level next-departure indices.

Instead of one binary search per outgoing edge, a node answers "earliest
boardable departure on every outgoing edge at time t" in
O(k + log k + log total-connections) using either

* a combined search tree: one sorted merge of all departures plus a
  per-position matrix of per-edge successor indices, or
* fractional cascading: a chain of augmented departure lists where each
  list absorbs every second element of the one below it, linked by bridge
  pointers so only the top list needs a binary search.

Walk-only edges carry no departures and are answered directly.
"""

from __future__ import annotations

from bisect import bisect_left
from typing import Optional, Sequence

import numpy as np

from .model import EdgeAtf, INFINITE_TIME

ASC = "asc"
DSC = "dsc"
CHS = "chs"
ORDERINGS = (ASC, DSC, CHS)

NONE_IDX = -1


class CstIndex:
    """Combined departure list plus successor matrix for one node.

    The matrix is stored position-major (one row per combined departure,
    one int32 column per timetable edge) so a query fetches a single
    contiguous row; logically it is the transposed k x |combined| table.
    """

    __slots__ = (
        "targets",
        "walks",
        "edge_deps",
        "edge_best_arrs",
        "combined",
        "matrix",
        "walk_only",
        "_none_row",
    )

    def __init__(self, targets, walks, edge_deps, edge_best_arrs, combined, matrix, walk_only):
        self.targets = targets
        self.walks = walks
        self.edge_deps = edge_deps
        self.edge_best_arrs = edge_best_arrs
        self.combined = combined
        self.matrix = matrix
        self.walk_only = walk_only
        self._none_row = [NONE_IDX] * len(targets)

    @property
    def k(self) -> int:
        return len(self.targets)

    def row(self, edge_pos: int) -> list[int]:
        """Successor indices of one edge across all combined positions."""
        return self.matrix[:, edge_pos].tolist()

    def successors(self, t: int) -> list[int]:
        """Per-edge index of the earliest connection departing >= t (-1: none)."""
        m = self.combined.shape[0]
        if m == 0:
            return []
        j = int(np.searchsorted(self.combined, t, side="left"))
        if j >= m:
            return list(self._none_row)
        return self.matrix[j].tolist()

    def arrivals(self, t: int) -> list[tuple[int, int]]:
        """(target, earliest arrival) for every outgoing edge of the node."""
        out = []
        k = len(self.targets)
        if k:
            m = self.combined.shape[0]
            j = int(np.searchsorted(self.combined, t, side="left"))
            row = self.matrix[j].tolist() if j < m else self._none_row
            targets = self.targets
            walks = self.walks
            best = self.edge_best_arrs
            for i in range(k):
                idx = row[i]
                a = best[i][idx] if idx >= 0 else INFINITE_TIME
                w = t + walks[i]
                if w < a:
                    a = w
                out.append((targets[i], a if a < INFINITE_TIME else INFINITE_TIME))
        for tgt, w in self.walk_only:
            out.append((tgt, t + w))
        return out


def build_cst(edges: Sequence[tuple[int, EdgeAtf]]) -> CstIndex:
    """Build the combined search tree for one node's outgoing edges."""
    tt_edges = [(tgt, atf) for tgt, atf in edges if atf.size]
    walk_only = [(tgt, atf.walk) for tgt, atf in edges if not atf.size]
    targets = [tgt for tgt, _ in tt_edges]
    walks = [atf.walk for _, atf in tt_edges]
    edge_deps = [atf.deps for _, atf in tt_edges]
    edge_best_arrs = [atf.best_arrs for _, atf in tt_edges]

    if tt_edges:
        # one column per distinct departure value, as in the printed matrix
        combined = np.unique(np.concatenate([np.asarray(d, dtype=np.int64) for d in edge_deps]))
    else:
        combined = np.empty(0, dtype=np.int64)
    k = len(tt_edges)
    matrix = np.empty((combined.shape[0], k), dtype=np.int32)
    for i, deps in enumerate(edge_deps):
        arr = np.asarray(deps, dtype=np.int64)
        col = np.searchsorted(arr, combined, side="left").astype(np.int32)
        col[col == len(deps)] = NONE_IDX
        matrix[:, i] = col
    return CstIndex(targets, walks, edge_deps, edge_best_arrs, combined, matrix, walk_only)


def query_cst(index: CstIndex, t: int) -> list[int]:
    """One binary search over the combined list, then k row lookups."""
    return index.successors(t)


class FcList:
    """One augmented list of the cascade plus its bridges."""

    __slots__ = (
        "target",
        "target_level",
        "walk",
        "deps",
        "best_arrs",
        "values",
        "next_bridge",
        "orig_bridge",
    )

    def __init__(self, target, target_level, walk, deps, best_arrs, values, next_bridge, orig_bridge):
        self.target = target
        self.target_level = target_level
        self.walk = walk
        self.deps = deps
        self.best_arrs = best_arrs
        self.values = values
        self.next_bridge = next_bridge
        self.orig_bridge = orig_bridge


class FcIndex:
    """Fractional-cascading chain for one node, top list first."""

    __slots__ = ("lists", "walk_only", "ordering")

    def __init__(self, lists, walk_only, ordering):
        self.lists = lists
        self.walk_only = walk_only
        self.ordering = ordering

    @property
    def k(self) -> int:
        return len(self.lists)

    def augmented_values(self) -> list[list[int]]:
        return [lst.values for lst in self.lists]

    def total_augmented(self) -> int:
        return sum(len(lst.values) for lst in self.lists)

    def total_original(self) -> int:
        return sum(len(lst.deps) for lst in self.lists)

    def successors(self, t: int, truncate_above_level=None, stats=None) -> list[tuple[int, int]]:
        """(target, connection index) per cascade list; -1 when no service.

        Only the top list is binary searched; every other position comes
        from a bridge plus a scan of at most two elements. With
        ``truncate_above_level`` set, the walk stops before the first list
        whose edge targets a node above that hierarchy level.
        """
        out = []
        lists = self.lists
        if not lists:
            return out
        if truncate_above_level is not None and lists[0].target_level is None:
            raise ValueError("truncation requires an index built with hierarchy levels")
        pos = bisect_left(lists[0].values, t)
        prev = None
        for lst in lists:
            if truncate_above_level is not None and lst.target_level > truncate_above_level:
                break
            if prev is not None:
                n_prev = len(prev.values)
                guess = prev.next_bridge[pos if pos < n_prev else n_prev - 1]
                pos = _locate(lst.values, guess, t, stats)
            if pos < len(lst.values):
                oi = _locate(lst.deps, lst.orig_bridge[pos], t, stats)
                conn = oi if oi < len(lst.deps) else NONE_IDX
            else:
                conn = NONE_IDX
            out.append((lst.target, conn))
            prev = lst
        return out

    def arrivals(self, t: int, truncate_above_level=None) -> list[tuple[int, int]]:
        """(target, earliest arrival) pairs; cascade first, walk-only after."""
        out = []
        lists = self.lists
        if lists:
            if truncate_above_level is not None and lists[0].target_level is None:
                raise ValueError("truncation requires an index built with hierarchy levels")
            pos = bisect_left(lists[0].values, t)
            prev = None
            for lst in lists:
                if truncate_above_level is not None and lst.target_level > truncate_above_level:
                    break
                if prev is not None:
                    n_prev = len(prev.values)
                    guess = prev.next_bridge[pos if pos < n_prev else n_prev - 1]
                    pos = _locate(lst.values, guess, t, None)
                a = INFINITE_TIME
                if pos < len(lst.values):
                    oi = _locate(lst.deps, lst.orig_bridge[pos], t, None)
                    if oi < len(lst.deps):
                        a = lst.best_arrs[oi]
                w = t + lst.walk
                if w < a:
                    a = w
                out.append((lst.target, a if a < INFINITE_TIME else INFINITE_TIME))
                prev = lst
        for tgt, w in self.walk_only:
            out.append((tgt, t + w))
        return out


def _locate(values: list[int], i: int, t: int, stats) -> int:
    """Adjust a bridge landing to the first position with value >= t.

    The half-promotion construction guarantees the landing is within two
    positions of the answer; tests assert that via the stats counter.
    """
    n = len(values)
    steps = 0
    while i < n and values[i] < t:
        i += 1
        steps += 1
    while i > 0 and values[i - 1] >= t:
        i -= 1
        steps += 1
    if stats is not None and steps > stats.get("max_scan", 0):
        stats["max_scan"] = steps
    return i


def _nearest_bridges(values: list[int], anchor: list[int]) -> list[int]:
    """For each value, the index of the closest anchor element.

    Distance ties break toward the earlier element; equal values land on
    the first copy.
    """
    if not anchor:
        return [0] * len(values)
    v = np.asarray(values, dtype=np.int64)
    a = np.asarray(anchor, dtype=np.int64)
    p = np.searchsorted(a, v, side="left")
    out = np.empty(len(values), dtype=np.int64)
    for i, pi in enumerate(p):
        if pi == 0:
            out[i] = 0
        elif pi == len(anchor):
            out[i] = len(anchor) - 1
        else:
            left = values[i] - anchor[pi - 1]
            right = anchor[pi] - values[i]
            out[i] = pi - 1 if left <= right else pi
    return out.tolist()


def _merge_sorted(a: list[int], b: list[int]) -> list[int]:
    """Sorted merge of distinct values; a value shared by both inputs (or
    repeated within one) keeps a single entry, as in the printed cascades."""
    return sorted(set(a) | set(b))


def order_edges(edges, strategy: str, levels: Optional[Sequence[int]] = None):
    """Arrange timetable edges top-to-bottom of the cascade.

    asc: smaller original lists at the bottom (so sizes descend from the
    top); dsc: larger lists at the bottom; chs: the bottom list's edge
    targets the highest hierarchy level. Size ties keep adjacency (target
    id) order.
    """
    if strategy == ASC:
        return sorted(edges, key=lambda e: -e[1].size)
    if strategy == DSC:
        return sorted(edges, key=lambda e: e[1].size)
    if strategy == CHS:
        if levels is None:
            raise ValueError("chs ordering requires hierarchy levels")
        return sorted(edges, key=lambda e: levels[e[0]])
    raise ValueError(f"unknown ordering {strategy!r}")


def build_fc(
    edges: Sequence[tuple[int, EdgeAtf]],
    strategy: str = DSC,
    levels: Optional[Sequence[int]] = None,
) -> FcIndex:
    """Build the fractional-cascading index for one node's outgoing edges."""
    tt_edges = [(tgt, atf) for tgt, atf in edges if atf.size]
    walk_only = [(tgt, atf.walk) for tgt, atf in edges if not atf.size]
    ordered = order_edges(tt_edges, strategy, levels)

    # bottom list equals its edge's departures; each higher list merges in
    # every second element of the one below it
    values: list[list[int]] = [None] * len(ordered)
    for i in range(len(ordered) - 1, -1, -1):
        deps = ordered[i][1].deps
        if i == len(ordered) - 1:
            values[i] = sorted(set(deps))
        else:
            values[i] = _merge_sorted(deps, values[i + 1][1::2])

    lists = []
    for i, (tgt, atf) in enumerate(ordered):
        next_bridge = _nearest_bridges(values[i], values[i + 1]) if i + 1 < len(ordered) else None
        orig_bridge = _nearest_bridges(values[i], atf.deps)
        lists.append(
            FcList(
                target=tgt,
                target_level=levels[tgt] if levels is not None else None,
                walk=atf.walk,
                deps=atf.deps,
                best_arrs=atf.best_arrs,
                values=values[i],
                next_bridge=next_bridge,
                orig_bridge=orig_bridge,
            )
        )

    index = FcIndex(lists, walk_only, strategy)
    total_orig = index.total_original()
    assert index.total_augmented() <= 2 * total_orig or total_orig == 0, (
        "augmented lists exceed twice the original departures"
    )
    return index


def query_fc(index: FcIndex, t: int, truncate_above_level=None, stats=None):
    """Per-edge next-departure references via one search plus bridge hops."""
    return index.successors(t, truncate_above_level=truncate_above_level, stats=stats)


def query_node(index, t: int, truncate_above_level=None) -> list[tuple[int, int]]:
    """Earliest arrival per outgoing edge, walk fallback included."""
    if isinstance(index, CstIndex):
        if truncate_above_level is not None:
            raise ValueError("truncation is a cascade feature; build an fc index")
        return index.arrivals(t)
    return index.arrivals(t, truncate_above_level=truncate_above_level)


def build_node_indices(adjacency, kind: str, levels=None):
    """Build one index per node for every node with a timetable edge.

    ``adjacency`` is a list of (target, EdgeAtf) lists; nodes without
    timetable edges get None and are answered by direct evaluation.
    """
    out = []
    for edges in adjacency:
        if any(atf.size for _, atf in edges):
            if kind == "cst":
                out.append(build_cst(edges))
            else:
                out.append(build_fc(edges, kind, levels))
        else:
            out.append(None)
    return out
