"""Versioned binary cache for graphs, contracted hierarchies, and node
indices. Little-endian throughout; node references are positions in the
graph section's node sequence, so a parsed bundle re-serializes to the
identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import Connection, EdgeAtf, INFINITE_DURATION, TransportGraph
from .nodeindex import CstIndex, FcIndex, FcList
from .tch import TchEdge, TchGraph, compute_down_bboxes

MAGIC = b"TTNR"
VERSION = 1

TAG_GRAPH = b"GRPH"
TAG_TCH = b"TCHG"
TAG_INDEX = b"NIDX"


class CacheError(ValueError):
    pass


class _Writer:
    def __init__(self):
        self.buf = bytearray()

    def u8(self, v):
        self.buf += struct.pack("<B", v)

    def u32(self, v):
        self.buf += struct.pack("<I", v)

    def u64(self, v):
        self.buf += struct.pack("<Q", v)

    def i32(self, v):
        self.buf += struct.pack("<i", v)

    def i64(self, v):
        self.buf += struct.pack("<q", v)

    def f64(self, v):
        self.buf += struct.pack("<d", v)

    def text(self, s: str):
        raw = s.encode("utf-8")
        self.u32(len(raw))
        self.buf += raw

    def walk(self, w: int):
        self.i64(-1 if w >= INFINITE_DURATION else w)

    def i32_array(self, values):
        arr = np.asarray(values, dtype="<i4")
        self.u32(arr.shape[0])
        self.buf += arr.tobytes()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n):
        if self.pos + n > len(self.data):
            raise CacheError("truncated cache payload")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self):
        return struct.unpack("<B", self._take(1))[0]

    def u32(self):
        return struct.unpack("<I", self._take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self._take(8))[0]

    def i32(self):
        return struct.unpack("<i", self._take(4))[0]

    def i64(self):
        return struct.unpack("<q", self._take(8))[0]

    def f64(self):
        return struct.unpack("<d", self._take(8))[0]

    def text(self):
        return self._take(self.u32()).decode("utf-8")

    def walk(self):
        v = self.i64()
        return INFINITE_DURATION if v < 0 else v

    def i32_array(self) -> list[int]:
        n = self.u32()
        return np.frombuffer(self._take(4 * n), dtype="<i4").tolist()

    def done(self) -> bool:
        return self.pos >= len(self.data)


def _write_atf(w: _Writer, atf: EdgeAtf):
    w.walk(atf.walk)
    w.u32(atf.size)
    for d, a, tr in zip(atf.deps, atf.arrs, atf.trips):
        w.i32(d)
        w.i32(a)
        w.text(tr)


def _read_atf(r: _Reader) -> EdgeAtf:
    walk = r.walk()
    n = r.u32()
    conns = [Connection(r.i32(), r.i32(), r.text()) for _ in range(n)]
    return EdgeAtf(walk, conns)


def graph_bytes(graph: TransportGraph) -> bytes:
    w = _Writer()
    w.u32(graph.n_nodes)
    for rec in graph.nodes:
        w.text(rec.id)
        w.f64(rec.lat)
        w.f64(rec.lon)
    for adj in graph.out:
        w.u32(len(adj))
        for v, atf in adj:
            w.u32(v)
            _write_atf(w, atf)
    return bytes(w.buf)


def _read_graph(r: _Reader) -> TransportGraph:
    graph = TransportGraph()
    n = r.u32()
    for _ in range(n):
        graph.add_node(r.text(), r.f64(), r.f64())
    for u in range(n):
        m = r.u32()
        adj = []
        for _ in range(m):
            v = r.u32()
            adj.append((v, _read_atf(r)))
        graph.out[u] = adj
    graph.validate()
    return graph


def tch_bytes(tch: TchGraph) -> bytes:
    w = _Writer()
    n = len(tch.level)
    w.u32(n)
    for lvl in tch.level:
        w.u32(lvl)
    w.u64(tch.n_shortcuts)
    for adj in tch.out:
        w.u32(len(adj))
        for e in adj:
            w.u32(e.target)
            _write_atf(w, e.atf)
            w.u32(len(e.middles))
            for m in e.middles:
                w.u32(m)
            w.u8(1 if e.original is not None else 0)
    return bytes(w.buf)


def _read_tch(r: _Reader, graph: TransportGraph) -> TchGraph:
    n = r.u32()
    if n != graph.n_nodes:
        raise CacheError("hierarchy section does not match graph section")
    level = [r.u32() for _ in range(n)]
    n_shortcuts = r.u64()
    out = []
    for u in range(n):
        m = r.u32()
        adj = []
        for _ in range(m):
            v = r.u32()
            atf = _read_atf(r)
            middles = tuple(r.u32() for _ in range(r.u32()))
            has_orig = r.u8()
            original = graph.edge_atf(u, v) if has_orig else None
            adj.append(TchEdge(v, atf, middles, original))
        out.append(adj)
    order = [0] * n
    for v, lvl in enumerate(level):
        order[lvl] = v
    tch = TchGraph(graph, level, order, out, n_shortcuts)
    tch.down_bbox = compute_down_bboxes(tch)
    return tch


def cst_bytes(indices) -> bytes:
    """Payload for one per-node list of CstIndex (None allowed)."""
    w = _Writer()
    w.u32(len(indices))
    for idx in indices:
        if idx is None:
            w.u8(0)
            continue
        w.u8(1)
        w.u32(idx.k)
        for tgt, walk in zip(idx.targets, idx.walks):
            w.u32(tgt)
            w.walk(walk)
        w.i32_array(idx.combined)
        w.u32(idx.matrix.shape[0])
        w.u32(idx.matrix.shape[1])
        w.buf += np.ascontiguousarray(idx.matrix, dtype="<i4").tobytes()
        w.u32(len(idx.walk_only))
        for tgt, walk in idx.walk_only:
            w.u32(tgt)
            w.walk(walk)
    return bytes(w.buf)


def _read_cst(r: _Reader, atf_of) -> list[Optional[CstIndex]]:
    out = []
    n = r.u32()
    for u in range(n):
        if not r.u8():
            out.append(None)
            continue
        k = r.u32()
        targets, walks = [], []
        for _ in range(k):
            targets.append(r.u32())
            walks.append(r.walk())
        combined = np.asarray(r.i32_array(), dtype=np.int64)
        rows, cols = r.u32(), r.u32()
        matrix = np.frombuffer(r._take(4 * rows * cols), dtype="<i4").reshape(rows, cols).copy()
        n_walk = r.u32()
        walk_only = [(r.u32(), r.walk()) for _ in range(n_walk)]
        edge_deps, edge_best = [], []
        for tgt in targets:
            atf = atf_of(u, tgt)
            if atf is None:
                raise CacheError(f"index references missing edge {u}->{tgt}")
            edge_deps.append(atf.deps)
            edge_best.append(atf.best_arrs)
        out.append(CstIndex(targets, walks, edge_deps, edge_best, combined, matrix, walk_only))
    return out


def fc_bytes(indices) -> bytes:
    w = _Writer()
    w.u32(len(indices))
    for idx in indices:
        if idx is None:
            w.u8(0)
            continue
        w.u8(1)
        w.text(idx.ordering)
        w.u32(idx.k)
        for lst in idx.lists:
            w.u32(lst.target)
            w.i64(-1 if lst.target_level is None else lst.target_level)
            w.walk(lst.walk)
            w.i32_array(lst.values)
            if lst.next_bridge is None:
                w.u8(0)
            else:
                w.u8(1)
                w.i32_array(lst.next_bridge)
            w.i32_array(lst.orig_bridge)
        w.u32(len(idx.walk_only))
        for tgt, walk in idx.walk_only:
            w.u32(tgt)
            w.walk(walk)
    return bytes(w.buf)


def _read_fc(r: _Reader, atf_of) -> list[Optional[FcIndex]]:
    out = []
    n = r.u32()
    for u in range(n):
        if not r.u8():
            out.append(None)
            continue
        ordering = r.text()
        k = r.u32()
        lists = []
        for _ in range(k):
            tgt = r.u32()
            lvl = r.i64()
            walk = r.walk()
            values = r.i32_array()
            next_bridge = r.i32_array() if r.u8() else None
            orig_bridge = r.i32_array()
            atf = atf_of(u, tgt)
            if atf is None:
                raise CacheError(f"index references missing edge {u}->{tgt}")
            lists.append(
                FcList(
                    target=tgt,
                    target_level=None if lvl < 0 else lvl,
                    walk=walk,
                    deps=atf.deps,
                    best_arrs=atf.best_arrs,
                    values=values,
                    next_bridge=next_bridge,
                    orig_bridge=orig_bridge,
                )
            )
        n_walk = r.u32()
        walk_only = [(r.u32(), r.walk()) for _ in range(n_walk)]
        out.append(FcIndex(lists, walk_only, ordering))
    return out


@dataclass
class CacheBundle:
    graph: TransportGraph
    tch: Optional[TchGraph] = None
    # (kind, on_tch) -> per-node index list
    indices: dict = field(default_factory=dict)


def save_cache(path, bundle: CacheBundle) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        sections: list[tuple[bytes, bytes]] = [(TAG_GRAPH, graph_bytes(bundle.graph))]
        if bundle.tch is not None:
            sections.append((TAG_TCH, tch_bytes(bundle.tch)))
        for (kind, on_tch), indices in sorted(bundle.indices.items()):
            w = _Writer()
            w.text(kind)
            w.u8(1 if on_tch else 0)
            payload = cst_bytes(indices) if kind == "cst" else fc_bytes(indices)
            w.buf += payload
            sections.append((TAG_INDEX, bytes(w.buf)))
        for tag, payload in sections:
            fh.write(tag)
            fh.write(struct.pack("<Q", len(payload)))
            fh.write(payload)


def load_cache(path) -> CacheBundle:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise CacheError("not a routing cache file")
    (version,) = struct.unpack("<H", data[4:6])
    if version != VERSION:
        raise CacheError(f"unsupported cache version {version}")
    pos = 6
    graph = None
    tch = None
    indices = {}
    while pos < len(data):
        tag = data[pos : pos + 4]
        (length,) = struct.unpack("<Q", data[pos + 4 : pos + 12])
        payload = data[pos + 12 : pos + 12 + length]
        pos += 12 + length
        if tag == TAG_GRAPH:
            graph = _read_graph(_Reader(payload))
        elif tag == TAG_TCH:
            if graph is None:
                raise CacheError("hierarchy section before graph section")
            tch = _read_tch(_Reader(payload), graph)
        elif tag == TAG_INDEX:
            if graph is None:
                raise CacheError("index section before graph section")
            r = _Reader(payload)
            kind = r.text()
            on_tch = bool(r.u8())
            if on_tch:
                if tch is None:
                    raise CacheError("hierarchy-index section before hierarchy section")
                src = tch
                atf_of = lambda u, v, s=src: (e.atf if (e := s.edge(u, v)) is not None else None)
            else:
                atf_of = lambda u, v, g=graph: g.edge_atf(u, v)
            loaded = _read_cst(r, atf_of) if kind == "cst" else _read_fc(r, atf_of)
            indices[(kind, on_tch)] = loaded
        else:
            raise CacheError(f"unknown section tag {tag!r}")
    if graph is None:
        raise CacheError("cache has no graph section")
    return CacheBundle(graph=graph, tch=tch, indices=indices)
