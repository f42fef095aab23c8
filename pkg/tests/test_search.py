import random

import pytest

from conftest import T
from ttnroute.datagen import generate_synthetic
from ttnroute.model import Connection, EdgeAtf, INFINITE_TIME, TransportGraph, is_finite
from ttnroute.nodeindex import build_node_indices
from ttnroute.search import (
    ALGO_DIJ_TTE,
    HEURISTIC_GEO,
    QueryRequest,
    dijkstra,
    forward_search,
    unpack_journey,
    validate_utd_path,
)
from ttnroute.tch import _haversine_m, build_tch, contract


def test_dijkstra_source_equals_target(fig1_graph):
    res = dijkstra(fig1_graph, QueryRequest("A", "A", T("09:00")))
    assert res.arrival == T("09:00")
    assert res.journey.legs == ()
    assert res.expanded_nodes == 1


def test_dijkstra_fig1_walk_to_d(fig1_graph):
    res = dijkstra(fig1_graph, QueryRequest("A", "D", T("13:15")))
    assert res.arrival == T("13:35")
    assert len(res.journey.legs) == 1
    leg = res.journey.legs[0]
    assert leg.mode == "walk"
    assert (leg.board, leg.alight) == (T("13:15"), T("13:35"))


def test_dijkstra_unreachable(fig1_graph):
    res = dijkstra(fig1_graph, QueryRequest("B", "A", T("09:00")))
    assert res.arrival == INFINITE_TIME
    assert res.journey is None


def test_dijkstra_unknown_node(fig1_graph):
    with pytest.raises(ValueError, match="unknown node"):
        dijkstra(fig1_graph, QueryRequest("A", "missing", 0))


def test_dijkstra_variants_agree():
    graph = generate_synthetic(40, 5, 60, seed=9)
    by_kind = {
        kind: build_node_indices(graph.out, kind)
        for kind in ("cst", "asc", "dsc")
    }
    rng = random.Random(10)
    ids = [rec.id for rec in graph.nodes]
    for _ in range(300):
        req = QueryRequest(rng.choice(ids), rng.choice(ids), rng.randrange(0, 86_400))
        base = dijkstra(graph, req)
        for kind, indices in by_kind.items():
            res = dijkstra(graph, req, node_indices=indices)
            assert res.arrival == base.arrival, (req, kind)


def test_journey_legs_are_contiguous_and_consistent():
    graph = generate_synthetic(40, 5, 60, seed=9)
    rng = random.Random(12)
    ids = [rec.id for rec in graph.nodes]
    checked = 0
    for _ in range(200):
        req = QueryRequest(rng.choice(ids), rng.choice(ids), rng.randrange(0, 86_400))
        res = dijkstra(graph, req)
        if res.journey is None or not res.journey.legs:
            continue
        checked += 1
        legs = res.journey.legs
        assert legs[0].source == req.source
        assert legs[-1].target == req.target
        assert legs[0].board >= req.depart
        assert legs[-1].alight == res.arrival
        for prev, cur in zip(legs, legs[1:]):
            assert prev.target == cur.source
            assert prev.alight <= cur.board
    assert checked > 50


def test_forward_search_source_equals_target(fig1_graph):
    tch = build_tch(fig1_graph)
    res = forward_search(tch, QueryRequest("A", "A", T("08:00")))
    assert res.arrival == T("08:00")
    assert res.journey.legs == ()


def test_forward_search_three_node_contracted_path():
    g = TransportGraph()
    for i, name in enumerate(["a", "b", "c"]):
        g.add_node(name, 0.001 * i, 0.0)
    g.add_edge("a", "b", EdgeAtf(100, []))
    g.add_edge("b", "c", EdgeAtf(150, []))
    a, b, c = (g.node_index(x) for x in "abc")
    tch = contract(g, [b, a, c])
    res = forward_search(tch, QueryRequest("a", "c", 1000))
    assert res.arrival == 1250
    assert validate_utd_path(tch, res.tch_path)
    # apex is the highest-level node on the hierarchy path
    apex = max(res.tch_path, key=lambda v: tch.level[v])
    assert tch.level[apex] == max(tch.level[v] for v in res.tch_path)
    # the shortcut unpacks into the two original legs
    assert [(l.source, l.target) for l in res.journey.legs] == [("a", "b"), ("b", "c")]


def test_forward_search_matches_dijkstra_and_utd_holds():
    for seed, (n, k, pct) in enumerate([(60, 4, 50), (40, 6, 100)], start=20):
        graph = generate_synthetic(n, k, pct, seed=seed)
        tch = build_tch(graph)
        kinds = {
            None: None,
            "cst": build_node_indices(tch.adjacency(), "cst"),
            "asc": build_node_indices(tch.adjacency(), "asc"),
            "chs": build_node_indices(tch.adjacency(), "chs", tch.level),
        }
        rng = random.Random(seed)
        ids = [rec.id for rec in graph.nodes]
        for _ in range(150):
            req = QueryRequest(rng.choice(ids), rng.choice(ids), rng.randrange(0, 86_400))
            base = dijkstra(graph, req)
            for kind, indices in kinds.items():
                res = forward_search(
                    tch,
                    req,
                    node_indices=indices,
                    chs_truncation=(kind == "chs"),
                )
                assert res.arrival == base.arrival, (req, kind)
                if res.tch_path is not None:
                    assert validate_utd_path(tch, res.tch_path)


def test_forward_search_geo_heuristic_is_exact_and_admissible():
    graph = generate_synthetic(50, 4, 60, seed=31)
    tch = build_tch(graph)
    rng = random.Random(32)
    ids = [rec.id for rec in graph.nodes]
    for _ in range(100):
        req = QueryRequest(rng.choice(ids), rng.choice(ids), rng.randrange(0, 86_400))
        base = dijkstra(graph, req)
        res = forward_search(tch, req, heuristic=HEURISTIC_GEO)
        assert res.arrival == base.arrival
        # admissibility: straight-line time bound never exceeds real cost
        if is_finite(base.arrival) and tch.max_speed_mps:
            s = graph.node_index(req.source)
            d = graph.node_index(req.target)
            lb = _haversine_m(
                graph.nodes[s].lat, graph.nodes[s].lon,
                graph.nodes[d].lat, graph.nodes[d].lon,
            ) / tch.max_speed_mps
            assert req.depart + lb <= base.arrival + 1e-9


def test_unpack_identity_for_plain_edges():
    g = TransportGraph()
    g.add_node("x", 0.0, 0.0)
    g.add_node("y", 0.001, 0.0)
    g.add_edge("x", "y", EdgeAtf(60, []))
    tch = contract(g, [0, 1])
    j = unpack_journey(tch, [g.node_index("x"), g.node_index("y")], 500)
    assert [(l.source, l.target, l.mode) for l in j.legs] == [("x", "y", "walk")]
    assert j.arrival == 560


def test_unpack_nested_shortcut_flattens_fully():
    # a -> b -> c -> d contracted inner-out: shortcut of a shortcut
    from ttnroute.model import INFINITE_DURATION

    g = TransportGraph()
    for i, name in enumerate(["a", "b", "c", "d"]):
        g.add_node(name, 0.001 * i, 0.0)
    g.add_edge("a", "b", EdgeAtf(INFINITE_DURATION, [Connection(1000, 1050, "r1")]))
    g.add_edge("b", "c", EdgeAtf(INFINITE_DURATION, [Connection(1100, 1200, "r2")]))
    g.add_edge("c", "d", EdgeAtf(INFINITE_DURATION, [Connection(1250, 1300, "r3")]))
    a, b, c, d = (g.node_index(x) for x in "abcd")
    tch = contract(g, [b, c, a, d])
    res = forward_search(tch, QueryRequest("a", "d", 990))
    assert res.arrival == 1300
    legs = res.journey.legs
    assert [(l.source, l.target) for l in legs] == [("a", "b"), ("b", "c"), ("c", "d")]
    assert [l.mode for l in legs] == ["transit", "transit", "transit"]
    for prev, cur in zip(legs, legs[1:]):
        assert prev.alight <= cur.board


def test_extracted_labels_are_monotone():
    # label-setting precondition: pops occur in non-decreasing arrival order
    from heapq import heappop, heappush

    graph = generate_synthetic(40, 4, 60, seed=33)
    rng = random.Random(34)
    ids = [rec.id for rec in graph.nodes]
    for _ in range(50):
        s = graph.node_index(rng.choice(ids))
        t0 = rng.randrange(0, 86_400)
        dist = [INFINITE_TIME] * graph.n_nodes
        dist[s] = t0
        heap = [(t0, s)]
        last = 0
        while heap:
            t, u = heappop(heap)
            if t != dist[u]:
                continue
            assert t >= last
            last = t
            for v, atf in graph.out[u]:
                a = atf.arrival_at(t)
                if a < dist[v]:
                    dist[v] = a
                    heappush(heap, (a, v))
