"""Shared fixtures: the worked four-node example graph and brute-force
oracles that stay independent of the code paths they check."""

from __future__ import annotations

import random

import pytest

from ttnroute.model import (
    Connection,
    EdgeAtf,
    INFINITE_DURATION,
    INFINITE_TIME,
    TransportGraph,
    parse_time,
)

T = parse_time


def fig1_edges() -> dict[str, EdgeAtf]:
    """The textbook node-A example: three outgoing edges."""
    ab = EdgeAtf(
        40 * 60,
        [Connection(T("14:00"), T("14:20"), "b1"), Connection(T("15:15"), T("15:20"), "b2")],
    )
    ac = EdgeAtf(
        INFINITE_DURATION,
        [
            Connection(T("13:30"), T("13:50"), "c1"),
            Connection(T("18:00"), T("18:20"), "c2"),
            Connection(T("20:10"), T("20:50"), "c3"),
        ],
    )
    ad = EdgeAtf(
        20 * 60,
        [
            Connection(T("12:00"), T("12:30"), "d1"),
            Connection(T("12:45"), T("13:30"), "d2"),
            Connection(T("15:15"), T("15:30"), "d3"),
            Connection(T("16:05"), T("16:30"), "d4"),
        ],
    )
    return {"B": ab, "C": ac, "D": ad}


def build_fig1_graph() -> TransportGraph:
    g = TransportGraph()
    g.add_node("A", 0.00, 0.00)
    g.add_node("B", 0.02, 0.00)
    g.add_node("C", 0.00, 0.02)
    g.add_node("D", 0.02, 0.02)
    for target, atf in fig1_edges().items():
        g.add_edge("A", target, atf)
    return g


@pytest.fixture
def fig1_graph() -> TransportGraph:
    return build_fig1_graph()


# -- oracles ---------------------------------------------------------------


def brute_eval(atf: EdgeAtf, t: int) -> int:
    """Linear-scan evaluation: min of walk and every boardable connection."""
    best = t + atf.walk
    for d, a in zip(atf.deps, atf.arrs):
        if d >= t and a < best:
            best = a
    return best if best < INFINITE_TIME else INFINITE_TIME


def brute_successor(atf: EdgeAtf, t: int) -> int:
    """Linear-scan index of the earliest connection departing >= t, or -1."""
    for i, d in enumerate(atf.deps):
        if d >= t:
            return i
    return -1


def random_atf(rng: random.Random, max_conns: int = 8, allow_empty: bool = False) -> EdgeAtf:
    walk = INFINITE_DURATION if rng.random() < 0.3 else rng.randrange(60, 3600)
    n = rng.randrange(0, max_conns + 1)
    conns = []
    for _ in range(n):
        dep = rng.randrange(0, 86_400)
        conns.append(Connection(dep, dep + rng.randrange(0, 3600), f"t{rng.randrange(100)}"))
    conns.sort(key=lambda c: (c.departure, c.arrival))
    atf = EdgeAtf(walk, conns)
    if atf.is_empty() and not allow_empty:
        return EdgeAtf(rng.randrange(60, 3600), conns)
    return atf
