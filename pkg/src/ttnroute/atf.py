"""Algebra over arrival-time functions: evaluation, chaining, merging.

Chained and merged functions are materialized back into the walk+timetable
representation so lookups stay O(log n) and node-level indices can cover
shortcut edges. Domination pruning runs eagerly on every result to keep
materialized timetables minimal.
"""

from __future__ import annotations

from .model import (
    Connection,
    EdgeAtf,
    INFINITE_DURATION,
    INFINITE_TIME,
    add_duration,
)


def eval_atf(atf: EdgeAtf, t: int) -> int:
    """min(t + walk, earliest arrival of a connection departing >= t)."""
    return atf.arrival_at(t)


def prune_dominated(connections: list[Connection], walk: int = INFINITE_DURATION) -> list[Connection]:
    """Drop connections beaten by a later-or-equal departure with an
    earlier-or-equal arrival, and connections the walk already beats.

    Input must be sorted by (departure, arrival); the result has strictly
    increasing departures and strictly increasing arrivals.
    """
    kept: list[Connection] = []
    best = INFINITE_TIME + 1
    for c in reversed(connections):
        if c.arrival >= best:
            continue
        if walk < INFINITE_DURATION and c.arrival >= c.departure + walk:
            continue
        kept.append(c)
        best = c.arrival
    kept.reverse()
    out: list[Connection] = []
    for c in kept:
        # equal departures: the earlier arrival (already kept) dominates
        if out and out[-1].departure == c.departure:
            continue
        out.append(c)
    return out


def merge_atf(a: EdgeAtf, b: EdgeAtf) -> EdgeAtf:
    """Pointwise minimum of two functions over the same edge."""
    walk = min(a.walk, b.walk)
    conns = sorted(
        a.connections() + b.connections(),
        key=lambda c: (c.departure, c.arrival),
    )
    return EdgeAtf(walk, prune_dominated(conns, walk))


def chain_atf(first: EdgeAtf, second: EdgeAtf) -> EdgeAtf:
    """Compose two edge functions into one covering the two-edge path.

    For all t, eval(chain(f, g), t) == eval(g, eval(f, t)). Ride-first
    candidates keep their boarding departure; walk-first candidates shift
    the second leg's departure back by the walk and are dropped when that
    would move it before time zero.
    """
    walk = add_duration(first.walk, second.walk)
    cands: list[Connection] = []
    for d1, a1, trip1 in zip(first.deps, first.arrs, first.trips):
        a2 = second.arrival_at(a1)
        if a2 < INFINITE_TIME:
            cands.append(Connection(d1, a2, trip1))
    if first.walk < INFINITE_DURATION:
        w = first.walk
        for d2, a2, trip2 in zip(second.deps, second.arrs, second.trips):
            if d2 >= w:
                cands.append(Connection(d2 - w, a2, trip2))
    cands.sort(key=lambda c: (c.departure, c.arrival))
    return EdgeAtf(walk, prune_dominated(cands, walk))


def chain_is_empty(first: EdgeAtf, second: EdgeAtf) -> bool:
    """True when chain_atf(first, second) would offer no service at any time.

    Cheap exact test used while scoring contraction candidates, so shortcut
    counting never has to materialize the chained function.
    """
    if first.walk < INFINITE_DURATION and second.walk < INFINITE_DURATION:
        return False
    if first.deps:
        if second.walk < INFINITE_DURATION:
            return False
        # some ride of `first` must still catch a ride of `second`
        if second.deps and first.best_arrs[0] <= second.deps[-1]:
            return False
    if first.walk < INFINITE_DURATION and second.deps and second.deps[-1] >= first.walk:
        return False
    return True
