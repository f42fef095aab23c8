import random

from conftest import T, brute_eval, fig1_edges, random_atf
from ttnroute.atf import chain_atf, eval_atf, merge_atf, prune_dominated
from ttnroute.model import Connection, EdgeAtf, INFINITE_DURATION, INFINITE_TIME


def test_eval_fig1_a_to_d_walk_beats_bus():
    # at 13:15 the next ride arrives 15:30 but walking lands at 13:35
    ad = fig1_edges()["D"]
    assert eval_atf(ad, T("13:15")) == T("13:35")
    assert brute_eval(ad, T("13:15")) == T("13:35")


def test_eval_fig1_a_to_c_bus_only():
    ac = fig1_edges()["C"]
    assert eval_atf(ac, T("13:15")) == T("13:50")


def test_eval_empty_is_infinite():
    assert eval_atf(EdgeAtf(INFINITE_DURATION, []), T("09:00")) == INFINITE_TIME


def test_chain_pure_walks():
    f = chain_atf(EdgeAtf(10 * 60, []), EdgeAtf(5 * 60, []))
    assert f.walk == 15 * 60
    assert f.size == 0


def test_chain_fig1_ab_with_single_connection():
    ab = fig1_edges()["B"]
    bx = EdgeAtf(INFINITE_DURATION, [Connection(T("14:30"), T("14:45"), "x")])
    chained = chain_atf(ab, bx)
    # ride-ride: (14:00 -> 14:20) catches (14:30 -> 14:45); the 15:15 ride
    # misses it entirely; walk-first (14:30 - 40min, 14:45) is dominated
    assert list(zip(chained.deps, chained.arrs)) == [(T("14:00"), T("14:45"))]
    assert not chained.has_walk


def test_chain_equals_composition_on_minute_grid():
    rng = random.Random(21)
    for _ in range(100):
        f = random_atf(rng)
        g = random_atf(rng)
        chained = chain_atf(f, g)
        for t in range(0, 86_400, 60):
            mid = f.arrival_at(t)
            expect = g.arrival_at(mid) if mid < INFINITE_TIME else INFINITE_TIME
            assert chained.arrival_at(t) == expect, (f, g, t)


def test_chain_associative_at_evaluation_level():
    rng = random.Random(22)
    for _ in range(30):
        f, g, h = random_atf(rng), random_atf(rng), random_atf(rng)
        left = chain_atf(chain_atf(f, g), h)
        right = chain_atf(f, chain_atf(g, h))
        for _ in range(250):
            t = rng.randrange(0, 86_400)
            assert left.arrival_at(t) == right.arrival_at(t)


def test_merge_idempotent():
    ac = fig1_edges()["C"]
    assert merge_atf(ac, ac) == ac


def test_merge_walks():
    assert merge_atf(EdgeAtf(5 * 60, []), EdgeAtf(7 * 60, [])).walk == 5 * 60


def test_merge_pointwise_min_on_minute_grid():
    rng = random.Random(23)
    for _ in range(100):
        a = random_atf(rng)
        b = random_atf(rng)
        merged = merge_atf(a, b)
        for t in range(0, 86_400, 60):
            assert merged.arrival_at(t) == min(a.arrival_at(t), b.arrival_at(t))


def test_merge_commutative_and_associative_at_evaluation_level():
    rng = random.Random(24)
    for _ in range(30):
        a, b, c = random_atf(rng), random_atf(rng), random_atf(rng)
        ab = merge_atf(a, b)
        ba = merge_atf(b, a)
        left = merge_atf(ab, c)
        right = merge_atf(a, merge_atf(b, c))
        for _ in range(250):
            t = rng.randrange(0, 86_400)
            assert ab.arrival_at(t) == ba.arrival_at(t)
            assert left.arrival_at(t) == right.arrival_at(t)


def test_closure_chain_and_merge_keep_invariants():
    rng = random.Random(25)
    for _ in range(40):
        f, g = random_atf(rng), random_atf(rng)
        for out in (chain_atf(f, g), merge_atf(f, g)):
            prev = 0
            for t in range(0, 86_400, 300):
                a = out.arrival_at(t)
                assert a >= t
                assert a >= prev
                prev = a


def test_prune_drops_dominated_pair():
    tt = [Connection(T("10:00"), T("11:00")), Connection(T("10:30"), T("10:50"))]
    assert prune_dominated(tt) == [Connection(T("10:30"), T("10:50"))]


def test_prune_drops_walk_beaten_connection():
    tt = [Connection(T("10:00"), T("10:40"))]
    assert prune_dominated(tt, walk=30 * 60) == []


def test_prune_preserves_evaluation_on_minute_grid():
    rng = random.Random(26)
    for _ in range(40):
        walk = INFINITE_DURATION if rng.random() < 0.5 else rng.randrange(60, 7200)
        conns = []
        for _ in range(50):
            d = rng.randrange(0, 86_400)
            conns.append(Connection(d, d + rng.randrange(0, 5400)))
        conns.sort(key=lambda c: (c.departure, c.arrival))
        raw = EdgeAtf(walk, conns)
        pruned = EdgeAtf(walk, prune_dominated(conns, walk))
        for t in range(0, 86_400, 60):
            assert raw.arrival_at(t) == pruned.arrival_at(t)


def test_prune_output_strictly_interleaved():
    rng = random.Random(27)
    for _ in range(40):
        conns = []
        for _ in range(30):
            d = rng.randrange(0, 86_400)
            conns.append(Connection(d, d + rng.randrange(0, 5400)))
        conns.sort(key=lambda c: (c.departure, c.arrival))
        pruned = prune_dominated(conns, rng.randrange(600, 7200))
        for prev, cur in zip(pruned, pruned[1:]):
            assert prev.departure < cur.departure
            assert prev.arrival < cur.arrival
