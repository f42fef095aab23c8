import pytest

from ttnroute.bench import AgreementError, run_bench, sample_queries, write_report
from ttnroute.datagen import generate_synthetic
from ttnroute.engine import Router, report_build_stats
from ttnroute.search import (
    ALGO_CSA,
    ALGO_DIJ_CST,
    ALGO_DIJ_FC_ASC,
    ALGO_DIJ_TTE,
    ALGO_FS_TCH_CST,
)


@pytest.fixture(scope="module")
def small_graph():
    return generate_synthetic(30, 4, 60, seed=81)


def test_query_sampling_is_deterministic(small_graph):
    assert sample_queries(small_graph, 50, 7) == sample_queries(small_graph, 50, 7)
    assert sample_queries(small_graph, 50, 7) != sample_queries(small_graph, 50, 8)


def test_run_bench_no_divergence_and_reproducible(small_graph):
    algos = [ALGO_CSA, ALGO_DIJ_TTE, ALGO_DIJ_CST, ALGO_FS_TCH_CST]
    a = run_bench(small_graph, algos, 120, seed=7)
    b = run_bench(small_graph, algos, 120, seed=7)
    strip = lambda r: (r.algorithm, r.source, r.target, r.depart, r.arrival, r.found, r.expanded)
    assert [strip(r) for r in a.records] == [strip(r) for r in b.records]
    assert len(a.records) == 4 * 120


def test_empty_query_set(small_graph):
    report = run_bench(small_graph, [ALGO_DIJ_TTE], 0, seed=1)
    assert report.records == []
    assert report.summaries[0].n_queries == 0


def test_percentage_arithmetic(small_graph):
    report = run_bench(small_graph, [ALGO_DIJ_TTE, ALGO_CSA], 80, seed=3)
    for s in report.summaries:
        found = sum(
            1 for r in report.records if r.algorithm == s.algorithm and r.found
        )
        assert s.found == found
        assert s.pct_found == pytest.approx(100.0 * found / 80)
    graph_p = next(s.pct_found for s in report.summaries if s.algorithm == ALGO_DIJ_TTE)
    csa_p = next(s.pct_found for s in report.summaries if s.algorithm == ALGO_CSA)
    assert graph_p >= csa_p


def test_agreement_error_lists_divergent_query(small_graph, monkeypatch):
    from ttnroute import bench as bench_mod

    real = bench_mod.Router.query

    def corrupted(self, req):
        res = real(self, req)
        if req.algorithm == ALGO_DIJ_CST and res.found:
            res.arrival += 60
        return res

    monkeypatch.setattr(bench_mod.Router, "query", corrupted)
    with pytest.raises(AgreementError, match="divergent arrivals"):
        run_bench(small_graph, [ALGO_DIJ_TTE, ALGO_DIJ_CST], 40, seed=5)


def test_build_stats_cover_requested_structures(small_graph):
    router = Router(small_graph)
    run_bench(small_graph, [ALGO_DIJ_CST, ALGO_DIJ_FC_ASC, ALGO_FS_TCH_CST], 10, 1, router=router)
    names = {b.name for b in report_build_stats(router)}
    assert {"ttn-cst", "ttn-fc-asc", "tch", "tch-ttn-cst"} <= names
    for rec in report_build_stats(router):
        assert rec.seconds >= 0
        assert rec.n_bytes > 0


def test_cst_uses_more_elements_than_fc_on_varied_timetables():
    # distinct departure sets per edge: the matrix grows with k, the
    # cascade stays within twice the departures
    import random

    from conftest import random_atf
    from ttnroute.model import TransportGraph

    rng = random.Random(83)
    graph = TransportGraph()
    for i in range(8):
        graph.add_node(f"v{i}", 0.0, 0.001 * i)
    for u in range(8):
        for v in range(8):
            if u != v:
                atf = random_atf(rng, max_conns=20)
                if atf.size == 0:
                    continue
                graph.add_edge(f"v{u}", f"v{v}", atf)
    router = Router(graph)
    router.indices("cst", False)
    router.indices("asc", False)
    stats = router.build_stats
    assert stats["ttn-cst"].elements > stats["ttn-fc-asc"].elements
    assert stats["ttn-cst"].n_bytes > stats["ttn-fc-asc"].n_bytes


def test_fc_orderings_identical_size_on_uniform_graph(small_graph):
    router = Router(small_graph)
    router.indices("asc", False)
    router.indices("dsc", False)
    stats = router.build_stats
    # uniform timetables make both orderings the same size
    assert stats["ttn-fc-asc"].elements == stats["ttn-fc-dsc"].elements
    assert stats["ttn-fc-asc"].n_bytes == stats["ttn-fc-dsc"].n_bytes


def test_walk_only_graph_has_empty_indices():
    graph = generate_synthetic(15, 3, 0, seed=82)
    router = Router(graph)
    router.indices("cst", False)
    assert router.build_stats["ttn-cst"].elements == 0


def test_report_files(tmp_path, small_graph):
    report = run_bench(small_graph, [ALGO_DIJ_TTE, ALGO_CSA], 25, seed=9)
    write_report(report, tmp_path)
    queries = (tmp_path / "queries.csv").read_text().splitlines()
    assert len(queries) == 1 + 2 * 25
    summary = (tmp_path / "summary.md").read_text()
    assert "dij-tte" in summary and "csa" in summary
    assert "Precomputation" in summary
