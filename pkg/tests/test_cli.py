import json

import pytest

from ttnroute.cli import main, normalize_algorithm


def test_algorithm_aliases():
    assert normalize_algorithm("fs-tch-chs") == "fs-tch-fc-chs"
    assert normalize_algorithm("DIJ_TTE") == "dij-tte"
    with pytest.raises(ValueError, match="unknown algorithm"):
        normalize_algorithm("warp-drive")


def test_synth_query_bench_pipeline(tmp_path, capsys):
    data = tmp_path / "data"
    assert main([
        "synth", "--nodes", "20", "--out-deg", "4", "--pct-tt", "60",
        "--seed", "5", "--out", str(data),
    ]) == 0
    assert (data / "nodes.csv").exists()
    assert (data / "footpaths.csv").exists()
    assert (data / "connections.csv").exists()
    capsys.readouterr()

    assert main([
        "query", "--graph", str(data), "--from", "n000", "--to", "n001",
        "--at", "08:30", "--algo", "dij-tte",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"arrival", "legs", "expanded", "wall_ns"}
    if payload["arrival"] is not None:
        assert payload["legs"]
        assert payload["legs"][0]["from"] == "n000"

    report = tmp_path / "report"
    assert main([
        "bench", "--graph", str(data),
        "--algos", "csa,dij-tte,dij-cst,fs-tch-chs",
        "--n", "40", "--seed", "7", "--out", str(report),
    ]) == 0
    assert (report / "queries.csv").exists()
    assert (report / "summary.md").exists()


def test_contract_then_query_from_cache(tmp_path, capsys):
    data = tmp_path / "data"
    main(["synth", "--nodes", "15", "--out-deg", "3", "--pct-tt", "50", "--seed", "2",
          "--out", str(data)])
    cachefile = tmp_path / "net.bin"
    assert main([
        "contract", "--graph", str(data), "--out", str(cachefile),
        "--w-edge-diff", "1.0", "--w-depth", "1.0",
    ]) == 0
    capsys.readouterr()
    assert main([
        "query", "--cache", str(cachefile), "--from", "n000", "--to", "n002",
        "--at", "09:00:00", "--algo", "fs-tch-tte",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "arrival" in payload


def test_precompute_ttn_flag(tmp_path, capsys):
    data = tmp_path / "data"
    main(["synth", "--nodes", "12", "--out-deg", "3", "--pct-tt", "80", "--seed", "3",
          "--out", str(data)])
    for ttn in ("none", "cst", "fc-asc", "fc-dsc", "fc-chs"):
        out = tmp_path / f"c_{ttn}.bin"
        assert main([
            "precompute", "--graph", str(data), "--ttn", ttn, "--out", str(out),
        ]) == 0
        assert out.exists()
    capsys.readouterr()
    # fc-chs implies a hierarchy: querying it from cache must work
    assert main([
        "query", "--cache", str(tmp_path / "c_fc-chs.bin"), "--from", "n000",
        "--to", "n001", "--at", "10:00", "--algo", "fs-tch-fc-chs",
    ]) == 0


def test_query_bad_node_fails_cleanly(tmp_path, capsys):
    data = tmp_path / "data"
    main(["synth", "--nodes", "10", "--out-deg", "2", "--pct-tt", "50", "--seed", "4",
          "--out", str(data)])
    capsys.readouterr()
    rc = main([
        "query", "--graph", str(data), "--from", "nope", "--to", "n001",
        "--at", "08:00", "--algo", "dij-tte",
    ])
    assert rc == 1
    assert "unknown node" in capsys.readouterr().err
