"""Command-line interface.

Subcommands:
    synth       generate a synthetic dataset as the three ingestion CSVs
    contract    build the hierarchy and write a binary cache
    precompute  build node indices (and optionally the hierarchy) into a cache
    query       answer one earliest-arrival query, JSON on stdout
    bench       run the benchmark harness over a query sample
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cache as cachemod
from .bench import AgreementError, run_bench, write_report
from .datagen import (
    DEFAULT_WALK_LIMIT_M,
    DEFAULT_WALK_SPEED_MPS,
    generate_synthetic,
    load_dataset,
    write_dataset,
)
from .engine import Router
from .model import format_time, is_finite, parse_time
from .search import ALL_ALGORITHMS, ALGO_FS_TCH_FC_CHS, QueryRequest

TTN_CHOICES = ("none", "cst", "fc-asc", "fc-dsc", "fc-chs")

_ALGO_ALIASES = {
    "fs-tch-asc": "fs-tch-fc-asc",
    "fs-tch-dsc": "fs-tch-fc-dsc",
    "fs-tch-chs": "fs-tch-fc-chs",
}


def normalize_algorithm(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    key = _ALGO_ALIASES.get(key, key)
    if key not in ALL_ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALL_ALGORITHMS)}")
    return key


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="dataset directory with the three CSVs")
    p.add_argument("--cache", help="binary cache file written by contract/precompute")
    p.add_argument("--walk-limit-m", type=float, default=DEFAULT_WALK_LIMIT_M)
    p.add_argument("--walk-speed", type=float, default=DEFAULT_WALK_SPEED_MPS)


def _load_bundle(args) -> cachemod.CacheBundle:
    if args.cache:
        return cachemod.load_cache(args.cache)
    if args.graph:
        graph = load_dataset(args.graph, args.walk_limit_m, args.walk_speed)
        return cachemod.CacheBundle(graph=graph)
    raise SystemExit("one of --graph or --cache is required")


def _router_from(args, bundle: cachemod.CacheBundle, **kwargs) -> Router:
    router = Router(bundle.graph, **kwargs)
    router.adopt_cache(bundle)
    return router


def _cmd_synth(args) -> int:
    graph = generate_synthetic(args.nodes, args.out_deg, args.pct_tt, seed=args.seed)
    write_dataset(graph, args.out)
    print(f"wrote {graph.n_nodes} nodes, {graph.n_edges} edges, "
          f"{graph.total_connections()} connections to {args.out}")
    return 0


def _cmd_contract(args) -> int:
    bundle = _load_bundle(args)
    router = _router_from(args, bundle, w_edge_diff=args.w_edge_diff, w_depth=args.w_depth)
    tch = router.tch()
    bundle.tch = tch
    cachemod.save_cache(args.out, bundle)
    rec = router.build_stats.get("tch")
    built = f" in {rec.seconds:.2f}s" if rec else ""
    print(f"contracted {bundle.graph.n_nodes} nodes, {tch.n_shortcuts} shortcuts, "
          f"{tch.n_edges} edges{built}; cache -> {args.out}")
    return 0


def _cmd_precompute(args) -> int:
    bundle = _load_bundle(args)
    router = _router_from(args, bundle)
    if args.tch or args.ttn == "fc-chs":
        bundle.tch = router.tch()
    if args.ttn != "none":
        kind = args.ttn.replace("fc-", "")
        on_tch = bundle.tch is not None
        built = router.indices(kind, on_tch)
        bundle.indices[(kind, on_tch)] = built
    cachemod.save_cache(args.out, bundle)
    for rec in router.build_stats.values():
        print(f"built {rec.name}: {rec.seconds:.2f}s, {rec.elements} elements, {rec.n_bytes} bytes")
    print(f"cache -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    bundle = _load_bundle(args)
    router = _router_from(args, bundle)
    algo = normalize_algorithm(args.algo)
    router.prepare(algo)
    req = QueryRequest(args.source, args.target, parse_time(args.at), algo)
    res = router.query(req)
    legs = []
    if res.journey is not None:
        legs = [
            {
                "from": leg.source,
                "to": leg.target,
                "board": leg.board,
                "alight": leg.alight,
                "mode": leg.mode,
                "trip": leg.trip,
            }
            for leg in res.journey.legs
        ]
    payload = {
        "arrival": res.arrival if is_finite(res.arrival) else None,
        "legs": legs,
        "expanded": res.expanded_nodes,
        "wall_ns": res.wall_ns,
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if is_finite(res.arrival):
        print(f"# arrival {format_time(res.arrival)}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    bundle = _load_bundle(args)
    router = _router_from(args, bundle)
    algorithms = [normalize_algorithm(a) for a in args.algos.split(",") if a.strip()]
    if not algorithms:
        raise SystemExit("--algos must name at least one algorithm")
    try:
        report = run_bench(bundle.graph, algorithms, args.n, args.seed, router=router)
    except AgreementError as exc:
        print(f"agreement violation: {exc}", file=sys.stderr)
        return 2
    write_report(report, args.out)
    for s in report.summaries:
        print(f"{s.algorithm}: %P={s.pct_found:.1f} mean={s.mean_wall_ns / 1e6:.4f}ms "
              f"expanded={s.mean_expanded:.1f}")
    print(f"report -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttnroute",
        description="Time-dependent multimodal routing: queries, precomputation, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--out-deg", type=int, required=True)
    p.add_argument("--pct-tt", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("contract", help="build the hierarchy and cache it")
    _add_graph_source(p)
    p.add_argument("--w-edge-diff", type=float, default=1.0)
    p.add_argument("--w-depth", type=float, default=1.0)
    p.add_argument("--out", required=True, help="cache file to write")
    p.set_defaults(func=_cmd_contract)

    p = sub.add_parser("precompute", help="build node indices into a cache")
    _add_graph_source(p)
    p.add_argument("--ttn", choices=TTN_CHOICES, default="none")
    p.add_argument("--tch", action="store_true", help="also contract the graph")
    p.add_argument("--out", required=True, help="cache file to write")
    p.set_defaults(func=_cmd_precompute)

    p = sub.add_parser("query", help="answer one earliest-arrival query")
    _add_graph_source(p)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--at", required=True, help="departure time HH:MM[:SS]")
    p.add_argument("--algo", default="dij-tte")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("bench", help="run the benchmark harness")
    _add_graph_source(p)
    p.add_argument("--algos", required=True, help="comma-separated algorithm names")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
