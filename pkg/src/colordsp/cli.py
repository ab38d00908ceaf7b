"""Command line interface: ``colordsp <command> ...`` (also ``python -m colordsp``).

Exit codes: 0 ok, 2 infeasible instance, 3 parse error, 4 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench
from .constrained import col_approx, col_approx_multi, heuristic_peel
from .graph_model import ColorRequirement, GraphFormatError, InfeasibleError, to_multigraph
from .ilp import write_ilp_models
from .oracles import (
    DEFAULT_CAP,
    CapExceeded,
    brute_force_at_least_h_edges,
    brute_force_colored,
    exact_dsp_flow,
)
from .peeling import at_least_h_edges_peel, greedy_peel_unconstrained

EXIT_OK, EXIT_INFEASIBLE, EXIT_PARSE, EXIT_CAP = 0, 2, 3, 4


def _parse_h(graph, text: str):
    """``"5"`` -> int, ``"c1=5,c2=3"`` -> ColorRequirement."""
    if "=" not in text:
        return int(text)
    spec = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        spec[key.strip()] = int(val)
    return ColorRequirement.from_labels(graph, spec)


def _emit(args, payload):
    """payload: list of dict rows, or a single dict."""
    rows = payload if isinstance(payload, list) else [payload]
    if args.format == "json":
        print(json.dumps(payload, indent=1, default=str))
        return
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    print(",".join(keys))
    for r in rows:
        print(",".join(_cell(r.get(k, "")) for k in keys))


def _cell(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, dict):
        return " ".join(f"{k}={x}" for k, x in v.items())
    return str(v)


def _result_row(res, graph):
    d = res.to_dict(graph.color_labels)
    d["density"] = d["density"]["fraction"]
    d["density_dec"] = f"{res.density.value:.6f}"
    return d


def cmd_stats(args, graph):
    row = {
        "nodes": graph.n,
        "edges": graph.m,
        "colors": graph.num_colors,
        "max_colors_per_edge": int(graph.colors_per_edge().max()),
        "color_totals": {c: int(t) for c, t in zip(graph.color_labels, graph.color_totals())},
    }
    if args.dsp:
        ref, prov = bench.unconstrained_reference(graph)
        row["dsp_density"] = f"{ref.density.value:.1f}"
        row["dsp_provenance"] = prov
    _emit(args, row)


def cmd_dsp(args, graph):
    res = greedy_peel_unconstrained(graph) if args.greedy else exact_dsp_flow(graph)
    _emit(args, _result_row(res, graph))


def cmd_alhe(args, graph):
    h = int(args.h)
    if args.exact:
        res = brute_force_at_least_h_edges(graph, h, cap=args.oracle_cap)
    else:
        res = at_least_h_edges_peel(graph, h)
    _emit(args, _result_row(res, graph))


def _colored(graph, req, algo, multi, cap):
    if algo == "heuristic":
        return heuristic_peel(graph, req), graph
    if multi or not graph.is_single_colored():
        mg = to_multigraph(graph)
        if algo == "brute":
            return brute_force_colored(mg, req, cap=cap), mg
        return col_approx_multi(mg, req), mg
    if algo == "brute":
        return brute_force_colored(graph, req, cap=cap), graph
    return col_approx(graph, req), graph


def cmd_alhc(args, graph):
    req = _parse_h(graph, args.h)
    if isinstance(req, int):
        raise SystemExit("alhc needs per-color requirements like --h c1=5,c2=3")
    res, space = _colored(graph, req, args.algo, args.multi, args.oracle_cap)
    _emit(args, _result_row(res, space))


def cmd_ladder(args, graph):
    if args.augment:
        graph = bench.adversarial_augment(graph)
    rungs = bench.requirement_ladder(graph, args.steps)
    if args.augment:
        rungs = [bench._with_new_color(r, graph) for r in rungs]
    rows = []
    for i, req in enumerate(rungs, start=1):
        for algo in args.algos.split(","):
            res, _ = _colored(graph, req, algo, args.multi, args.oracle_cap)
            rows.append({"rung": i, "algorithm": algo, "h": "|".join(map(str, req.h)),
                         "nodes": res.size, "edges": res.edge_count,
                         "density": str(res.density), "density_dec": f"{res.density.value:.6f}",
                         "feasible": int(res.satisfies(req))})
    _emit(args, rows)


def cmd_sweep(args, graph):
    recs = bench.sweep_h(graph, args.steps, repeats=args.repeats or bench.DEFAULT_REPEATS,
                         oracle=args.oracle, cap=args.oracle_cap)
    _print_records(args, recs, timing=args.timing)


def cmd_ilp(args, graph):
    req = _parse_h(graph, args.h)
    paths = write_ilp_models(graph, req, args.out, instance=args.instance)
    _emit(args, [{"file": str(p)} for p in paths])


def cmd_bench(args):
    recs = bench.run_bench_spec(args.spec, seed=args.seed, repeats=args.repeats,
                                cap=args.oracle_cap)
    _print_records(args, recs, timing=args.timing)
    if args.summary:
        print(json.dumps(bench.summarize(recs), indent=1), file=sys.stderr)


def _print_records(args, recs, timing):
    if args.format == "json":
        print(bench.records_to_json(recs, timing=timing))
    else:
        sys.stdout.write(bench.records_to_csv(recs, timing=timing))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--repeats", type=int, default=None,
                        help=f"timing repetitions (default {bench.DEFAULT_REPEATS})")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    common.add_argument("--input-format", choices=sorted(bench.DATASET_FORMATS),
                        default="canonical")

    p = argparse.ArgumentParser(prog="colordsp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", parents=[common], help="graph statistics")
    s.add_argument("file")
    s.add_argument("--dsp", action="store_true", help="also report d(S*)")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("dsp", parents=[common], help="unconstrained densest subgraph")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="max-flow (default)")
    g.add_argument("--greedy", action="store_true", help="greedy peel")
    s.set_defaults(func=cmd_dsp)

    s = sub.add_parser("alhe", parents=[common], help="at least h edges")
    s.add_argument("file")
    s.add_argument("--h", required=True)
    s.add_argument("--exact", action="store_true", help="subset enumeration")
    s.set_defaults(func=cmd_alhe)

    s = sub.add_parser("alhc", parents=[common], help="at least h_c colored edges")
    s.add_argument("file")
    s.add_argument("--h", required=True, help="c1=5,c2=3")
    s.add_argument("--multi", action="store_true", help="parallel-edge expansion")
    s.add_argument("--algo", choices=["colapprox", "heuristic", "brute"], default="colapprox")
    s.set_defaults(func=cmd_alhc)

    s = sub.add_parser("ladder", parents=[common], help="increasing color requirements")
    s.add_argument("file")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--algos", default="colapprox,heuristic")
    s.add_argument("--multi", action="store_true")
    s.add_argument("--augment", action="store_true",
                   help="add two nodes with one edge of a new required color")
    s.set_defaults(func=cmd_ladder)

    s = sub.add_parser("sweep", parents=[common], help="at-least-h density for h = w + i")
    s.add_argument("file")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--timing", action="store_true", help="include wall-time columns")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("ilp-export", parents=[common], help="write LP models, one per k")
    s.add_argument("file")
    s.add_argument("--h", required=True, help="N or c1=5,c2=3")
    s.add_argument("--out", required=True)
    s.add_argument("--instance", default="instance")
    s.set_defaults(func=cmd_ilp)

    s = sub.add_parser("bench", parents=[common], help="run a JSON bench description")
    s.add_argument("spec")
    s.add_argument("--timing", action="store_true", help="include wall-time columns")
    s.add_argument("--summary", action="store_true", help="print summary JSON to stderr")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            cmd_bench(args)
        else:
            graph = bench.load_dataset(args.file, args.input_format)
            args.func(args, graph)
    except GraphFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
