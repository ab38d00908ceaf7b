"""Densest subgraphs with at least h_c edges of every color c.

``col_approx`` handles graphs whose edges carry one color each,
``col_approx_multi`` expands multi-colored edges into parallel edges first,
and ``heuristic_peel`` is the halting peel used as a baseline.
"""
from __future__ import annotations

import time

import numpy as np

from .graph_model import (
    ColorRequirement,
    EdgeColoredGraph,
    InfeasibleError,
    Mode,
    SubgraphResult,
    check_feasibility,
    make_result,
    to_multigraph,
)
from .peeling import _run_kernel, at_least_h_edges_peel_tracked, best_prefix

__all__ = ["col_approx", "col_approx_multi", "heuristic_peel", "patch_deficits"]


def _require_at_least(graph, req: ColorRequirement):
    if req.mode is not Mode.AT_LEAST:
        raise ValueError("only at-least requirements have an approximation")
    ok, slack = check_feasibility(graph, req)
    if not ok:
        short = {graph.color_labels[c]: int(-s) for c, s in enumerate(slack) if s < 0}
        raise InfeasibleError(f"not enough colored edges: missing {short}")


def patch_deficits(graph, nodes, req: ColorRequirement) -> np.ndarray:
    """Add endpoints of colored edges until every color meets its requirement.

    Colors are handled in index order. For a deficient color the next edge of
    that color not yet induced is taken, preferring edges that already have
    one endpoint inside the set, then the smallest edge id. Adding both
    endpoints also brings along every other edge they induce (all parallel
    copies on a multigraph).
    """
    inside = np.zeros(graph.n, dtype=bool)
    inside[np.asarray(nodes, dtype=np.int64)] = True
    h = req.as_array()
    u, v = graph.u, graph.v
    slot_color = graph.color_idx
    slot_edge = np.repeat(np.arange(graph.m), np.diff(graph.color_ptr))
    by_color = [slot_edge[slot_color == c] for c in range(graph.num_colors)]
    counts = _counts(graph, inside)
    for c in range(graph.num_colors):
        while counts[c] < h[c]:
            edges = by_color[c]
            iu, iv = inside[u[edges]], inside[v[edges]]
            outside = ~(iu & iv)
            half = outside & (iu | iv)
            pick = np.flatnonzero(half)
            if len(pick) == 0:
                pick = np.flatnonzero(outside)
            e = edges[pick[0]]
            inside[u[e]] = inside[v[e]] = True
            counts = _counts(graph, inside)
    return np.flatnonzero(inside)


def _counts(graph, mask):
    ind = mask[graph.u] & mask[graph.v]
    slots = np.repeat(ind, np.diff(graph.color_ptr))
    return np.bincount(graph.color_idx[slots], minlength=graph.num_colors)


def col_approx(graph: EdgeColoredGraph, req: ColorRequirement,
               refine: str = "bset") -> SubgraphResult:
    """Approximate densest subgraph with at least ``req.h[c]`` edges of each color.

    Runs the at-least-(sum h) peel while recording the endpoints of edges
    whose removal left a color short (the deficit set B), then returns the
    subgraph induced by the chosen peeling state plus B. With
    ``refine="patch"`` B is ignored and missing colored edges are added one
    by one afterwards instead.

    Every edge must carry exactly one color; use :func:`col_approx_multi`
    otherwise.
    """
    t0 = time.perf_counter()
    req.validate(graph)
    if not graph.is_multigraph and not graph.is_single_colored():
        raise ValueError("graph has multi-colored edges; use col_approx_multi")
    _require_at_least(graph, req)
    res, b, _ = at_least_h_edges_peel_tracked(graph, req)
    if refine == "bset":
        nodes = np.union1d(np.asarray(res.nodes, dtype=np.int64), b)
    elif refine == "patch":
        nodes = patch_deficits(graph, res.nodes, req)
    else:
        raise ValueError(f"unknown refine mode {refine!r}")
    out = make_result(graph, nodes, "colapprox",
                      info={"core_state": res.info["state"], "core_size": res.size,
                            "deficit_nodes": int(len(b)), "refine": refine})
    # B-set refinement is feasible by construction; patch covers any gap anyway
    if not out.satisfies(req):
        out = make_result(graph, patch_deficits(graph, out.nodes, req), "colapprox",
                          info=out.info)
    out.wall_time = time.perf_counter() - t0
    return out


def col_approx_multi(graph: EdgeColoredGraph, req: ColorRequirement,
                     refine: str = "bset") -> SubgraphResult:
    """:func:`col_approx` on the parallel-edge expansion of ``graph``.

    Density and counts in the result refer to the multigraph (each color of
    an edge counted once); ``simple_edge_count`` gives the simple-graph edge
    count of the same node set.
    """
    t0 = time.perf_counter()
    req.validate(graph)
    _require_at_least(graph, req)
    mg = graph if graph.is_multigraph else to_multigraph(graph)
    res = col_approx(mg, req, refine=refine)
    res.algorithm = "colapprox_multi"
    res.wall_time = time.perf_counter() - t0
    return res


def heuristic_peel(graph, req: ColorRequirement) -> SubgraphResult:
    """Peel min-degree nodes while every color requirement still holds.

    Stops at the first node whose removal would leave some color short and
    returns the densest state seen up to that point.
    """
    t0 = time.perf_counter()
    req.validate(graph)
    _require_at_least(graph, req)
    order, rem, _, _, ops, halted = _run_kernel(graph, 0, req.h)
    steps = len(order)
    last = min(steps, graph.n - 1)
    i = best_prefix(rem, graph.n, last)
    gone = np.zeros(graph.n, dtype=bool)
    gone[order[:i]] = True
    out = make_result(graph, np.flatnonzero(~gone), "heuristic",
                      info={"state": i, "halted_at": steps if halted else None,
                            "operations": int(ops)})
    out.wall_time = time.perf_counter() - t0
    return out
