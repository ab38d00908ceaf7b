"""Min-degree peeling: bucket-queue kernel, greedy DSP and the at-least-h-edges approximation.

All peels share one compiled kernel. Nodes sit in an array sorted by current
degree with per-degree bucket starts; removing a node moves each affected
neighbour one bucket down by a swap, so a full peel is O(n + m). Ties are
broken by position in that array, which starts out ordered by node index.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numba
import numpy as np

from .graph_model import (
    ColorRequirement,
    Density,
    InfeasibleError,
    SubgraphResult,
    make_result,
)

__all__ = [
    "PeelingTrace",
    "lower_bound_nodes",
    "degeneracy_peel",
    "greedy_peel_unconstrained",
    "at_least_h_edges_peel",
    "at_least_h_edges_peel_tracked",
    "deficit_entry_steps",
    "best_prefix",
]


def lower_bound_nodes(h: int, p: int = 1) -> int:
    """Fewest nodes of any graph with ``h`` edges and at most ``p`` parallel edges per pair.

    Smallest k with ``p * k * (k - 1) / 2 >= h``; integer arithmetic only.
    """
    h, p = int(h), int(p)
    if h < 1 or p < 1:
        raise ValueError("h and p must be positive")
    # start just below the real root and walk up; at most a couple of steps
    k = max(2, int((1 + (1 + 8 * h / p) ** 0.5) / 2) - 1)
    while p * k * (k - 1) < 2 * h:
        k += 1
    while k > 2 and p * (k - 1) * (k - 2) >= 2 * h:
        k -= 1
    return k


@numba.njit(cache=True)
def _peel_kernel(n, adj_ptr, adj_nbr, adj_eid, m, min_edges,
                 check_colors, color_ptr, color_idx, h, rem_colors):
    deg = np.empty(n, np.int64)
    maxdeg = 0
    for x in range(n):
        deg[x] = adj_ptr[x + 1] - adj_ptr[x]
        if deg[x] > maxdeg:
            maxdeg = deg[x]
    # counting sort by degree, stable in node index
    bin_ = np.zeros(maxdeg + 2, np.int64)
    for x in range(n):
        bin_[deg[x] + 1] += 1
    for d in range(1, maxdeg + 2):
        bin_[d] += bin_[d - 1]
    vert = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    fill = bin_.copy()
    for x in range(n):
        p = fill[deg[x]]
        vert[p] = x
        pos[x] = p
        fill[deg[x]] += 1

    alive = np.ones(n, np.bool_)
    order = np.empty(n, np.int64)
    rem_edges = np.empty(n + 1, np.int64)
    edge_step = np.full(m, -1, np.int64)
    edge_seq = np.empty(m, np.int64)
    tally = np.zeros(rem_colors.shape[0], np.int64)
    touched = np.empty(max(rem_colors.shape[0], 1), np.int64)
    rem = m
    rem_edges[0] = m
    nseq = 0
    ops = 0
    steps = 0
    halted = False
    while steps < n:
        if rem < min_edges:
            break
        i = steps
        x = vert[i]
        d = deg[x]
        if check_colors:
            # would removing x push any color below its requirement?
            ntouch = 0
            for k in range(adj_ptr[x], adj_ptr[x + 1]):
                ops += 1
                if alive[adj_nbr[k]]:
                    e = adj_eid[k]
                    for q in range(color_ptr[e], color_ptr[e + 1]):
                        c = color_idx[q]
                        if tally[c] == 0:
                            touched[ntouch] = c
                            ntouch += 1
                        tally[c] += 1
            bad = False
            for t in range(ntouch):
                c = touched[t]
                if rem_colors[c] - tally[c] < h[c]:
                    bad = True
                tally[c] = 0
            if bad:
                halted = True
                break
        for k in range(d + 1):
            bin_[k] = i + 1
        ops += d + 1
        alive[x] = False
        order[i] = x
        for k in range(adj_ptr[x], adj_ptr[x + 1]):
            ops += 1
            y = adj_nbr[k]
            if not alive[y]:
                continue
            e = adj_eid[k]
            edge_step[e] = i + 1
            edge_seq[nseq] = e
            nseq += 1
            rem -= 1
            if check_colors:
                for q in range(color_ptr[e], color_ptr[e + 1]):
                    rem_colors[color_idx[q]] -= 1
            dy = deg[y]
            pw = bin_[dy]
            w = vert[pw]
            py = pos[y]
            vert[pw] = y
            pos[y] = pw
            vert[py] = w
            pos[w] = py
            bin_[dy] += 1
            deg[y] = dy - 1
            ops += 1
        steps += 1
        rem_edges[steps] = rem
    return order[:steps], rem_edges[:steps + 1], edge_step, edge_seq[:nseq], ops, halted


def _run_kernel(graph, min_edges=0, hvec=None):
    k = graph.num_colors
    if hvec is None:
        h = np.zeros(k, np.int64)
        rem_colors = np.zeros(k, np.int64)
        check = False
    else:
        h = np.asarray(hvec, dtype=np.int64)
        rem_colors = graph.color_totals().copy()
        check = True
    return _peel_kernel(graph.n, graph.adj_ptr, graph.adj_nbr, graph.adj_eid, graph.m,
                        int(min_edges), check, graph.color_ptr, graph.color_idx, h,
                        rem_colors)


@dataclass
class PeelingTrace:
    """Record of a min-degree peel.

    State ``i`` is the graph after ``i`` removals: ``remaining_nodes[i]`` and
    ``remaining_edges[i]`` describe it, ``removal_order[i]`` is the node that
    leaves between states ``i`` and ``i + 1``. ``edge_step[e]`` is the state
    index at which edge ``e`` disappeared (-1 if it survived) and
    ``edge_sequence`` lists removed edges in removal order.
    """

    graph: object
    removal_order: np.ndarray
    remaining_edges: np.ndarray
    edge_step: np.ndarray
    edge_sequence: np.ndarray
    operations: int
    min_edges: int = 0
    halted: bool = False

    @property
    def steps(self) -> int:
        return len(self.removal_order)

    @property
    def remaining_nodes(self) -> np.ndarray:
        return self.graph.n - np.arange(self.steps + 1, dtype=np.int64)

    @property
    def i_max(self) -> int:
        """Last state with at least ``min_edges`` edges."""
        ok = np.flatnonzero(self.remaining_edges >= self.min_edges)
        return int(ok[-1])

    def nodes_at(self, i: int) -> np.ndarray:
        """Node set of state ``i``."""
        gone = np.zeros(self.graph.n, dtype=bool)
        gone[self.removal_order[:i]] = True
        return np.flatnonzero(~gone)

    def remaining_colors(self) -> np.ndarray:
        """Per-state per-color edge counts, shape ``(steps + 1, colors)``."""
        g = self.graph
        out = np.zeros((self.steps + 1, g.num_colors), dtype=np.int64)
        out[0] = g.color_totals()
        removed = self.edge_step >= 0
        slots = np.repeat(removed, np.diff(g.color_ptr))
        steps = np.repeat(self.edge_step, np.diff(g.color_ptr))[slots]
        cols = g.color_idx[slots]
        np.add.at(out, (steps, cols), -1)
        return np.cumsum(out, axis=0)

    def to_json(self, colors: bool = True) -> str:
        g = self.graph
        rc = self.remaining_colors() if colors else None
        rows = []
        for i in range(self.steps + 1):
            row = {
                "step": i,
                "removed": None if i == 0 else g.node_labels[self.removal_order[i - 1]],
                "remaining_nodes": int(g.n - i),
                "remaining_edges": int(self.remaining_edges[i]),
            }
            if colors:
                row["remaining_colors"] = [int(c) for c in rc[i]]
            rows.append(row)
        return json.dumps(rows)


def degeneracy_peel(graph, min_edges: int = 0) -> PeelingTrace:
    """Peel minimum-degree nodes until the graph is empty.

    With ``min_edges > 0`` the peel stops at the first state holding fewer
    than ``min_edges`` edges (that state is still recorded).
    """
    order, rem, estep, eseq, ops, halted = _run_kernel(graph, min_edges)
    return PeelingTrace(graph, order, rem, estep, eseq, int(ops), int(min_edges), bool(halted))


def best_prefix(remaining_edges: np.ndarray, n: int, last: int, first: int = 0) -> int:
    """Index in ``[first, last]`` of the densest state; ties go to the later (smaller) state."""
    e = remaining_edges[first:last + 1].astype(np.int64)
    nodes = n - np.arange(first, last + 1, dtype=np.int64)
    approx = e / nodes
    top = approx.max()
    cand = np.flatnonzero(approx >= top * (1 - 1e-9))
    best = int(cand[-1])
    for c in cand[::-1]:
        c = int(c)
        if int(e[c]) * int(nodes[best]) > int(e[best]) * int(nodes[c]):
            best = c
    return first + best


def _timed_result(graph, nodes, algorithm, t0, **kw):
    res = make_result(graph, nodes, algorithm, **kw)
    res.wall_time = time.perf_counter() - t0
    return res


def greedy_peel_unconstrained(graph) -> SubgraphResult:
    """Charikar's peel: densest non-empty state of a full min-degree peel (>= optimum / 2)."""
    t0 = time.perf_counter()
    if graph.n == 0:
        raise ValueError("empty graph")
    tr = degeneracy_peel(graph)
    i = best_prefix(tr.remaining_edges, graph.n, graph.n - 1)
    return _timed_result(graph, tr.nodes_at(i), "greedy", t0,
                         info={"state": i, "operations": tr.operations})


def at_least_h_edges_peel(graph, h: int) -> SubgraphResult:
    """Densest peeling state that still has at least ``h`` edges.

    The peel stops as soon as fewer than ``h`` edges remain, so larger ``h``
    means less work. ``h = 0`` is the unconstrained greedy peel.
    """
    t0 = time.perf_counter()
    h = int(h)
    if h < 0:
        raise ValueError("h must be non-negative")
    if graph.m < h:
        raise InfeasibleError(f"graph has {graph.m} edges, {h} required")
    if h == 0:
        res = greedy_peel_unconstrained(graph)
        res.algorithm = "at_least_h"
        return res
    tr = degeneracy_peel(graph, min_edges=h)
    i = best_prefix(tr.remaining_edges, graph.n, tr.i_max)
    return _timed_result(graph, tr.nodes_at(i), "at_least_h", t0,
                         info={"state": i, "i_max": tr.i_max, "operations": tr.operations})


def deficit_entry_steps(trace: PeelingTrace, hvec) -> np.ndarray:
    """State index at which each node joins the deficit set B (-1 = never).

    An edge removal is a deficit removal when it leaves fewer than ``h_c``
    edges of one of its colors ``c``; both endpoints then join B. For color c
    these are exactly the last ``h_c`` color-c edges to be removed. B at
    state i is ``{x : 0 <= entry[x] <= i}``.
    """
    g = trace.graph
    h = np.asarray(hvec, dtype=np.int64)
    totals = g.color_totals()
    seq = trace.edge_sequence
    entry = np.full(g.n, -1, dtype=np.int64)
    if len(seq) == 0:
        return entry
    reps = g.color_ptr[seq + 1] - g.color_ptr[seq]
    edge_of_slot = np.repeat(seq, reps)
    starts = np.repeat(g.color_ptr[seq], reps)
    offs = np.arange(len(edge_of_slot)) - np.repeat(np.cumsum(reps) - reps, reps)
    cols = g.color_idx[starts + offs]
    # rank of each removal among removals of the same color (stable => removal order)
    srt = np.argsort(cols, kind="stable")
    sc = cols[srt]
    group_start = np.searchsorted(sc, sc, side="left")
    rank = np.empty(len(cols), dtype=np.int64)
    rank[srt] = np.arange(len(cols)) - group_start
    # k-th removal (1-based) leaves totals - k edges of that color
    deficit = totals[cols] - (rank + 1) < h[cols]
    bad_edges = edge_of_slot[deficit]
    if len(bad_edges) == 0:
        return entry
    st = trace.edge_step[bad_edges]
    big = np.iinfo(np.int64).max
    first = np.full(g.n, big, dtype=np.int64)
    np.minimum.at(first, g.u[bad_edges], st)
    np.minimum.at(first, g.v[bad_edges], st)
    entry[first < big] = first[first < big]
    return entry


def at_least_h_edges_peel_tracked(graph, req: ColorRequirement):
    """At-least-(sum h) peel that also tracks deficit endpoints.

    Returns ``(result, B, trace)`` where ``result`` is the chosen state and
    ``B`` the sorted array of deficit nodes accumulated up to that state.
    """
    t0 = time.perf_counter()
    req.validate(graph)
    h_total = req.total
    totals = graph.color_totals()
    if np.any(totals < req.as_array()):
        raise InfeasibleError("requirement exceeds available colored edges")
    if graph.m < h_total:
        raise InfeasibleError(f"graph has {graph.m} edges, {h_total} required")
    tr = degeneracy_peel(graph, min_edges=h_total)
    last = tr.i_max if h_total > 0 else graph.n - 1
    i = best_prefix(tr.remaining_edges, graph.n, last)
    entry = deficit_entry_steps(tr, req.h)
    b = np.flatnonzero((entry >= 0) & (entry <= i))
    res = _timed_result(graph, tr.nodes_at(i), "at_least_h_tracked", t0,
                        info={"state": i, "i_max": tr.i_max, "operations": tr.operations})
    return res, b, tr
