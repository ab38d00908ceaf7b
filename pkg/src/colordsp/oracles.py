"""Exact reference solvers.

``exact_dsp_flow`` solves the unconstrained problem with Goldberg's min-cut
construction and an exact rational binary search. The brute-force solvers
enumerate every node subset with bit masks; they share no code with the
peeling routines so they can serve as independent oracles.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from .graph_model import (
    ColorRequirement,
    InfeasibleError,
    Mode,
    SubgraphResult,
    check_feasibility,
    lcm_upto,
    make_result,
)

__all__ = [
    "CapExceeded",
    "DEFAULT_CAP",
    "FlowNetwork",
    "goldberg_network",
    "exact_dsp_flow",
    "brute_force_at_least_h_edges",
    "brute_force_colored",
    "brute_force_unconstrained",
]

DEFAULT_CAP = 20
_CHUNK_BITS = 16


class CapExceeded(ValueError):
    """Instance too large for subset enumeration."""


@dataclass
class FlowNetwork:
    """Goldberg network for density guess ``guess``, capacities scaled to integers.

    Nodes are ``"s"``, ``"t"`` and the graph node ids. Every capacity was
    multiplied by ``scale`` (the guess's denominator).
    """

    guess: Fraction
    scale: int
    arcs: list[tuple[object, object, int]]

    def to_networkx(self) -> nx.DiGraph:
        d = nx.DiGraph()
        for a, b, cap in self.arcs:
            if d.has_edge(a, b):
                d[a][b]["capacity"] += cap
            else:
                d.add_edge(a, b, capacity=cap)
        return d


def goldberg_network(graph, guess: Fraction) -> FlowNetwork:
    """source->v: m, v->sink: m + 2g - deg(v), one unit each way per edge.

    A cut with source side {s} + S costs m*n + 2|S|(g - d(S)), so some S beats
    density g exactly when the min cut is below m*n.
    """
    g = Fraction(guess)
    q = g.denominator
    p = g.numerator
    m = graph.m
    deg = graph.degrees()
    arcs: list[tuple[object, object, int]] = []
    for x in range(graph.n):
        arcs.append(("s", x, m * q))
        arcs.append((x, "t", m * q + 2 * p - int(deg[x]) * q))
    for e in range(m):
        a, b = int(graph.u[e]), int(graph.v[e])
        arcs.append((a, b, q))
        arcs.append((b, a, q))
    return FlowNetwork(g, q, arcs)


def _denser_set(graph, guess: Fraction):
    """Node set with density > guess, or None if none exists."""
    net = goldberg_network(graph, guess)
    cut, (src, _) = nx.minimum_cut(net.to_networkx(), "s", "t")
    if cut < graph.m * graph.n * net.scale:
        side = sorted(x for x in src if x != "s")
        return side
    return None


def exact_dsp_flow(graph) -> SubgraphResult:
    """Maximum-density subgraph via min cuts and binary search on the density.

    Distinct densities with denominators up to n differ by at least
    1/(n(n-1)), so the search stops once the bracket is narrower than that;
    the last set found above the lower bracket is then optimal. Multigraph
    parallel edges each contribute a unit arc.
    """
    t0 = time.perf_counter()
    n, m = graph.n, graph.m
    if m == 0:
        raise ValueError("graph has no edges")
    lo, hi = Fraction(0), Fraction(int(graph.degrees().max()), 2)
    gap = Fraction(1, max(n * (n - 1), 1))
    best = None
    iterations = 0
    while hi - lo >= gap:
        mid = (lo + hi) / 2
        iterations += 1
        found = _denser_set(graph, mid)
        if found:
            lo, best = mid, found
        else:
            hi = mid
    if best is None:  # pragma: no cover - bracket always catches d* >= 1/2
        raise RuntimeError("flow search failed to find a dense set")
    res = make_result(graph, best, "exact_flow", info={"iterations": iterations})
    res.wall_time = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# subset enumeration


def _popcount(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    while np.any(y):
        out += (y & 1).astype(np.int64)
        y >>= 1
    return out


def _enumerate(graph, admissible, cap, allow_empty=False):
    """Scan all subsets; ``admissible(edge_counts, color_counts)`` filters them.

    Returns the winning bit mask, or None. Order: higher density, then fewer
    nodes, then lexicographically smaller sorted node tuple.
    """
    n = graph.n
    if n > cap:
        raise CapExceeded(f"{n} nodes exceeds enumeration cap {cap}")
    u = graph.u.astype(np.int64)
    v = graph.v.astype(np.int64)
    k = graph.num_colors
    edge_colors = [graph.color_idx[graph.color_ptr[e]:graph.color_ptr[e + 1]]
                   for e in range(graph.m)]
    scale = lcm_upto(max(n, 1))
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    best_key = None
    best_masks: list[int] = []
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        size = _popcount(masks)
        ecount = np.zeros(len(masks), dtype=np.int64)
        ccount = np.zeros((k, len(masks)), dtype=np.int64)
        for e in range(graph.m):
            hit = ((masks >> u[e]) & (masks >> v[e]) & 1).astype(np.int64)
            ecount += hit
            for c in edge_colors[e]:
                ccount[c] += hit
        ok = admissible(ecount, ccount)
        if not allow_empty:
            ok &= size > 0
        if not np.any(ok):
            continue
        safe = np.maximum(size, 1)
        key = ecount * (scale // safe)
        key = np.where(ok, key, -1)
        top = key.max()
        if top < 0:
            continue
        tied = masks[key == top]
        if best_key is None or top > best_key:
            best_key, best_masks = int(top), [int(t) for t in tied]
        elif top == best_key:
            best_masks.extend(int(t) for t in tied)
    if best_key is None:
        return None

    def order(mask):
        nodes = tuple(i for i in range(n) if mask >> i & 1)
        return (len(nodes), nodes)

    return min(best_masks, key=order)


def _edges_in_mask(graph, mask: int) -> int:
    return sum(1 for e in range(graph.m)
               if mask >> int(graph.u[e]) & 1 and mask >> int(graph.v[e]) & 1)


def _mask_nodes(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


def brute_force_unconstrained(graph, cap: int = DEFAULT_CAP) -> SubgraphResult:
    """Densest non-empty subset by exhaustive enumeration."""
    return brute_force_at_least_h_edges(graph, 0, cap=cap)


def brute_force_at_least_h_edges(graph, h: int, cap: int = DEFAULT_CAP) -> SubgraphResult:
    """Densest subset with at least ``h`` induced edges, by enumeration."""
    t0 = time.perf_counter()
    h = int(h)
    if graph.n > cap:
        raise CapExceeded(f"{graph.n} nodes exceeds enumeration cap {cap}")
    if graph.m < h:
        raise InfeasibleError(f"graph has {graph.m} edges, {h} required")
    best = _enumerate(graph, lambda ec, cc: ec >= h, cap)
    res = make_result(graph, _mask_nodes(best, graph.n), "brute_at_least_h")
    res.wall_time = time.perf_counter() - t0
    return res


def brute_force_colored(graph, req: ColorRequirement, cap: int = DEFAULT_CAP) -> SubgraphResult:
    """Densest subset meeting ``req`` (at least / at most / exactly), by enumeration.

    For at-most and exactly requirements the empty set is admissible and is
    returned (density 0) when no qualifying subset has an edge. Works on
    multigraphs, where parallel edges count separately.
    """
    t0 = time.perf_counter()
    req.validate(graph)
    if graph.n > cap:
        raise CapExceeded(f"{graph.n} nodes exceeds enumeration cap {cap}")
    ok, _ = check_feasibility(graph, req)
    if not ok:
        raise InfeasibleError("requirement exceeds available colored edges")
    h = req.as_array()[:, None]
    if req.mode is Mode.AT_LEAST:
        pred = lambda ec, cc: np.all(cc >= h, axis=0)
    elif req.mode is Mode.AT_MOST:
        pred = lambda ec, cc: np.all(cc <= h, axis=0)
    else:
        pred = lambda ec, cc: np.all(cc == h, axis=0)
    best = _enumerate(graph, pred, cap)
    if best is None:
        if req.mode is Mode.AT_LEAST:  # pragma: no cover - feasibility checked above
            raise InfeasibleError("no subset satisfies the requirement")
        raise InfeasibleError("no subset has exactly the requested color counts")
    if req.mode is not Mode.AT_LEAST and _edges_in_mask(graph, best) == 0:
        # edgeless winners all tie at density 0; report the empty set
        best = 0
    res = make_result(graph, _mask_nodes(best, graph.n), f"brute_{req.mode.value}")
    res.wall_time = time.perf_counter() - t0
    return res


def flow_iteration_bound(n: int, m: int) -> int:
    """Upper bound on the number of min-cut calls made by :func:`exact_dsp_flow`."""
    return math.ceil(math.log2(max(n * (n - 1) * m, 2))) + 2
