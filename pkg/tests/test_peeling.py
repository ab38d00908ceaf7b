import json
from fractions import Fraction

import numpy as np
import pytest

from colordsp import (
    ColorRequirement,
    Density,
    InfeasibleError,
    at_least_h_edges_peel,
    at_least_h_edges_peel_tracked,
    brute_force_at_least_h_edges,
    degeneracy_peel,
    exact_dsp_flow,
    from_edges,
    greedy_peel_unconstrained,
    lower_bound_nodes,
    to_multigraph,
)
from colordsp.bench import gnm_colored
from colordsp.peeling import best_prefix, deficit_entry_steps

from conftest import naive_optimum, random_requirement, random_small


def smallest_k(h, p):
    k = 1
    while p * k * (k - 1) // 2 < h:
        k += 1
    return k


@pytest.mark.parametrize("h,p,k", [(1, 1, 2), (6, 1, 4), (2, 2, 2), (10, 1, 5), (7, 1, 5),
                                   (3, 1, 3), (4, 1, 4)])
def test_lower_bound_examples(h, p, k):
    assert lower_bound_nodes(h, p) == k


def test_lower_bound_matches_search():
    for h in range(1, 301):
        for p in range(1, 8):
            assert lower_bound_nodes(h, p) == smallest_k(h, p)


def test_lower_bound_large_perfect_squares():
    for k in (10**3, 10**5, 10**7):
        h = k * (k - 1) // 2
        assert lower_bound_nodes(h) == k
        assert lower_bound_nodes(h + 1) == k + 1


@pytest.mark.parametrize("h,p", [(0, 1), (1, 0), (-1, 1)])
def test_lower_bound_rejects(h, p):
    with pytest.raises(ValueError):
        lower_bound_nodes(h, p)


def prefix_densities(tr):
    return [Density(int(e), int(n)) for e, n in zip(tr.remaining_edges, tr.remaining_nodes)]


def test_peel_path(path3):
    tr = degeneracy_peel(path3)
    assert tr.removal_order[0] == 0  # a and c tie at degree 1; lower index first
    assert prefix_densities(tr) == [Density(2, 3), Density(1, 2), Density(0, 1), Density(0, 0)]


def test_peel_k4():
    pairs = [(a, b) for i, a in enumerate("abcd") for b in "abcd"[i + 1:]]
    tr = degeneracy_peel(from_edges([(a, b, 1) for a, b in pairs]))
    assert [d.fraction for d in prefix_densities(tr)] == [
        Fraction(6, 4), Fraction(1), Fraction(1, 2), Fraction(0), Fraction(0)]


def _check_min_degree_order(g, tr):
    alive = np.ones(g.n, dtype=bool)
    for x in tr.removal_order:
        deg = np.zeros(g.n, dtype=int)
        both = alive[g.u] & alive[g.v]
        np.add.at(deg, g.u[both], 1)
        np.add.at(deg, g.v[both], 1)
        assert deg[x] == deg[alive].min()
        alive[x] = False


@pytest.mark.parametrize("seed", range(25))
def test_peel_removes_min_degree(seed):
    g = random_small(seed, n_range=(5, 30), dens=(0.5, 3.0))
    _check_min_degree_order(g, degeneracy_peel(g))


@pytest.mark.parametrize("seed", range(15))
def test_multigraph_peel_counts_parallel_edges(seed):
    g = random_small(seed, n_range=(5, 25), colors_range=(2, 4), cpe=3)
    mg = to_multigraph(g)
    tr = degeneracy_peel(mg)
    _check_min_degree_order(mg, tr)
    assert tr.remaining_edges[0] == mg.m and tr.remaining_edges[-1] == 0


def test_trace_invariants():
    g = gnm_colored(300, 900, colors=3, seed=5)
    tr = degeneracy_peel(g, min_edges=400)
    rem = tr.remaining_edges
    assert np.all(np.diff(rem) <= 0)
    assert np.all(rem[:tr.i_max + 1] >= 400)
    if tr.i_max + 1 < len(rem):
        assert rem[tr.i_max + 1] < 400
    rc = tr.remaining_colors()
    assert np.array_equal(rc.sum(axis=1), rem)  # single-colored: colors sum to edges
    rows = json.loads(tr.to_json())
    assert rows[0]["remaining_edges"] == g.m and rows[1]["removed"] is not None


@pytest.mark.parametrize("n", [10**3, 10**4, 10**5])
def test_operation_count_linear(n):
    g = gnm_colored(n, 3 * n, colors=2, seed=n)
    tr = degeneracy_peel(g)
    assert tr.operations <= 4 * (g.n + g.m)


def test_greedy_examples(k4_pendant):
    res = greedy_peel_unconstrained(k4_pendant)
    assert res.node_labels == ("a", "b", "c", "d") and res.density == Density(3, 2)
    single = greedy_peel_unconstrained(from_edges([("x", "y", 1)]))
    assert res.size == 4 and single.density == Density(1, 2) and single.size == 2


@pytest.mark.parametrize("seed", range(20))
def test_greedy_half_of_flow(seed):
    g = gnm_colored(50, 150, seed=seed)
    assert 2 * greedy_peel_unconstrained(g).density.fraction >= exact_dsp_flow(g).density.fraction


def test_at_least_h_examples(path3, k4_pendant):
    res = at_least_h_edges_peel(path3, 2)
    assert res.size == 3 and res.density == Density(2, 3)
    res = at_least_h_edges_peel(k4_pendant, 1)
    assert res.node_labels == ("a", "b", "c", "d")
    with pytest.raises(InfeasibleError):
        at_least_h_edges_peel(path3, 3)


@pytest.mark.parametrize("seed", range(40))
def test_at_least_h_feasible_and_not_superoptimal(seed):
    g = random_small(seed, n_range=(4, 14))
    for h in sorted({1, g.m // 3, g.m // 2, g.m}):
        if h < 1:
            continue
        res = at_least_h_edges_peel(g, h)
        assert res.edge_count >= h
        opt = naive_optimum(g, lambda ec, cc: ec >= h) if g.n <= 9 else \
            brute_force_at_least_h_edges(g, h).density.fraction
        assert res.density.fraction <= opt


@pytest.mark.parametrize("seed", range(10))
def test_oracle_optimum_non_increasing_in_h(seed):
    g = random_small(seed, n_range=(5, 11))
    opts = [brute_force_at_least_h_edges(g, h).density for h in range(1, g.m + 1)]
    assert all(a >= b for a, b in zip(opts, opts[1:]))


def test_best_prefix_prefers_smaller_set():
    # states 0 and 2 tie at density 1
    rem = np.array([4, 2, 2, 0])
    assert best_prefix(rem, 4, 2) == 2


def test_tracked_b_empty_when_core_suffices(k4_pendant):
    req = ColorRequirement((1,))
    res, b, _ = at_least_h_edges_peel_tracked(k4_pendant, req)
    assert res.size == 4 and len(np.intersect1d(b, res.nodes)) == 0


def test_tracked_pendant_color(triangle_plus_edge):
    g = triangle_plus_edge
    res, b, _ = at_least_h_edges_peel_tracked(g, ColorRequirement((1, 1, 1)))
    assert set(g.node_ids(["d", "e"])) <= set(b.tolist())


@pytest.mark.parametrize("seed", range(30))
def test_deficit_set_bound(seed):
    g = random_small(seed, n_range=(6, 40), colors_range=(1, 5))
    h = np.array(random_requirement(g, seed + 1000))
    tr = degeneracy_peel(g)
    entry = deficit_entry_steps(tr, h)
    rc = tr.remaining_colors()
    prev = set()
    for i in range(tr.steps + 1):
        b = set(np.flatnonzero((entry >= 0) & (entry <= i)).tolist())
        assert prev <= b
        short = int(np.maximum(h - rc[i], 0).sum())
        assert len(b) <= 2 * short
        prev = b


def test_deficit_edges_recomputed_directly():
    """Walk the removal sequence one edge at a time and compare."""
    g = gnm_colored(40, 90, colors=3, seed=11)
    h = np.array([5, 10, 20])
    tr = degeneracy_peel(g)
    rem = g.color_totals().copy()
    expect = np.full(g.n, -1)
    for e in tr.edge_sequence:
        c = g.edge_colors(int(e))[0]
        rem[c] -= 1
        if rem[c] < h[c]:
            for x in (int(g.u[e]), int(g.v[e])):
                if expect[x] < 0:
                    expect[x] = tr.edge_step[e]
    assert np.array_equal(deficit_entry_steps(tr, h), expect)
