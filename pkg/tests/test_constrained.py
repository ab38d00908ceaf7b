import numpy as np
import pytest

from colordsp import (
    ColorRequirement,
    Density,
    InfeasibleError,
    Mode,
    at_least_h_edges_peel,
    at_least_h_edges_peel_tracked,
    brute_force_colored,
    col_approx,
    col_approx_multi,
    from_edges,
    greedy_peel_unconstrained,
    heuristic_peel,
    to_multigraph,
)
from colordsp.bench import adversarial_augment, gnm_colored
from colordsp.constrained import patch_deficits

from conftest import naive_optimum, random_requirement, random_small


def zeros(g):
    return ColorRequirement((0,) * g.num_colors)


@pytest.mark.parametrize("seed", range(10))
def test_zero_requirement_is_greedy(seed):
    g = random_small(seed, n_range=(5, 40))
    greedy = greedy_peel_unconstrained(g)
    assert col_approx(g, zeros(g)).nodes == greedy.nodes
    assert heuristic_peel(g, zeros(g)).nodes == greedy.nodes


def test_col_approx_pendant_example(triangle_plus_edge):
    res = col_approx(triangle_plus_edge, ColorRequirement((1, 1, 1)))
    assert res.size == 5 and res.density == Density(4, 5)
    assert res.color_counts == (2, 1, 1)
    opt = naive_optimum(triangle_plus_edge, lambda ec, cc: all(c >= 1 for c in cc))
    assert res.density.fraction == opt


def test_col_approx_rejects_multicolor_and_infeasible(triangle_plus_edge):
    g = from_edges([("a", "b", ["1", "2"]), ("b", "c", "1")])
    with pytest.raises(ValueError, match="multi"):
        col_approx(g, ColorRequirement((1, 1)))
    with pytest.raises(InfeasibleError):
        col_approx(triangle_plus_edge, ColorRequirement((3, 1, 1)))
    with pytest.raises(ValueError):
        col_approx(triangle_plus_edge, ColorRequirement((1, 1, 1), Mode.AT_MOST))


@pytest.mark.parametrize("refine", ["bset", "patch"])
@pytest.mark.parametrize("seed", range(40))
def test_col_approx_feasible_not_superoptimal(seed, refine):
    g = random_small(seed, n_range=(4, 14), colors_range=(1, 4))
    req = ColorRequirement(random_requirement(g, seed + 7))
    res = col_approx(g, req, refine=refine)
    assert res.satisfies(req)
    assert res.density <= brute_force_colored(g, req).density


def test_col_approx_single_color_matches_at_least_h():
    for seed in range(30):
        g = random_small(seed, n_range=(5, 30), colors_range=(1, 1))
        h = max(1, g.m // 2)
        req = ColorRequirement((h,))
        core, b, _ = at_least_h_edges_peel_tracked(g, req)
        res = col_approx(g, req)
        assert res.edge_count >= h
        if len(np.setdiff1d(b, core.nodes)) == 0:
            assert res.density == at_least_h_edges_peel(g, h).density


def test_col_approx_deterministic():
    g = gnm_colored(200, 600, colors=4, seed=3)
    req = ColorRequirement(tuple(int(t // 2) for t in g.color_totals()))
    assert col_approx(g, req).nodes == col_approx(g, req).nodes


def test_patch_prefers_edges_touching_the_set():
    # set {a,b}; color-2 edges: c-d (id 1, disjoint) and b-e (id 2, touches b)
    g = from_edges([("a", "b", "1"), ("c", "d", "2"), ("b", "e", "2")])
    nodes = patch_deficits(g, g.node_ids(["a", "b"]), ColorRequirement((1, 1)))
    assert sorted(g.node_labels[i] for i in nodes) == ["a", "b", "e"]


def test_multi_matches_single_when_single_colored():
    for seed in range(20):
        g = random_small(seed, n_range=(5, 30), colors_range=(1, 4))
        req = ColorRequirement(random_requirement(g, seed))
        assert col_approx_multi(g, req).nodes == col_approx(g, req).nodes


def test_multi_two_colored_edge():
    g = from_edges([("u", "v", ["1", "2"])])
    res = col_approx_multi(g, ColorRequirement((1, 1)))
    assert res.size == 2 and res.density == Density(2, 2) and res.color_counts == (1, 1)
    assert res.simple_edge_count == 1


@pytest.mark.parametrize("refine", ["bset", "patch"])
@pytest.mark.parametrize("seed", range(30))
def test_multi_feasible_not_superoptimal(seed, refine):
    g = random_small(seed, n_range=(4, 12), colors_range=(2, 4), cpe=3)
    req = ColorRequirement(random_requirement(g, seed + 3))
    res = col_approx_multi(g, req, refine=refine)
    assert res.satisfies(req)
    assert res.density <= brute_force_colored(to_multigraph(g), req).density


@pytest.mark.parametrize("seed", range(30))
def test_heuristic_feasible_not_superoptimal(seed):
    g = random_small(seed, n_range=(4, 14), colors_range=(1, 4), cpe=2)
    req = ColorRequirement(random_requirement(g, seed + 5))
    res = heuristic_peel(g, req)
    assert res.satisfies(req)
    assert res.density <= brute_force_colored(g, req).density


def test_heuristic_stops_on_adversarial_edge():
    g = gnm_colored(60, 120, colors=3, seed=9, planted=15, planted_p=0.8)
    aug = adversarial_augment(g)
    req = ColorRequirement((0, 0, 0, 1))
    heur = heuristic_peel(aug, req)
    adv = aug.node_ids(["adv_a0", "adv_b0"])
    # only low-degree background nodes can go before the two new nodes
    assert set(adv) <= set(heur.nodes)
    assert heur.size >= 0.9 * aug.n
    assert col_approx(aug, req).density > heur.density


def test_heuristic_halts_before_violation():
    # removing the pendant "d" would drop the only color-3 edge
    g = from_edges([("a", "b", "1"), ("b", "c", "1"), ("a", "c", "2"), ("c", "d", "3")])
    res = heuristic_peel(g, ColorRequirement((0, 0, 1)))
    assert res.info["halted_at"] == 0 and res.size == 4
