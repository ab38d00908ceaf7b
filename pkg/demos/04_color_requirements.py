"""
Color requirements: ColApprox and the halting heuristic
=======================================================

Each color c must appear on at least h_c edges of the answer. ColApprox
peels for the total and then adds back the nodes of the last edges of each
short color. The heuristic instead refuses to peel past a violation. A
single far-away edge of a new required color is enough to stop it at once.
"""

from itertools import combinations

from colordsp import (
    ColorRequirement,
    brute_force_colored,
    col_approx,
    from_edges,
    heuristic_peel,
)
from colordsp.bench import adversarial_augment, gnm_colored, requirement_ladder

# a red 5-clique next to a ring whose edges alternate blue and green
edges = [(f"k{a}", f"k{b}", "red") for a, b in combinations(range(5), 2)]
ring = [f"r{i}" for i in range(8)]
edges += [(ring[i], ring[(i + 1) % 8], "blue" if i % 2 else "green") for i in range(8)]
edges += [("k0", "r0", "blue"), ("k1", "r4", "green"), ("r2", "r6", "red")]
g = from_edges(edges)

# rungs of growing requirements, each checked against exhaustive search
for i, req in enumerate(requirement_ladder(g, steps=5), start=1):
    opt = brute_force_colored(g, req).density
    ca = col_approx(g, req).density
    he = heuristic_peel(g, req).density
    print(f"rung {i} h={req.h}: optimum {opt}  colapprox {ca}  heuristic {he}")

# two new nodes and one edge of a new color, which is required
big = gnm_colored(150, 300, colors=3, seed=5, planted=30, planted_p=0.7)
aug = adversarial_augment(big)
req = ColorRequirement((0, 0, 0, 1))
ca = col_approx(aug, req)
he = heuristic_peel(aug, req)
print(f"augmented: colapprox {ca.density.value:.3f} on {ca.size} nodes, "
      f"heuristic {he.density.value:.3f} on {he.size} of {aug.n} nodes")
