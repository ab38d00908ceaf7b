"""
Asking for at least h edges
===========================

The densest subgraph of a graph may be small. Requiring at least h edges
forces a larger answer; the sweep below raises h from the edge count of the
densest subgraph up to the whole graph and compares with exhaustive search.
"""

from colordsp.bench import gnm_colored, records_to_csv, sweep_h

g = gnm_colored(14, 30, seed=3, planted=6, planted_p=0.9)
rows = sweep_h(g, steps=8, oracle=True, repeats=1, instance="demo")
print(records_to_csv(rows))

worst = max(r.rel_error for r in rows)
print(f"largest relative error against the exhaustive optimum: {float(worst) * 100:.2f}%")
