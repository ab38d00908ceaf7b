"""
Edge-colored graphs
===================

Build a small graph from an edge list, look at its colors and densities,
and expand multi-colored edges into parallel ones.
"""

from colordsp import color_counts, density, parse_edge_list, to_multigraph

# one edge per line: two endpoints and a comma separated color list
text = """
# a triangle, a bridge and a two-colored edge
a b red
b c red
a c blue
c d green
d e red,blue
"""
g = parse_edge_list(text)
print(g)
print("colors:", g.color_labels, "totals:", g.color_totals())

# densities are exact fractions, edges / nodes
tri = g.node_ids(["a", "b", "c"])
print("d(abc) =", density(g, tri), "colors in abc:", color_counts(g, tri))

# in the multigraph each color of an edge becomes its own parallel edge
mg = to_multigraph(g)
print("multigraph edges:", mg.m, "max multiplicity:", mg.max_multiplicity)
print("d(de) simple vs multi:", density(g, g.node_ids(["d", "e"])),
      density(mg, g.node_ids(["d", "e"])))
