"""
Writing ILP models
==================

For every node count k from the smallest possible up to n, write one LP file.
Any MILP solver can read them; the best objective over all k is the optimum.
"""

import tempfile
from pathlib import Path

from colordsp import ColorRequirement, parse_edge_list
from colordsp.ilp import write_ilp_models

g = parse_edge_list("a b 1\nb c 1\na c 2\nc d 2\nd e 1\n")
req = ColorRequirement.from_labels(g, {"1": 2, "2": 1})

out = Path(tempfile.mkdtemp())
paths = write_ilp_models(g, req, out, instance="small")
print("wrote", [p.name for p in paths])
print(paths[0].read_text())
