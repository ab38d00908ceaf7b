"""Densest subgraphs of edge-colored graphs under per-color edge requirements."""
from .constrained import col_approx, col_approx_multi, heuristic_peel
from .graph_model import (
    ColoredMultigraph,
    ColorRequirement,
    Density,
    EdgeColoredGraph,
    GraphFormatError,
    InfeasibleError,
    Mode,
    ParseOptions,
    SubgraphResult,
    check_feasibility,
    color_counts,
    density,
    from_edges,
    induced_subgraph,
    parse_edge_list,
    read_edge_list,
    serialize_edge_list,
    to_multigraph,
)
from .ilp import export_ilp, parse_lp, write_ilp_models
from .oracles import (
    CapExceeded,
    brute_force_at_least_h_edges,
    brute_force_colored,
    brute_force_unconstrained,
    exact_dsp_flow,
)
from .peeling import (
    PeelingTrace,
    at_least_h_edges_peel,
    at_least_h_edges_peel_tracked,
    degeneracy_peel,
    greedy_peel_unconstrained,
    lower_bound_nodes,
)

__version__ = "0.1.0"
