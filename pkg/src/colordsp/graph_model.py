"""Edge-colored graphs, colored multigraphs and exact density accounting.

Graphs are stored as flat numpy arrays (edge endpoint arrays, a CSR table of
edge colors and a CSR adjacency with edge ids) and are immutable once built.
Node and color labels are interned to dense ids in first-appearance order.
"""
from __future__ import annotations

import enum
import io
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphFormatError",
    "InfeasibleError",
    "Mode",
    "ColorRequirement",
    "Density",
    "SubgraphResult",
    "ParseOptions",
    "EdgeColoredGraph",
    "ColoredMultigraph",
    "from_edges",
    "parse_edge_list",
    "read_edge_list",
    "serialize_edge_list",
    "induced_subgraph",
    "density",
    "color_counts",
    "check_feasibility",
    "to_multigraph",
    "make_result",
]


class GraphFormatError(ValueError):
    """Malformed edge-list input. ``lineno`` is 1-based, or None."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InfeasibleError(ValueError):
    """The graph cannot satisfy the requested edge/color counts."""


class Mode(enum.Enum):
    AT_LEAST = "at_least"
    AT_MOST = "at_most"
    EXACTLY = "exactly"


@dataclass(frozen=True)
class ColorRequirement:
    """Per-color edge counts ``h`` plus the comparison mode.

    Entries equal to zero leave the corresponding color unconstrained.
    """

    h: tuple[int, ...]
    mode: Mode = Mode.AT_LEAST

    def __post_init__(self):
        h = tuple(int(x) for x in self.h)
        if any(x < 0 for x in h):
            raise ValueError("color requirements must be non-negative")
        object.__setattr__(self, "h", h)

    @classmethod
    def from_labels(cls, graph, spec: dict[str, int], mode: Mode = Mode.AT_LEAST):
        """Build a requirement from ``{color_label: count}``; missing colors get 0."""
        h = [0] * graph.num_colors
        for label, count in spec.items():
            try:
                h[graph.color_index[str(label)]] = int(count)
            except KeyError:
                raise KeyError(f"unknown color {label!r}") from None
        return cls(tuple(h), mode)

    @property
    def total(self) -> int:
        return sum(self.h)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.h, dtype=np.int64)

    def validate(self, graph) -> None:
        if len(self.h) != graph.num_colors:
            raise ValueError(
                f"requirement has {len(self.h)} entries but graph has "
                f"{graph.num_colors} colors"
            )


@total_ordering
class Density:
    """Exact edge/node ratio. Ordering uses integer cross-multiplication."""

    __slots__ = ("edges", "nodes")

    def __init__(self, edges: int, nodes: int):
        edges, nodes = int(edges), int(nodes)
        if nodes == 0:
            if edges:
                raise ValueError("non-empty edge set on zero nodes")
            nodes = 1
        self.edges = edges
        self.nodes = nodes

    def __eq__(self, other):
        if not isinstance(other, Density):
            return NotImplemented
        return self.edges * other.nodes == other.edges * self.nodes

    def __lt__(self, other):
        if not isinstance(other, Density):
            return NotImplemented
        return self.edges * other.nodes < other.edges * self.nodes

    def __hash__(self):
        return hash(self.fraction)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.edges, self.nodes)

    @property
    def value(self) -> float:
        return self.edges / self.nodes

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"Density({self.edges}/{self.nodes})"

    def __str__(self):
        return f"{self.edges}/{self.nodes}"


# ---------------------------------------------------------------------------
# graph storage


def _csr_adjacency(n: int, u: np.ndarray, v: np.ndarray):
    m = len(u)
    deg = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=ptr[1:])
    ends = np.concatenate([u, v])
    others = np.concatenate([v, u])
    eids = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
    # stable sort keeps neighbours in edge-id order within each node
    order = np.argsort(ends, kind="stable")
    return ptr, others[order].astype(np.int64), eids[order].astype(np.int64)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


class _ColoredEdgeStore:
    """Array storage shared by simple graphs and multigraphs."""

    is_multigraph = False

    def __init__(self, node_labels, color_labels, u, v, color_ptr, color_idx):
        self.node_labels: tuple[str, ...] = tuple(node_labels)
        self.color_labels: tuple[str, ...] = tuple(color_labels)
        self.n = len(self.node_labels)
        self.num_colors = len(self.color_labels)
        self.u = np.ascontiguousarray(u, dtype=np.int64)
        self.v = np.ascontiguousarray(v, dtype=np.int64)
        self.m = len(self.u)
        self.color_ptr = np.ascontiguousarray(color_ptr, dtype=np.int64)
        self.color_idx = np.ascontiguousarray(color_idx, dtype=np.int64)
        self.adj_ptr, self.adj_nbr, self.adj_eid = _csr_adjacency(self.n, self.u, self.v)
        _freeze(self.u, self.v, self.color_ptr, self.color_idx,
                self.adj_ptr, self.adj_nbr, self.adj_eid)
        self._node_index = None
        self._color_index = None

    @property
    def pi(self) -> int:
        return self.num_colors

    @property
    def node_index(self) -> dict[str, int]:
        if self._node_index is None:
            self._node_index = {lab: i for i, lab in enumerate(self.node_labels)}
        return self._node_index

    @property
    def color_index(self) -> dict[str, int]:
        if self._color_index is None:
            self._color_index = {lab: i for i, lab in enumerate(self.color_labels)}
        return self._color_index

    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_ptr)

    def edge_colors(self, e: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.color_idx[self.color_ptr[e]:self.color_ptr[e + 1]])

    def colors_per_edge(self) -> np.ndarray:
        return np.diff(self.color_ptr)

    def neighbors(self, x: int) -> np.ndarray:
        return self.adj_nbr[self.adj_ptr[x]:self.adj_ptr[x + 1]]

    def node_ids(self, labels: Iterable[str]) -> list[int]:
        return [self.node_index[str(lab)] for lab in labels]

    def color_totals(self) -> np.ndarray:
        return np.bincount(self.color_idx, minlength=self.num_colors).astype(np.int64)

    def __len__(self):
        return self.n


class EdgeColoredGraph(_ColoredEdgeStore):
    """Simple undirected graph whose edges carry non-empty sets of colors.

    Use :func:`from_edges` or :func:`parse_edge_list` rather than calling the
    constructor directly; the constructor expects already-interned arrays and
    validates them.
    """

    def __init__(self, node_labels, color_labels, u, v, color_ptr, color_idx,
                 validate=True):
        super().__init__(node_labels, color_labels, u, v, color_ptr, color_idx)
        if validate:
            self._validate()

    def _validate(self):
        n, u, v = self.n, self.u, self.v
        if self.m:
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            keys = lo * n + hi
            if len(np.unique(keys)) != self.m:
                raise ValueError("duplicate node pair in simple graph")
        if len(self.color_ptr) != self.m + 1:
            raise ValueError("color table does not match edge count")
        if np.any(np.diff(self.color_ptr) <= 0):
            raise ValueError("every edge needs at least one color")
        if len(self.color_idx) and (self.color_idx.min() < 0
                                    or self.color_idx.max() >= self.num_colors):
            raise ValueError("color id out of range")

    def is_single_colored(self) -> bool:
        return bool(np.all(np.diff(self.color_ptr) == 1))

    def edges(self):
        """Yield ``(u, v, colors)`` with dense ids."""
        for e in range(self.m):
            yield int(self.u[e]), int(self.v[e]), self.edge_colors(e)

    def __repr__(self):
        return f"EdgeColoredGraph(n={self.n}, m={self.m}, colors={self.num_colors})"


class ColoredMultigraph(_ColoredEdgeStore):
    """Multigraph in which every edge has exactly one color.

    ``parent`` maps each multigraph edge to the simple-graph edge it came
    from; parallel edges between a node pair share a parent.
    """

    is_multigraph = True

    def __init__(self, node_labels, color_labels, u, v, colors, parent=None):
        colors = np.ascontiguousarray(colors, dtype=np.int64)
        super().__init__(node_labels, color_labels, u, v,
                         np.arange(len(colors) + 1, dtype=np.int64), colors)
        self.color = self.color_idx
        if parent is None:
            parent = _pair_groups(self.n, self.u, self.v)
        self.parent = np.ascontiguousarray(parent, dtype=np.int64)
        _freeze(self.parent)
        self._validate()

    def _validate(self):
        if self.m == 0:
            return
        if np.any(self.u == self.v):
            raise ValueError("self-loops are not allowed")
        lo, hi = np.minimum(self.u, self.v), np.maximum(self.u, self.v)
        keys = (lo * self.n + hi) * max(self.num_colors, 1) + self.color
        if len(np.unique(keys)) != self.m:
            raise ValueError("parallel edges between a pair must have distinct colors")

    @property
    def max_multiplicity(self) -> int:
        """Largest number of parallel edges between one pair (p >= 1)."""
        if self.m == 0:
            return 1
        return int(np.bincount(self.parent).max())

    def __repr__(self):
        return f"ColoredMultigraph(n={self.n}, m={self.m}, colors={self.num_colors})"


def _pair_groups(n, u, v):
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    _, inverse = np.unique(lo * n + hi, return_inverse=True)
    return inverse.ravel()


# ---------------------------------------------------------------------------
# construction and I/O


def from_edges(edges: Iterable[tuple], node_labels: Sequence[str] | None = None,
               color_labels: Sequence[str] | None = None) -> EdgeColoredGraph:
    """Build a graph from ``(u, v, colors)`` triples of labels.

    ``colors`` may be a single token or an iterable of tokens. Repeated node
    pairs are merged by taking the union of their colors. ``node_labels`` and
    ``color_labels`` pre-seed the interning order (isolated nodes included).
    """
    nodes: dict[str, int] = {}
    cols: dict[str, int] = {}
    for lab in node_labels or ():
        nodes.setdefault(str(lab), len(nodes))
    for lab in color_labels or ():
        cols.setdefault(str(lab), len(cols))
    pair_colors: dict[tuple[int, int], set[int]] = {}
    for a, b, cs in edges:
        a, b = str(a), str(b)
        if a == b:
            raise ValueError(f"self-loop on node {a!r}")
        ia = nodes.setdefault(a, len(nodes))
        ib = nodes.setdefault(b, len(nodes))
        if isinstance(cs, (str, int)):
            cs = (cs,)
        cids = {cols.setdefault(str(c), len(cols)) for c in cs}
        if not cids:
            raise ValueError(f"edge {a!r}-{b!r} has no colors")
        key = (ia, ib) if ia < ib else (ib, ia)
        pair_colors.setdefault(key, set()).update(cids)
    return _build(list(nodes), list(cols), pair_colors)


def _build(node_labels, color_labels, pair_colors) -> EdgeColoredGraph:
    m = len(pair_colors)
    u = np.empty(m, dtype=np.int64)
    v = np.empty(m, dtype=np.int64)
    ptr = np.zeros(m + 1, dtype=np.int64)
    idx = []
    for e, ((a, b), cs) in enumerate(pair_colors.items()):
        u[e], v[e] = a, b
        idx.extend(sorted(cs))
        ptr[e + 1] = len(idx)
    return EdgeColoredGraph(node_labels, color_labels, u, v, ptr,
                            np.asarray(idx, dtype=np.int64), validate=False)


@dataclass
class ParseOptions:
    """Knobs for :func:`parse_edge_list`.

    ``columns`` names the role of every field on a line: ``u``, ``v``,
    ``colors`` (alias ``layer``) exactly once each, plus any number of
    ``ignore`` (alias ``weight``) fields. ``("layer", "u", "v", "weight")``
    reads the common multiplex layout. ``delimiter=None`` splits on runs of
    whitespace.
    """

    delimiter: str | None = None
    color_separator: str = ","
    comment: str = "#"
    columns: tuple[str, ...] = ("u", "v", "colors")
    skip_self_loops: bool = False


_COLUMN_ALIASES = {"u": "u", "v": "v", "colors": "colors", "color": "colors",
                   "layer": "colors", "ignore": "ignore", "weight": "ignore"}


def parse_edge_list(text, options: ParseOptions | None = None) -> EdgeColoredGraph:
    """Parse the canonical ``<u> <v> <c1>[,<c2>...]`` edge-list format.

    ``text`` is a string or a text stream. Blank lines and lines starting with
    the comment marker are skipped. Raises :class:`GraphFormatError` with the
    offending line number for malformed or self-loop lines, and for input
    without any edge.
    """
    opts = options or ParseOptions()
    try:
        roles = [_COLUMN_ALIASES[c] for c in opts.columns]
    except KeyError as exc:
        raise ValueError(f"unknown column role {exc.args[0]!r}") from None
    if sorted(r for r in roles if r != "ignore") != ["colors", "u", "v"]:
        raise ValueError("columns must name u, v and colors exactly once")
    iu, iv, ic = roles.index("u"), roles.index("v"), roles.index("colors")
    width = len(roles)
    stream = io.StringIO(text) if isinstance(text, str) else text

    nodes: dict[str, int] = {}
    cols: dict[str, int] = {}
    pair_colors: dict[tuple[int, int], set[int]] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith(opts.comment):
            continue
        if opts.delimiter is None:
            fields = line.split()
        else:
            fields = [f.strip() for f in line.split(opts.delimiter)]
        if len(fields) != width or not all(fields):
            raise GraphFormatError(f"expected {width} fields, got {len(fields)}: {line!r}",
                                   lineno)
        a, b, cfield = fields[iu], fields[iv], fields[ic]
        if a == b:
            if opts.skip_self_loops:
                continue
            raise GraphFormatError(f"self-loop on node {a!r}", lineno)
        tokens = cfield.split(opts.color_separator)
        if any(not t for t in tokens):
            raise GraphFormatError(f"empty color token in {cfield!r}", lineno)
        ia = nodes.setdefault(a, len(nodes))
        ib = nodes.setdefault(b, len(nodes))
        key = (ia, ib) if ia < ib else (ib, ia)
        bucket = pair_colors.setdefault(key, set())
        for t in tokens:
            bucket.add(cols.setdefault(t, len(cols)))
    if not pair_colors:
        raise GraphFormatError("input contains no edges")
    return _build(list(nodes), list(cols), pair_colors)


def read_edge_list(path, options: ParseOptions | None = None) -> EdgeColoredGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, options)


def _color_sort_key(token: str):
    # numeric tokens sort numerically, everything else lexicographically after them
    return (0, int(token), token) if re.fullmatch(r"-?\d+", token) else (1, 0, token)


def serialize_edge_list(graph: EdgeColoredGraph) -> str:
    """Render ``graph`` in the canonical format (labels, sorted color tokens).

    Isolated nodes have no representation in the format and are dropped.
    """
    out = []
    nl, cl = graph.node_labels, graph.color_labels
    for e in range(graph.m):
        toks = sorted((cl[c] for c in graph.edge_colors(e)), key=_color_sort_key)
        out.append(f"{nl[graph.u[e]]} {nl[graph.v[e]]} {','.join(toks)}\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# subsets


def _mask(graph, nodes) -> np.ndarray:
    idx = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes,
                     dtype=np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= graph.n):
        raise IndexError("node index out of range")
    mask = np.zeros(graph.n, dtype=bool)
    mask[idx] = True
    return mask


def _inside_edges(graph, mask) -> np.ndarray:
    return mask[graph.u] & mask[graph.v]


def induced_subgraph(graph: EdgeColoredGraph, nodes) -> EdgeColoredGraph:
    """Subgraph induced by ``nodes``; labels and color palette are kept.

    Nodes are renumbered in increasing order of their original index.
    """
    mask = _mask(graph, nodes)
    keep = np.flatnonzero(mask)
    remap = np.full(graph.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    inside = np.flatnonzero(_inside_edges(graph, mask))
    counts = graph.color_ptr[inside + 1] - graph.color_ptr[inside]
    ptr = np.zeros(len(inside) + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    idx = (np.concatenate([graph.color_idx[graph.color_ptr[e]:graph.color_ptr[e + 1]]
                           for e in inside])
           if len(inside) else np.zeros(0, dtype=np.int64))
    return EdgeColoredGraph([graph.node_labels[i] for i in keep], graph.color_labels,
                            remap[graph.u[inside]], remap[graph.v[inside]], ptr, idx,
                            validate=False)


def density(graph, nodes) -> Density:
    """Exact density ``|E(S)| / |S|``; the empty set has density 0/1.

    On a multigraph parallel edges are counted separately.
    """
    mask = _mask(graph, nodes)
    return Density(int(_inside_edges(graph, mask).sum()), int(mask.sum()))


def _color_counts_mask(graph, mask) -> np.ndarray:
    inside = _inside_edges(graph, mask)
    per_slot = np.repeat(inside, np.diff(graph.color_ptr))
    return np.bincount(graph.color_idx[per_slot], minlength=graph.num_colors).astype(np.int64)


def color_counts(graph, nodes) -> np.ndarray:
    """Number of induced edges carrying each color (multi-colored edges count once per color)."""
    return _color_counts_mask(graph, _mask(graph, nodes))


def check_feasibility(graph, req: ColorRequirement) -> tuple[bool, np.ndarray]:
    """Whether any subgraph can meet ``req``; returns ``(ok, slack)``.

    ``slack`` is ``color_totals - h``. For at-most requirements the empty
    subgraph always qualifies.
    """
    req.validate(graph)
    slack = graph.color_totals() - req.as_array()
    if req.mode is Mode.AT_MOST:
        return True, slack
    return bool(np.all(slack >= 0)), slack


def to_multigraph(graph: EdgeColoredGraph) -> ColoredMultigraph:
    """Replace every k-colored edge by k parallel single-colored edges."""
    reps = np.diff(graph.color_ptr)
    parent = np.repeat(np.arange(graph.m, dtype=np.int64), reps)
    return ColoredMultigraph(graph.node_labels, graph.color_labels,
                             graph.u[parent], graph.v[parent], graph.color_idx.copy(),
                             parent=parent)


# ---------------------------------------------------------------------------
# results


@dataclass
class SubgraphResult:
    nodes: tuple[int, ...]
    edge_count: int
    density: Density
    color_counts: tuple[int, ...]
    node_labels: tuple[str, ...] = ()
    algorithm: str = ""
    wall_time: float | None = None
    simple_edge_count: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def satisfies(self, req: ColorRequirement) -> bool:
        counts = np.asarray(self.color_counts, dtype=np.int64)
        h = req.as_array()
        if req.mode is Mode.AT_LEAST:
            return bool(np.all(counts >= h))
        if req.mode is Mode.AT_MOST:
            return bool(np.all(counts <= h))
        return bool(np.all(counts == h))

    def to_dict(self, color_labels: Sequence[str] | None = None) -> dict:
        if color_labels is None:
            colors = list(self.color_counts)
        else:
            colors = {str(color_labels[i]): int(c) for i, c in enumerate(self.color_counts)}
        out = {
            "algorithm": self.algorithm,
            "nodes": list(self.node_labels) if self.node_labels else list(self.nodes),
            "node_count": self.size,
            "edge_count": self.edge_count,
            "density": {"fraction": str(self.density), "decimal": round(self.density.value, 6)},
            "color_counts": colors,
            "wall_time": self.wall_time,
        }
        if self.simple_edge_count is not None:
            out["simple_edge_count"] = self.simple_edge_count
        if self.info:
            out["info"] = self.info
        return out


def make_result(graph, nodes, algorithm: str = "", **kw) -> SubgraphResult:
    """Recount edges and colors of ``nodes`` in ``graph`` and wrap them."""
    mask = _mask(graph, nodes)
    inside = _inside_edges(graph, mask)
    e = int(inside.sum())
    idx = tuple(int(i) for i in np.flatnonzero(mask))
    simple = None
    if graph.is_multigraph:
        simple = int(len(np.unique(graph.parent[inside])))
    return SubgraphResult(
        nodes=idx,
        edge_count=e,
        density=Density(e, len(idx)),
        color_counts=tuple(int(c) for c in _color_counts_mask(graph, mask)),
        node_labels=tuple(graph.node_labels[i] for i in idx),
        algorithm=algorithm,
        simple_edge_count=simple,
        **kw,
    )


def lcm_upto(n: int) -> int:
    """Least common multiple of 1..n (used for exact integer density keys)."""
    out = 1
    for k in range(2, n + 1):
        out = out * k // math.gcd(out, k)
    return out
