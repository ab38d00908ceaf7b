"""Export of the fixed-cardinality ILP models in CPLEX LP text format.

For a guessed node count k the model is::

    max   sum_e x_e / k
    s.t.  sum_e x_e >= h                      (edges)
          sum_u y_u  = k                      (card)
          x_uv - y_u <= 0, x_uv - y_v <= 0    (one pair per edge)
          sum_{e in E_c} x_e >= h_c           (one row per constrained color)
          0 <= x_e <= 1, y_u binary

Solving every k in [lower_bound_nodes(h), n] and keeping the best objective
gives the optimum. Nothing here calls a solver.

File layout, byte for byte (``\\n`` line endings)::

    \\ colordsp ilp-export k=<k> h=<h>
    Maximize
     obj: <c> x_a_b + <c> x_a_c ...
    Subject To
     edges: x_a_b + x_a_c ... >= <h>
     card: y_a + y_b ... = <k>
     cu_<i>: x_a_b - y_a <= 0
     cv_<i>: x_a_b - y_b <= 0
     col_<color>: x_... >= <h_c>
    Bounds
     0 <= x_a_b <= 1
    Binaries
     y_a y_b ...
    End

``<c>`` is ``repr(1 / k)``. Label characters outside ``[A-Za-z0-9]`` are
written as ``.<hex codepoint>.`` so names stay unique and solver-safe; edge
variables use the endpoint labels in sorted order.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph_model import ColorRequirement
from .peeling import lower_bound_nodes

__all__ = ["IlpModel", "export_ilp", "write_ilp_models", "parse_lp", "safe_name"]


def safe_name(label: str) -> str:
    return "".join(ch if ch.isascii() and ch.isalnum() else f".{ord(ch):x}." for ch in label)


@dataclass
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str
    rhs: float


@dataclass
class IlpModel:
    k: int
    h: int
    objective: dict[str, float]
    rows: list[Row]
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)

    def to_lp(self) -> str:
        out = [f"\\ colordsp ilp-export k={self.k} h={self.h}", "Maximize"]
        out.append(" obj: " + _expr(self.objective))
        out.append("Subject To")
        for r in self.rows:
            out.append(f" {r.name}: {_expr(r.coeffs)} {r.sense} {_num(r.rhs)}")
        out.append("Bounds")
        for var, (lo, hi) in self.bounds.items():
            out.append(f" {_num(lo)} <= {var} <= {_num(hi)}")
        out.append("Binaries")
        out.append(" " + " ".join(self.binaries))
        out.append("End")
        return "\n".join(out) + "\n"

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _expr(coeffs: dict[str, float]) -> str:
    parts = []
    for i, (var, c) in enumerate(coeffs.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = var if mag == 1 else f"{_num(mag)} {var}"
        if i == 0:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def _requirement(graph, req):
    """Return (h, per-color h or None)."""
    if isinstance(req, ColorRequirement):
        req.validate(graph)
        hv = list(req.h)
        single = graph.is_single_colored() if hasattr(graph, "is_single_colored") else True
        # with multi-colored edges one edge may serve several colors
        h = sum(hv) if single else max(hv, default=0)
        return h, hv
    return int(req), None


def export_ilp(graph, req, k: int) -> IlpModel:
    """Model for node count ``k``; ``req`` is an int ``h`` or a ColorRequirement."""
    h, hv = _requirement(graph, req)
    lo = lower_bound_nodes(h) if h > 0 else 1
    if not lo <= k <= graph.n:
        raise ValueError(f"k={k} outside [{lo}, {graph.n}]")
    labels = [safe_name(lab) for lab in graph.node_labels]
    xs = []
    for e in range(graph.m):
        a, b = labels[graph.u[e]], labels[graph.v[e]]
        pa, pb = graph.node_labels[graph.u[e]], graph.node_labels[graph.v[e]]
        if pb < pa:
            a, b = b, a
        xs.append(f"x_{a}_{b}")
    ys = [f"y_{lab}" for lab in labels]
    coef = 1.0 / k
    rows = [Row("edges", {x: 1.0 for x in xs}, ">=", h),
            Row("card", {y: 1.0 for y in ys}, "=", k)]
    for e, x in enumerate(xs):
        rows.append(Row(f"cu_{e}", {x: 1.0, ys[graph.u[e]]: -1.0}, "<=", 0))
        rows.append(Row(f"cv_{e}", {x: 1.0, ys[graph.v[e]]: -1.0}, "<=", 0))
    if hv is not None:
        for c, hc in enumerate(hv):
            members = [xs[e] for e in range(graph.m) if c in graph.edge_colors(e)]
            rows.append(Row(f"col_{safe_name(graph.color_labels[c])}",
                            {x: 1.0 for x in members}, ">=", hc))
    return IlpModel(k=k, h=h, objective={x: coef for x in xs}, rows=rows,
                    bounds={x: (0.0, 1.0) for x in xs}, binaries=ys)


def write_ilp_models(graph, req, out_dir, instance: str = "instance") -> list[Path]:
    """Write ``<instance>_k<k>.lp`` for every k from the node lower bound to n."""
    h, _ = _requirement(graph, req)
    lo = lower_bound_nodes(h) if h > 0 else 1
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    paths = []
    for k in range(lo, graph.n + 1):
        p = out / f"{instance}_k{k}.lp"
        p.write_text(export_ilp(graph, req, k).to_lp(), encoding="utf-8")
        paths.append(p)
    return paths


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")


def _parse_expr(text: str) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    text = text.strip()
    pos = 0
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt:
            raise ValueError(f"cannot parse expression near {text[pos:]!r}")
        sign = -1.0 if mt.group(1) == "-" else 1.0
        mag = float(mt.group(2)) if mt.group(2) else 1.0
        coeffs[mt.group(3)] = sign * mag
        pos = mt.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return coeffs


def parse_lp(text: str) -> IlpModel:
    """Read back a model written by :meth:`IlpModel.to_lp`."""
    lines = text.splitlines()
    m = re.match(r"\\ colordsp ilp-export k=(\d+) h=(\d+)", lines[0])
    if not m:
        raise ValueError("missing colordsp header")
    k, h = int(m.group(1)), int(m.group(2))
    section = None
    objective: dict[str, float] = {}
    rows: list[Row] = []
    bounds: dict[str, tuple[float, float]] = {}
    binaries: list[str] = []
    for line in lines[1:]:
        s = line.strip()
        if s in ("Maximize", "Subject To", "Bounds", "Binaries", "End"):
            section = s
            continue
        if section == "Maximize":
            objective = _parse_expr(s.split(":", 1)[1])
        elif section == "Subject To":
            name, rest = s.split(":", 1)
            mm = re.match(r"(.*?)\s*(>=|<=|=)\s*(\S+)$", rest.strip())
            rows.append(Row(name.strip(), _parse_expr(mm.group(1)), mm.group(2),
                            float(mm.group(3))))
        elif section == "Bounds":
            mm = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)$", s)
            bounds[mm.group(2)] = (float(mm.group(1)), float(mm.group(3)))
        elif section == "Binaries":
            binaries.extend(s.split())
    return IlpModel(k=k, h=h, objective=objective, rows=rows, bounds=bounds,
                    binaries=binaries)


def evaluate_assignment(model: IlpModel, values: dict[str, float]) -> tuple[bool, float]:
    """Check a variable assignment against every row; returns (feasible, objective)."""
    ok = True
    for r in model.rows:
        lhs = sum(c * values.get(v, 0.0) for v, c in r.coeffs.items())
        if r.sense == ">=":
            ok &= lhs >= r.rhs - 1e-9
        elif r.sense == "<=":
            ok &= lhs <= r.rhs + 1e-9
        else:
            ok &= abs(lhs - r.rhs) <= 1e-9
    obj = float(np.sum([c * values.get(v, 0.0) for v, c in model.objective.items()]))
    return bool(ok), obj
