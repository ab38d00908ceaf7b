"""Experiment harness: synthetic instances, requirement generators, runs and summaries.

Randomness always goes through ``numpy.random.Generator(PCG64(seed))``;
PCG64 output is identical across platforms for a given seed, so the
generated instances and any CSV written from them are reproducible.
"""
from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .constrained import col_approx, col_approx_multi, heuristic_peel
from .graph_model import (
    ColorRequirement,
    EdgeColoredGraph,
    InfeasibleError,
    Mode,
    ParseOptions,
    SubgraphResult,
    color_counts,
    read_edge_list,
    to_multigraph,
)
from .oracles import (
    DEFAULT_CAP,
    CapExceeded,
    brute_force_at_least_h_edges,
    brute_force_colored,
    exact_dsp_flow,
)
from .peeling import at_least_h_edges_peel, greedy_peel_unconstrained

__all__ = [
    "CSV_SCHEMA",
    "FLOW_LIMIT",
    "DEFAULT_REPEATS",
    "rng",
    "gnm_colored",
    "load_dataset",
    "unconstrained_reference",
    "random_color_instances",
    "requirement_ladder",
    "color_distribution",
    "adversarial_augment",
    "sweep_h",
    "RunRecord",
    "InstanceSpec",
    "evaluate",
    "summarize",
    "records_to_csv",
    "run_bench_spec",
]

CSV_SCHEMA = "colordsp-runs/1"
FLOW_LIMIT = 5000
DEFAULT_REPEATS = 10

DATASET_FORMATS = {
    "canonical": ParseOptions(),
    "multiplex": ParseOptions(columns=("layer", "u", "v", "weight"), skip_self_loops=True),
    "csv": ParseOptions(delimiter=",", skip_self_loops=True),
}


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def load_dataset(path, fmt: str = "canonical") -> EdgeColoredGraph:
    """Load a dataset file; ``fmt`` is one of ``canonical``, ``multiplex``, ``csv``."""
    return read_edge_list(path, DATASET_FORMATS[fmt])


# ---------------------------------------------------------------------------
# synthetic graphs


def _sample_pairs(gen, n, m):
    max_pairs = n * (n - 1) // 2
    if m > max_pairs:
        raise ValueError(f"G({n}, {m}) impossible: at most {max_pairs} edges")
    if m > max_pairs // 3:
        codes = np.sort(gen.choice(max_pairs, size=m, replace=False))
        iu, iv = np.triu_indices(n, k=1)
        return iu[codes].astype(np.int64), iv[codes].astype(np.int64)
    keys = np.zeros(0, dtype=np.int64)
    while len(keys) < m:
        need = int((m - len(keys)) * 1.1) + 16
        a = gen.integers(0, n, size=need)
        b = gen.integers(0, n, size=need)
        ok = a != b
        lo, hi = np.minimum(a[ok], b[ok]), np.maximum(a[ok], b[ok])
        keys = np.concatenate([keys, lo * n + hi])
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
    keys = keys[:m]
    return keys // n, keys % n


def gnm_colored(n: int, m: int, colors: int = 1, colors_per_edge: int = 1, seed=0,
                planted: int = 0, planted_p: float = 0.5) -> EdgeColoredGraph:
    """Erdos-Renyi G(n, m) with uniformly random colors.

    Each edge gets between 1 and ``colors_per_edge`` distinct colors (count
    uniform). ``planted > 0`` additionally wires a random node set of that
    size as G(planted, planted_p) on top of the m random edges.
    """
    gen = rng(seed)
    u, v = _sample_pairs(gen, n, m)
    if planted:
        members = np.sort(gen.choice(n, size=planted, replace=False))
        iu, iv = np.triu_indices(planted, k=1)
        keep = gen.random(len(iu)) < planted_p
        pu, pv = members[iu[keep]], members[iv[keep]]
        keys = np.concatenate([np.minimum(u, v) * n + np.maximum(u, v), pu * n + pv])
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
        u, v = keys // n, keys % n
    m = len(u)
    k = max(1, min(colors_per_edge, colors))
    if k == 1:
        ptr = np.arange(m + 1, dtype=np.int64)
        idx = gen.integers(0, colors, size=m)
    else:
        counts = gen.integers(1, k + 1, size=m)
        ranks = np.argsort(gen.random((m, colors)), axis=1)
        take = np.arange(colors)[None, :] < counts[:, None]
        rows = [np.sort(ranks[e][take[e]]) for e in range(m)]
        ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        idx = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    return EdgeColoredGraph([str(i) for i in range(n)], [str(c) for c in range(colors)],
                            u, v, ptr, idx)


# ---------------------------------------------------------------------------
# requirement generators


def unconstrained_reference(graph, flow_limit: int = FLOW_LIMIT):
    """Unconstrained densest subgraph used as the baseline ``f``; returns (result, provenance)."""
    if graph.n <= flow_limit:
        return exact_dsp_flow(graph), "exact"
    return greedy_peel_unconstrained(graph), "greedy"


def random_color_instances(graph, count: int, seed=0, f=None):
    """Random requirements with h_c uniform in [f_c, g_c]; returns ``[(req, lambda), ...]``.

    ``f`` defaults to the colors of the unconstrained densest subgraph and
    ``g`` is the per-color total. lambda = sum(h) / sum(g - f).
    """
    g = graph.color_totals()
    if f is None:
        ref, _ = unconstrained_reference(graph)
        f = np.asarray(ref.color_counts, dtype=np.int64)
    f = np.asarray(f, dtype=np.int64)
    spread = int(np.sum(g - f))
    if spread <= 0:
        raise ValueError("degenerate interval: g_c == f_c for every color")
    if count <= 0:
        return []
    gen = rng(seed)
    out = []
    for _ in range(count):
        h = gen.integers(f, g + 1)
        out.append((ColorRequirement(tuple(int(x) for x in h)), Fraction(int(h.sum()), spread)))
    return out


def requirement_ladder(graph, steps: int = 10, f=None) -> list[ColorRequirement]:
    """Rungs h^i_c = floor(i * (t_c - f_c) / steps) for i = 1..steps."""
    t = graph.color_totals()
    if f is None:
        ref, _ = unconstrained_reference(graph)
        f = ref.color_counts
    rest = np.maximum(t - np.asarray(f, dtype=np.int64), 0)
    return [ColorRequirement(tuple(int(x) for x in (i * rest) // steps))
            for i in range(1, steps + 1)]


def color_distribution(graph, nodes=None) -> np.ndarray:
    """Fraction of color memberships per color, over the whole graph or ``nodes``."""
    counts = graph.color_totals() if nodes is None else color_counts(graph, nodes)
    total = counts.sum()
    return counts / total if total else counts.astype(float)


def _fresh_label(taken: Sequence[str], stem: str) -> str:
    seen = set(taken)
    k = 0
    while f"{stem}{k}" in seen:
        k += 1
    return f"{stem}{k}"


def adversarial_augment(graph: EdgeColoredGraph) -> EdgeColoredGraph:
    """Append two fresh nodes joined by one edge of a brand-new color."""
    a = _fresh_label(graph.node_labels, "adv_a")
    b = _fresh_label(graph.node_labels, "adv_b")
    c = _fresh_label(graph.color_labels, "adv_c")
    n, k = graph.n, graph.num_colors
    u = np.append(graph.u, n)
    v = np.append(graph.v, n + 1)
    ptr = np.append(graph.color_ptr, graph.color_ptr[-1] + 1)
    idx = np.append(graph.color_idx, k)
    return EdgeColoredGraph(graph.node_labels + (a, b), graph.color_labels + (c,),
                            u, v, ptr, idx, validate=False)


# ---------------------------------------------------------------------------
# records


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    nodes: int
    edges: int
    density: Fraction
    feasible: bool
    param: str = ""
    optimum: Fraction | None = None
    time_mean: float | None = None
    time_std: float | None = None
    repeats: int = 1
    operations: int | None = None
    provenance: str = ""

    @property
    def rel_error(self) -> Fraction | None:
        """(opt - approx) / opt, exact; None without an oracle."""
        if self.optimum is None:
            return None
        if self.optimum == 0:
            return Fraction(0)
        return (self.optimum - self.density) / self.optimum

    @property
    def rel_error_pct(self) -> float | None:
        err = self.rel_error
        return None if err is None else float(err * 100)

    def row(self, timing: bool = False) -> dict:
        err = self.rel_error_pct
        out = {
            "instance": self.instance,
            "algorithm": self.algorithm,
            "param": self.param,
            "nodes": self.nodes,
            "edges": self.edges,
            "density": f"{self.density.numerator}/{self.density.denominator}",
            "density_dec": f"{float(self.density):.6f}",
            "feasible": int(self.feasible),
            "optimum": "" if self.optimum is None else
            f"{self.optimum.numerator}/{self.optimum.denominator}",
            "rel_error_pct": "" if err is None else f"{err:.6f}",
            "provenance": self.provenance,
        }
        if timing:
            out["time_mean"] = "" if self.time_mean is None else f"{self.time_mean:.6f}"
            out["time_std"] = "" if self.time_std is None else f"{self.time_std:.6f}"
            out["repeats"] = self.repeats
        return out


def records_to_csv(records: Iterable[RunRecord], timing: bool = False) -> str:
    """CSV text with a ``# schema`` line. Timing columns are opt-in because they vary run to run."""
    buf = io.StringIO()
    buf.write(f"# schema: {CSV_SCHEMA}\n")
    writer = None
    for r in records:
        row = r.row(timing)
        if writer is None:
            writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
            writer.writeheader()
        writer.writerow(row)
    return buf.getvalue()


def records_to_json(records: Iterable[RunRecord], timing: bool = True) -> str:
    return json.dumps({"schema": CSV_SCHEMA, "runs": [r.row(timing) for r in records]},
                      indent=1)


def _timed(fn, repeats):
    times = []
    res = None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        res = fn()
        times.append(time.perf_counter() - t0)
    std = statistics.stdev(times) if len(times) > 1 else 0.0
    return res, statistics.fmean(times), std


# ---------------------------------------------------------------------------
# sweeps and evaluation


def sweep_h(graph, steps: int = 10, w: int | None = None, oracle: bool = False,
            cap: int = DEFAULT_CAP, repeats: int = DEFAULT_REPEATS,
            instance: str = "graph"):
    """At-least-h densities for h = w + i over an even grid of i in [0, m - w].

    ``w`` defaults to the edge count of the unconstrained densest subgraph
    (exact below :data:`FLOW_LIMIT` nodes, else greedy and flagged).
    """
    prov = "given"
    if w is None:
        ref, prov = unconstrained_reference(graph)
        w = ref.edge_count
    span = graph.m - w
    if span <= 0:
        raise ValueError(f"nothing to sweep: m={graph.m} <= w={w}")
    grid = sorted({(j * span) // steps for j in range(steps + 1)})
    rows = []
    for i in grid:
        h = w + i
        res, mean, std = _timed(lambda: at_least_h_edges_peel(graph, h), repeats)
        opt = None
        if oracle and graph.n <= cap:
            opt = brute_force_at_least_h_edges(graph, h, cap=cap).density.fraction
        rows.append(RunRecord(instance, "at_least_h", res.size, res.edge_count,
                              res.density.fraction, res.edge_count >= h, param=f"i={i};h={h}",
                              optimum=opt, time_mean=mean, time_std=std, repeats=repeats,
                              provenance=prov))
    return rows


ALGORITHMS = ("greedy", "exact_flow", "at_least_h", "colapprox", "colapprox_multi",
              "heuristic", "brute")


def _run_one(graph, algo, req):
    """Run ``algo``; returns (result, graph the density refers to)."""
    if algo == "greedy":
        return greedy_peel_unconstrained(graph), graph
    if algo == "exact_flow":
        return exact_dsp_flow(graph), graph
    if algo == "at_least_h":
        h = req if isinstance(req, int) else req.total
        return at_least_h_edges_peel(graph, h), graph
    if algo == "colapprox":
        if graph.is_single_colored():
            return col_approx(graph, req), graph
        algo = "colapprox_multi"
    if algo == "colapprox_multi":
        mg = to_multigraph(graph)
        return col_approx_multi(mg, req), mg
    if algo == "heuristic":
        return heuristic_peel(graph, req), graph
    if algo == "brute":
        if isinstance(req, ColorRequirement):
            return brute_force_colored(graph, req), graph
        return brute_force_at_least_h_edges(graph, int(req or 0)), graph
    raise ValueError(f"unknown algorithm {algo!r}")


def _oracle(space, req, cap):
    if req is None:
        return exact_dsp_flow(space).density.fraction
    if isinstance(req, ColorRequirement):
        return brute_force_colored(space, req, cap=cap).density.fraction
    return brute_force_at_least_h_edges(space, int(req), cap=cap).density.fraction


def _feasible(res: SubgraphResult, req) -> bool:
    if req is None:
        return res.size > 0
    if isinstance(req, ColorRequirement):
        return res.satisfies(req)
    return res.edge_count >= int(req)


@dataclass
class InstanceSpec:
    """One graph plus the requirements to run on it.

    ``graph`` is either a path (with ``fmt``) or a dict of :func:`gnm_colored`
    arguments. ``requirement`` is a dict with ``kind`` in ``none``,
    ``fixed`` (``h``: list or {label: count}), ``random`` (``count``),
    ``ladder`` (``steps``), ``edges`` (``h``: int) or ``sweep`` (``steps``).
    ``augment`` applies :func:`adversarial_augment` and requires the new color.
    """

    id: str
    graph: object
    requirement: dict = field(default_factory=lambda: {"kind": "none"})
    algorithms: Sequence[str] = ("colapprox", "heuristic")
    fmt: str = "canonical"
    seed: int = 0
    augment: bool = False

    def load(self) -> EdgeColoredGraph:
        if isinstance(self.graph, EdgeColoredGraph):
            return self.graph
        if isinstance(self.graph, dict):
            return gnm_colored(**self.graph)
        return load_dataset(self.graph, self.fmt)

    def requirements(self, graph) -> list[tuple[str, object]]:
        kind = self.requirement.get("kind", "none")
        if kind == "none":
            return [("", None)]
        if kind == "edges":
            return [(f"h={int(self.requirement['h'])}", int(self.requirement["h"]))]
        if kind == "fixed":
            h = self.requirement["h"]
            req = (ColorRequirement.from_labels(graph, h) if isinstance(h, dict)
                   else ColorRequirement(tuple(h)))
            return [(_fmt_h(req), req)]
        if kind == "random":
            reqs = random_color_instances(graph, int(self.requirement.get("count", 10)),
                                          seed=self.seed)
            return [(f"{_fmt_h(r)};lambda={float(lam):.4f}", r) for r, lam in reqs]
        if kind == "ladder":
            steps = int(self.requirement.get("steps", 10))
            return [(f"rung={i};{_fmt_h(r)}", r)
                    for i, r in enumerate(requirement_ladder(graph, steps), start=1)]
        if kind == "sweep":
            return [("sweep", "sweep")]
        raise ValueError(f"unknown requirement kind {kind!r}")


def _fmt_h(req: ColorRequirement) -> str:
    return "h=" + "|".join(str(x) for x in req.h)


def evaluate(instances: Iterable[InstanceSpec], oracle: bool = False,
             cap: int = DEFAULT_CAP, repeats: int = DEFAULT_REPEATS,
             validate: bool = True) -> list[RunRecord]:
    """Run each instance's algorithms on each of its requirements.

    With ``oracle`` the exact optimum (flow for unconstrained runs, subset
    enumeration otherwise) is attached so relative errors can be reported;
    that needs every instance to fit under ``cap`` nodes. With ``validate``
    every output is re-checked against its requirement.
    """
    records: list[RunRecord] = []
    for spec in instances:
        graph = spec.load()
        if spec.augment:
            graph = adversarial_augment(graph)
        reqs = spec.requirements(graph)
        if spec.augment:
            reqs = [(p, _with_new_color(r, graph)) for p, r in reqs]
        for param, req in reqs:
            if req == "sweep":
                records.extend(sweep_h(graph, int(spec.requirement.get("steps", 10)),
                                       oracle=oracle, cap=cap, repeats=repeats,
                                       instance=spec.id))
                continue
            opt_cache: dict[bool, Fraction] = {}
            for algo in spec.algorithms:
                (res, space), mean, std = _timed(lambda: _run_one(graph, algo, req), repeats)
                feasible = _feasible(res, req) if validate else True
                opt = None
                if oracle:
                    if req is not None and graph.n > cap:
                        raise CapExceeded(f"instance {spec.id}: {graph.n} nodes > cap {cap}")
                    key = space.is_multigraph
                    if key not in opt_cache:
                        opt_cache[key] = _oracle(space, req, cap)
                    opt = opt_cache[key]
                records.append(RunRecord(spec.id, res.algorithm or algo, res.size,
                                         res.edge_count, res.density.fraction, feasible,
                                         param=param, optimum=opt, time_mean=mean,
                                         time_std=std, repeats=repeats,
                                         operations=res.info.get("operations")))
    return records


def _with_new_color(req, graph):
    if not isinstance(req, ColorRequirement):
        return req
    h = list(req.h)
    if len(h) == graph.num_colors - 1:
        h.append(1)
    else:
        h[-1] = max(h[-1], 1)
    return ColorRequirement(tuple(h), req.mode)


def summarize(records: Iterable[RunRecord]) -> dict[str, dict]:
    """Per-algorithm error statistics in percent.

    ``mean``/``std``/``median``/``max`` are over runs that were not optimal;
    ``mean_all`` is over every run with an oracle.
    """
    by: dict[str, list[RunRecord]] = {}
    for r in records:
        by.setdefault(r.algorithm, []).append(r)
    out = {}
    for algo, rs in by.items():
        errs = [r.rel_error for r in rs if r.rel_error is not None]
        pct = [float(e * 100) for e in errs]
        nonopt = [p for e, p in zip(errs, pct) if e > 0]
        times = [r.time_mean for r in rs if r.time_mean is not None]
        total = len(errs)
        out[algo] = {
            "runs": len(rs),
            "feasible_pct": 100.0 * sum(r.feasible for r in rs) / len(rs),
            "optimal_pct": 100.0 * sum(e == 0 for e in errs) / total if total else None,
            "within_1pct": 100.0 * sum(e <= Fraction(1, 100) for e in errs) / total
            if total else None,
            "mean": statistics.fmean(nonopt) if nonopt else 0.0,
            "std": statistics.pstdev(nonopt) if len(nonopt) > 1 else 0.0,
            "median": statistics.median(nonopt) if nonopt else 0.0,
            "max": max(nonopt) if nonopt else 0.0,
            "mean_all": statistics.fmean(pct) if pct else None,
            "min_error": float(min(errs) * 100) if errs else None,
            "time_mean": statistics.fmean(times) if times else None,
        }
    return out


def run_bench_spec(spec: dict | str | Path, seed: int | None = None,
                   repeats: int | None = None, cap: int | None = None) -> list[RunRecord]:
    """Run a JSON bench description.

    ``{"seed": 1, "oracle": true, "oracle_cap": 14, "repeats": 1,
    "instances": [{"id": ..., "graph": {...} | "path", "count": 3, ...}]}``.
    An instance with ``count`` expands into that many copies whose synthetic
    seeds are derived from the top-level seed.
    """
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text(encoding="utf-8"))
    seed = spec.get("seed", 0) if seed is None else seed
    repeats = spec.get("repeats", DEFAULT_REPEATS) if repeats is None else repeats
    cap = spec.get("oracle_cap", DEFAULT_CAP) if cap is None else cap
    seeds = np.random.SeedSequence(seed)
    specs = []
    for j, inst in enumerate(spec["instances"]):
        count = int(inst.get("count", 1))
        children = seeds.spawn(1)[0].spawn(count)
        for c in range(count):
            graph = inst["graph"]
            sub_seed = int(children[c].generate_state(1)[0])
            if isinstance(graph, dict):
                graph = dict(graph)
                graph.setdefault("seed", sub_seed)
                if count > 1:
                    graph["seed"] = sub_seed
            specs.append(InstanceSpec(
                id=inst.get("id", f"inst{j}") + (f"#{c}" if count > 1 else ""),
                graph=graph,
                requirement=inst.get("requirement", {"kind": "none"}),
                algorithms=tuple(inst.get("algorithms", spec.get("algorithms",
                                                                 ["colapprox", "heuristic"]))),
                fmt=inst.get("format", "canonical"),
                seed=sub_seed,
                augment=bool(inst.get("augment", False)),
            ))
    return evaluate(specs, oracle=bool(spec.get("oracle", False)), cap=cap, repeats=repeats)
