"""Edge-list and JSON serialization.

Edge-list format: a header line ``"n m"`` followed by ``m`` lines ``"u v"``
with ``u < v``, ASCII decimal, each newline-terminated.  The writer emits the
edges sorted; the reader rejects self-loops, duplicates, reversed pairs and
count mismatches.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import DomainError
from .graph import Graph, PerturbedGraph


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise DomainError("edge list is empty (missing 'n m' header)")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise DomainError(f"malformed edge list: {exc}") from None
    if len(edges) != m:
        raise DomainError(f"header declares {m} edges but {len(edges)} follow")
    for u, v in edges:
        if u == v:
            raise DomainError(f"self-loop {u} {v}")
        if u > v:
            raise DomainError(f"edge '{u} {v}' must be written with u < v")
    return Graph.from_edges(n, edges, strict=True)


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="ascii")


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="ascii"))


def perturbed_to_dict(pg: PerturbedGraph) -> dict:
    return {
        "n": pg.base.n,
        "eps": pg.eps,
        "seed": pg.seed,
        "base_edges": [list(e) for e in pg.base.edges()],
        "random_edges": [list(e) for e in pg.random_edges],
        "merged_m": pg.merged.m,
    }


def perturbed_from_dict(d: dict) -> PerturbedGraph:
    n = int(d["n"])
    base = Graph.from_edges(n, [tuple(e) for e in d["base_edges"]], strict=True)
    random_edges = tuple(sorted((int(u), int(v)) for u, v in d["random_edges"]))
    merged = Graph.from_edges(n, list(base.edges()) + list(random_edges))
    return PerturbedGraph(base, random_edges, merged, eps=float(d["eps"]), seed=int(d["seed"]))


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_graph(path) -> Graph:
    """Read an edge list, or the merged graph of a perturbed-graph JSON file."""
    p = Path(path)
    if p.suffix == ".json":
        return perturbed_from_dict(json.loads(p.read_text())).merged
    return read_edge_list(p)
