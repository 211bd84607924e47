"""Partition a connected graph into connected blobs of size in [k, Delta*k].

Algorithm: take the BFS spanning tree rooted at vertex 0 and sweep the
vertices from the deepest level upward, keeping for each vertex the size of
its not-yet-cut subtree.  A vertex whose remaining subtree reaches ``k`` is
cut off together with that subtree.  Every child of a cut vertex still
holds fewer than ``k`` vertices, so a blob has at most
``1 + (Delta - 1)(k - 1)`` vertices (``1 + Delta(k - 1)`` at the root), which
is at most ``Delta*k``.  If the piece left at the root is smaller than ``k``
it is glued, through a tree edge, to the blob of one of its cut children;
the result has at most ``1 + Delta(k - 1)`` vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .errors import DomainError, ParameterError
from .graph import Graph, PerturbedGraph


@dataclass(frozen=True)
class BlobPartition:
    blobs: tuple[tuple[int, ...], ...]
    blob_of: tuple[int, ...]
    k: int
    delta: int

    @property
    def t(self) -> int:
        return len(self.blobs)

    def as_dict(self) -> dict:
        return {"k": self.k, "t": self.t, "delta": self.delta, "blobs": [list(b) for b in self.blobs]}


def _bfs_tree(g: Graph, root: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """BFS order and parent array (-1 for the root and unreached vertices)."""
    indptr, indices = g.csr
    A = csr_matrix((np.ones(indices.size, dtype=np.int8), indices, indptr), shape=(g.n, g.n))
    order, pred = breadth_first_order(A, root, directed=True, return_predecessors=True)
    pred = np.where(pred < 0, -1, pred)
    return order, pred


def blob_partition(g: Graph, k: int) -> BlobPartition:
    if k < 1:
        raise ParameterError("k must be a positive integer")
    if k > g.n:
        raise ParameterError(f"k = {k} exceeds n = {g.n}")
    order_arr, parent_arr = _bfs_tree(g)
    if order_arr.size != g.n:
        raise DomainError("blob_partition needs a connected graph")
    order = order_arr.tolist()
    parent = parent_arr.tolist()
    delta = g.max_degree
    remaining = [1] * g.n
    cut = [False] * g.n
    cut_roots = []
    for v in reversed(order):
        if remaining[v] >= k:
            cut[v] = True
            cut_roots.append(v)
        elif parent[v] >= 0:
            remaining[parent[v]] += remaining[v]

    # each vertex belongs to its nearest cut ancestor (itself if cut)
    index = {r: i for i, r in enumerate(cut_roots)}
    blob_of = [-1] * g.n
    for v in order:
        blob_of[v] = index[v] if cut[v] else (blob_of[parent[v]] if parent[v] >= 0 else -1)
    if not cut[0]:
        # root piece is smaller than k; glue it onto the first cut child in BFS order
        host = next(blob_of[v] for v in order if cut[v] and blob_of[parent[v]] == -1)
        blob_of = [host if b == -1 else b for b in blob_of]
    labels = np.asarray(blob_of)
    by_blob = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[by_blob], np.arange(len(cut_roots) + 1))
    blobs = [by_blob[bounds[i]:bounds[i + 1]] for i in range(len(cut_roots))]
    for b in blobs:
        if not k <= len(b) <= max(delta, 1) * k:
            raise AssertionError(f"blob of size {len(b)} outside [{k}, {delta * k}]")
    return BlobPartition(tuple(tuple(b.tolist()) for b in blobs), tuple(blob_of), k, delta)


def check_partition(g: Graph, part: BlobPartition) -> list[str]:
    """Violated invariants, as human-readable strings (empty when valid)."""
    problems = []
    seen = sorted(v for b in part.blobs for v in b)
    if seen != list(range(g.n)):
        problems.append("blobs do not partition the vertex set")
    for i, b in enumerate(part.blobs):
        if not g.induced_connected(b):
            problems.append(f"blob {i} is not connected")
        if not part.k <= len(b) <= part.delta * part.k:
            problems.append(f"blob {i} has size {len(b)} outside [{part.k}, {part.delta * part.k}]")
        if any(part.blob_of[v] != i for v in b):
            problems.append(f"blob_of disagrees with blob {i}")
    t = part.t
    if not (g.n <= t * part.delta * part.k and t * part.k <= g.n):
        problems.append(f"t = {t} outside [n/(Delta k), n/k]")
    return problems


@dataclass(frozen=True)
class AuxiliaryGraph:
    graph: Graph
    witnesses: dict

    def witness(self, i: int, j: int) -> tuple[int, int]:
        """Merged edge ``(u, v)`` with ``u`` in blob ``i`` and ``v`` in blob ``j``."""
        if i < j:
            return self.witnesses[(i, j)]
        u, v = self.witnesses[(j, i)]
        return v, u


def auxiliary_blob_graph(pg: PerturbedGraph | Graph, part: BlobPartition) -> AuxiliaryGraph:
    """Contract every blob to a vertex; blobs are adjacent when a merged edge joins them.

    The witness for blob pair ``(i, j)``, ``i < j``, is the least merged edge
    ``(u, v)`` (in label order) with ``u`` in blob ``i`` and ``v`` in blob ``j``.
    """
    g = pg.merged if isinstance(pg, PerturbedGraph) else pg
    if len(part.blob_of) != g.n or any(b < 0 for b in part.blob_of):
        raise DomainError("partition does not cover the graph's vertex set")
    witnesses: dict[tuple[int, int], tuple[int, int]] = {}
    for u, v in g.edges():
        i, j = part.blob_of[u], part.blob_of[v]
        if i == j:
            continue
        key = (i, j) if i < j else (j, i)
        if key not in witnesses:
            witnesses[key] = (u, v) if i < j else (v, u)
    aux = Graph.from_edges(part.t, list(witnesses))
    return AuxiliaryGraph(aux, witnesses)
