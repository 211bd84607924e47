"""Long paths: an exact subset-DP oracle and the blob-based constructive heuristic.

The heuristic contracts bounded-size connected blobs of the base graph,
looks for a long path among the blobs with randomized depth-first search,
and then threads that path back through the blobs: consecutive blobs are
joined by a witness edge and each blob is crossed from its entry to its exit
vertex along a shortest path inside the blob.  Blobs are disjoint and each is
visited once, so the result is a simple path with at least as many edges as
the blob path.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .blobs import auxiliary_blob_graph, blob_partition
from .errors import CapabilityError, DomainError, ParameterError
from .graph import Graph, PerturbedGraph, bfs_distances, farthest_pair, key_of, rng_for

EXACT_MAX_N = 20
DFS_RESTARTS = 10


@dataclass(frozen=True)
class PathWitness:
    vertices: tuple[int, ...]
    method: str
    aux_length: int | None = None

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def is_valid(self, g: Graph) -> bool:
        vs = self.vertices
        return len(set(vs)) == len(vs) and all(g.has_edge(a, b) for a, b in zip(vs, vs[1:]))


# exact -----------------------------------------------------------------------


def _path_table(g: Graph) -> np.ndarray:
    """``ends[mask]`` = bitmask of vertices ``e`` such that some simple path
    with vertex set ``mask`` ends at ``e``."""
    n = g.n
    adj = [np.uint32(a) for a in g.adj_masks]
    ends = np.zeros(1 << n, dtype=np.uint32)
    for v in range(n):
        ends[1 << v] = np.uint32(1 << v)
    masks = np.arange(1 << n, dtype=np.uint32)
    size = np.bitwise_count(masks)
    for layer in range(1, n):
        cur = masks[size == layer]
        cur = cur[ends[cur] != 0]
        if cur.size == 0:
            break
        e = ends[cur]
        for w in range(n):
            bit = np.uint32(1 << w)
            ok = ((cur & bit) == 0) & ((e & adj[w]) != 0)
            tgt = cur[ok] | bit
            ends[tgt] |= bit
    return ends


def longest_path_exact(g: Graph) -> PathWitness:
    """A maximum-length simple path, the lexicographically least such vertex sequence."""
    if g.n > EXACT_MAX_N:
        raise CapabilityError(f"exact longest path needs n <= {EXACT_MAX_N} (got n={g.n})")
    if g.n == 0:
        raise DomainError("empty graph has no path")
    ends = _path_table(g)
    masks = np.arange(1 << g.n, dtype=np.uint32)
    size = np.bitwise_count(masks)
    have = ends != 0
    L = int(size[have].max())
    # a path covering R can start at y iff y is in ends[R] (reverse it)
    seq: list[int] = []
    used = 0
    for step in range(L):
        r = L - step
        sel = have & (size == r) & ((masks & np.uint32(used)) == 0)
        starts = int(np.bitwise_or.reduce(ends[sel])) if sel.any() else 0
        if seq:
            starts &= g.adj_masks[seq[-1]]
        y = (starts & -starts).bit_length() - 1
        seq.append(y)
        used |= 1 << y
    return PathWitness(tuple(seq), "exact")


# heuristic -------------------------------------------------------------------


def _randomized_dfs_path(g: Graph, root: int, rng: np.random.Generator) -> list[int]:
    """Deepest root-to-node stack reached by a DFS with shuffled neighbor order."""
    visited = np.zeros(g.n, dtype=bool)
    visited[root] = True
    stack = [root]
    iters = [iter(rng.permutation(g.adj[root]).tolist())]
    best = [root]
    while stack:
        nxt = None
        for w in iters[-1]:
            if not visited[w]:
                nxt = w
                break
        if nxt is None:
            stack.pop()
            iters.pop()
            continue
        visited[nxt] = True
        stack.append(nxt)
        iters.append(iter(rng.permutation(g.adj[nxt]).tolist()))
        if len(stack) > len(best):
            best = list(stack)
    return best


def long_path_in(g: Graph, seed: int, restarts: int = DFS_RESTARTS) -> list[int]:
    """Longest of ``restarts`` randomized DFS paths from random roots.

    Ties go to the lexicographically least sequence.
    """
    rng = rng_for(seed, key_of("aux-dfs"), g.n)
    roots = rng.integers(0, g.n, size=restarts).tolist()
    best: list[int] | None = None
    for i, r in enumerate(roots):
        p = _randomized_dfs_path(g, r, rng_for(seed, key_of("aux-dfs"), g.n, i + 1))
        if best is None or (len(p), [-x for x in p]) > (len(best), [-x for x in best]):
            best = p
    return best


def _route(g: Graph, members: set[int], src: int, dst: int) -> list[int]:
    """Shortest ``src -> dst`` path using only vertices in ``members``."""
    if src == dst:
        return [src]
    prev = {src: src}
    q = deque([src])
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if w in members and w not in prev:
                prev[w] = u
                if w == dst:
                    out = [w]
                    while out[-1] != src:
                        out.append(prev[out[-1]])
                    return out[::-1]
                q.append(w)
    raise DomainError(f"blob is not connected between {src} and {dst}")


def _farthest_in(g: Graph, members: set[int], src: int) -> int:
    dist = {src: 0}
    q = deque([src])
    far = src
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if w in members and w not in dist:
                dist[w] = dist[u] + 1
                if (dist[w], -w) > (dist[far], -far):
                    far = w
                q.append(w)
    return far


def _fallback(g: Graph, seed: int) -> PathWitness:
    """Longer of the deepest BFS path and a randomized-DFS path of ``g``."""
    a, b = farthest_pair(g)
    dist = bfs_distances(g, a)
    path = [b]
    while path[-1] != a:
        u = path[-1]
        path.append(min(w for w in g.adj[u] if dist[w] == dist[u] - 1))
    path.reverse()
    dfs = long_path_in(g, seed)
    if len(dfs) > len(path):
        path = dfs
    return PathWitness(tuple(path), "dfs_fallback", 0)


def default_k(eps: float) -> int:
    """``ceil(4 / eps)``: makes the random part of the blob graph supercritical."""
    if eps <= 0:
        raise ParameterError("default blob size needs eps > 0")
    return math.ceil(4 / eps)


def long_path_blob_heuristic(pg: PerturbedGraph, k: int | None = None, seed: int | None = None) -> PathWitness:
    """Blob path in the contracted graph, expanded into a path of ``pg.merged``.

    The first and last blobs are also crossed to their farthest vertex from
    the witness endpoint, which can only lengthen the result.  When the blob
    graph has a single vertex (or no edge) the longer of the deepest BFS
    path and a randomized-DFS path of ``pg.merged`` is returned instead
    (method ``dfs_fallback``).
    """
    if k is None:
        k = min(default_k(pg.eps), pg.base.n)
    if seed is None:
        seed = pg.seed
    part = blob_partition(pg.base, k)
    aux = auxiliary_blob_graph(pg, part)
    g = pg.merged
    if part.t < 2:
        return _fallback(g, seed)
    bpath = long_path_in(aux.graph, seed)
    if len(bpath) < 2:
        return _fallback(g, seed)
    members = [set(part.blobs[i]) for i in bpath]
    hops = [aux.witness(i, j) for i, j in zip(bpath, bpath[1:])]
    out: list[int] = []
    first_exit = hops[0][0]
    out += _route(g, members[0], _farthest_in(g, members[0], first_exit), first_exit)
    for idx in range(1, len(bpath)):
        entry = hops[idx - 1][1]
        exit_ = hops[idx][0] if idx < len(hops) else _farthest_in(g, members[idx], entry)
        out += _route(g, members[idx], entry, exit_)
    w = PathWitness(tuple(out), "blob_heuristic", len(bpath) - 1)
    assert w.length >= w.aux_length and len(set(out)) == len(out)
    return w
