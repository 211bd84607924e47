"""Graph representation, base-graph generators and the eps/n perturbation.

Vertices are the integers ``0..n-1`` and that integer order is the canonical
vertex ordering used everywhere (ties in the enumeration code, argmin
tie-breaks, output sorting).

Randomness
----------
All sampling uses numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence``.  A stream is identified by a root seed plus an
optional tuple of non-negative integer keys (the SeedSequence ``spawn_key``),
so ``rng_for(root, n, seed_index)`` gives the same bits on every platform and
two different key tuples never share a stream.
"""

from __future__ import annotations

import math
import zlib
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError

BASE_KINDS = (
    "path",
    "cycle",
    "star",
    "complete",
    "binary_tree",
    "two_clique_bridge",
    "grid",
    "random_tree",
)


def key_of(name: str) -> int:
    """Stable integer key for a string (used to name RNG substreams)."""
    return zlib.crc32(name.encode("utf-8"))


def rng_for(root: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for the substream ``keys`` of ``root``."""
    if root < 0 or any(k < 0 for k in keys):
        raise ParameterError("seeds and substream keys must be non-negative integers")
    ss = np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on ``0..n-1`` with sorted adjacency tuples."""

    n: int
    adj: tuple[tuple[int, ...], ...]
    m: int

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ParameterError("adjacency must have one entry per vertex")

    # construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], *, strict: bool = False) -> "Graph":
        """Build a graph from ``(u, v)`` pairs.

        Duplicate pairs collapse unless ``strict`` is set, in which case
        duplicates raise.  Self-loops and out-of-range labels always raise.
        """
        if n < 0:
            raise ParameterError("n must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            return cls(n, tuple(() for _ in range(n)), 0)
        arr = arr.reshape(-1, 2)
        if arr.min() < 0 or arr.max() >= n:
            raise DomainError(f"edge endpoint outside 0..{n - 1}")
        if np.any(arr[:, 0] == arr[:, 1]):
            u = int(arr[arr[:, 0] == arr[:, 1]][0, 0])
            raise DomainError(f"self-loop at vertex {u}")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = lo * n + hi
        uniq = np.unique(keys)
        if strict and uniq.size != keys.size:
            raise DomainError("duplicate edge")
        lo, hi = uniq // n, uniq % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        bounds = np.searchsorted(src, np.arange(n + 1))
        dst_list = dst.tolist()
        adj = tuple(tuple(dst_list[bounds[v]:bounds[v + 1]]) for v in range(n))
        return cls(n, adj, int(uniq.size))

    # basic queries ----------------------------------------------------

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj), dtype=np.int64, count=self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted ``(u, v)`` pairs with ``u < v``."""
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_set

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays of the adjacency structure."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (w for a in self.adj for w in a), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        """Neighborhood of each vertex as an int bitmask (bit ``w`` = vertex ``w``)."""
        out = []
        for a in self.adj:
            mask = 0
            for w in a:
                mask |= 1 << w
            out.append(mask)
        return tuple(out)

    def induced_connected(self, vertices: Iterable[int]) -> bool:
        """Whether ``G[vertices]`` is connected (the empty set is not)."""
        vs = set(vertices)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self.adj[u]:
                if w in vs and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(vs)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        return bool(np.all(bfs_distances(self, 0) >= 0))

    def component(self, v: int) -> set[int]:
        dist = bfs_distances(self, v)
        return set(np.flatnonzero(dist >= 0).tolist())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


# generators -------------------------------------------------------------


def _grid_shape(n: int) -> tuple[int, int]:
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return rows, n // rows


def generate_base(kind: str, n: int, seed: int | None = None, *, max_degree: int | None = None) -> Graph:
    """Deterministic connected base graph of the requested shape.

    ``grid`` uses the most nearly square ``rows x cols`` factorization of
    ``n`` (so a prime ``n`` degenerates to a path).  ``random_tree`` attaches
    vertex ``i`` to a uniformly random earlier vertex whose degree is below
    ``max_degree`` (no cap when ``None``) and needs ``seed``.
    """
    if kind not in BASE_KINDS:
        raise ParameterError(f"unknown base kind {kind!r}; expected one of {', '.join(BASE_KINDS)}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError("n must be a positive integer (n >= 1)")
    n = int(n)
    edges: list[tuple[int, int]]
    if kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        if n < 3:
            raise ParameterError("cycle needs n >= 3")
        edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif kind == "star":
        edges = [(0, i) for i in range(1, n)]
    elif kind == "complete":
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif kind == "binary_tree":
        if (n + 1) & n:
            raise ParameterError("binary_tree needs n = 2^h - 1")
        edges = [((i - 1) // 2, i) for i in range(1, n)]
    elif kind == "two_clique_bridge":
        if n % 2 or n < 2:
            raise ParameterError("two_clique_bridge needs even n >= 2")
        h = n // 2
        edges = [(i, j) for i in range(h) for j in range(i + 1, h)]
        edges += [(h + i, h + j) for i in range(h) for j in range(i + 1, h)]
        edges.append((h - 1, h))
    elif kind == "grid":
        rows, cols = _grid_shape(n)
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
    else:
        if seed is None:
            raise ParameterError("random_tree needs a seed")
        if max_degree is not None and max_degree < 2 and n > 2:
            raise ParameterError("random_tree max_degree must be >= 2 for n > 2")
        rng = rng_for(seed, key_of("random_tree"), n)
        edges = []
        deg = [0] * n
        open_ = [0] if n > 1 else []
        for i in range(1, n):
            j = int(rng.integers(len(open_)))
            parent = open_[j]
            edges.append((parent, i))
            deg[parent] += 1
            deg[i] += 1
            if max_degree is not None and deg[parent] >= max_degree:
                open_[j] = open_[-1]
                open_.pop()
            open_.append(i)
    return Graph.from_edges(n, edges)


# perturbation -------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationParams:
    """``eps`` of the model, root seed, and optional exponent ``a`` with eps = n^-a."""

    eps: float
    seed: int = 0
    eps_schedule: float | None = None

    def __post_init__(self):
        if self.eps_schedule is not None:
            if not 0 < self.eps_schedule < 1:
                raise ParameterError("eps_schedule exponent a must lie in (0, 1)")
        elif not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ParameterError("eps must be a finite non-negative number")
        if self.seed < 0 or self.seed >= 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")

    def eps_for(self, n: int) -> float:
        if self.eps_schedule is not None:
            return float(n) ** (-self.eps_schedule)
        return float(self.eps)


@dataclass(frozen=True, eq=False)
class PerturbedGraph:
    base: Graph
    random_edges: tuple[tuple[int, int], ...]
    merged: Graph
    eps: float = 0.0
    seed: int = 0

    def provenance(self, u: int, v: int) -> str | None:
        """``'base'``, ``'random'``, ``'both'`` or ``None`` for a non-edge."""
        if u > v:
            u, v = v, u
        in_base = self.base.has_edge(u, v)
        in_r = (u, v) in self._random_set
        if in_base and in_r:
            return "both"
        if in_base:
            return "base"
        if in_r:
            return "random"
        return None

    @cached_property
    def _random_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.random_edges)


def _pairs_from_index(idx: np.ndarray) -> np.ndarray:
    # idx = j(j-1)/2 + i with 0 <= i < j
    j = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    j -= (j * (j - 1) // 2 > idx).astype(np.int64)
    j += ((j + 1) * j // 2 <= idx).astype(np.int64)
    i = idx - j * (j - 1) // 2
    return np.stack([i, j], axis=1)


def sample_pairs(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sample of ``G(n, p)`` as a sorted ``(k, 2)`` array of pairs ``u < v``.

    Draws ``k ~ Binomial(C(n,2), p)`` and then ``k`` distinct pair indices
    uniformly, which has the same law as independent Bernoulli trials.
    """
    total = n * (n - 1) // 2
    if total == 0 or p == 0:
        return np.empty((0, 2), dtype=np.int64)
    k = int(rng.binomial(total, p))
    if k == 0:
        return np.empty((0, 2), dtype=np.int64)
    if total <= 4 * k + 1024:
        chosen = rng.choice(total, size=k, replace=False)
    else:
        # iid draws with rejection of repeats until k distinct values
        chosen = np.unique(rng.integers(0, total, size=k, dtype=np.int64))
        while chosen.size < k:
            extra = rng.integers(0, total, size=k - chosen.size, dtype=np.int64)
            chosen = np.union1d(chosen, extra)
    return _pairs_from_index(np.sort(chosen).astype(np.int64))


def perturb(g: Graph, params: PerturbationParams) -> PerturbedGraph:
    """``G* = G u R`` with ``R ~ G(n, eps/n)`` drawn from ``params.seed``."""
    if g.n == 0:
        raise DomainError("cannot perturb an empty graph")
    eps = params.eps_for(g.n)
    p = eps / g.n
    if p >= 1:
        raise ParameterError(f"eps/n = {p:g} must be < 1")
    rng = rng_for(params.seed, key_of("perturb"), g.n)
    pairs = sample_pairs(g.n, p, rng)
    random_edges = tuple(sorted((int(u), int(v)) for u, v in pairs.tolist()))
    if random_edges:
        merged = Graph.from_edges(g.n, np.concatenate([np.asarray(g.edges(), dtype=np.int64).reshape(-1, 2), pairs]))
    else:
        merged = g
    return PerturbedGraph(g, random_edges, merged, eps=eps, seed=params.seed)


# measurements -------------------------------------------------------------


def bfs_distances(g: Graph, src: int) -> np.ndarray:
    """Hop distances from ``src``; unreachable vertices get -1."""
    indptr, indices = g.csr
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        starts = indptr[frontier]
        lens = indptr[frontier + 1] - starts
        total = int(lens.sum())
        if total == 0:
            break
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
        nb = indices[offs]
        nb = np.unique(nb[dist[nb] < 0])
        dist[nb] = d
        frontier = nb
    return dist


def degeneracy(g: Graph) -> int:
    """Smallest D such that every subgraph has a vertex of degree <= D.

    Repeatedly deletes a minimum-degree vertex (bucket queue) and returns the
    largest degree seen at deletion time.
    """
    if g.n == 0:
        return 0
    deg = [len(a) for a in g.adj]
    maxd = max(deg)
    buckets: list[set[int]] = [set() for _ in range(maxd + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * g.n
    best = 0
    cur = 0
    for _ in range(g.n):
        cur = max(cur - 1, 0)
        while not buckets[cur]:
            cur += 1
        v = buckets[cur].pop()
        removed[v] = True
        best = max(best, cur)
        for w in g.adj[v]:
            if not removed[w]:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets[deg[w]].add(w)
    return best


def diameter(g: Graph) -> int:
    """Exact diameter of a connected graph.

    Runs breadth-first searches with eccentricity bounds: every BFS from ``v``
    gives ``max(d(v,w), e - d(v,w)) <= ecc(w) <= e + d(v,w)``; vertices whose
    upper bound cannot beat the best eccentricity found are dropped, and the
    loop ends when no candidate is left.  Every vertex is either searched or
    provably no more eccentric, so the result equals the all-sources value.
    """
    if g.n == 0:
        raise DomainError("diameter of the empty graph is undefined")
    if g.n == 1:
        return 0
    lower = np.zeros(g.n, dtype=np.int64)
    upper = np.full(g.n, np.iinfo(np.int64).max, dtype=np.int64)
    alive = np.ones(g.n, dtype=bool)
    best = 0
    pick_high = True
    # ties go to high degree, then low label
    deg = g.degrees
    while alive.any():
        cand = np.flatnonzero(alive)
        if pick_high:
            key = np.lexsort((cand, -deg[cand], -upper[cand]))
        else:
            key = np.lexsort((cand, -deg[cand], lower[cand]))
        v = int(cand[key[0]])
        pick_high = not pick_high
        dist = bfs_distances(g, v)
        if dist.min() < 0:
            raise DomainError("diameter needs a connected graph")
        e = int(dist.max())
        best = max(best, e)
        np.maximum(lower, np.maximum(dist, e - dist), out=lower)
        np.minimum(upper, e + dist, out=upper)
        alive[v] = False
        alive &= upper > best
        exact = alive & (lower == upper)
        if exact.any():
            best = max(best, int(lower[exact].max()))
            alive &= ~exact
            alive &= upper > best
    return best


def diameter_all_sources(g: Graph) -> int:
    """Plain all-sources BFS diameter, for small graphs and cross-checks."""
    best = 0
    for s in range(g.n):
        dist = [-1] * g.n
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    q.append(w)
        if min(dist) < 0:
            raise DomainError("diameter needs a connected graph")
        best = max(best, max(dist))
    return best


def farthest_pair(g: Graph, start: int = 0) -> tuple[int, int]:
    """Double-BFS heuristic for a pair of far-apart vertices."""
    d0 = bfs_distances(g, start)
    a = int(np.argmax(d0))
    d1 = bfs_distances(g, a)
    b = int(np.argmax(d1))
    return a, b
