"""Binary codes for connected vertex sets with a given neighborhood size.

A connected set ``A`` containing a root ``v`` is grown from ``S = {v}``,
``B = {}``.  At each step the smallest-label vertex ``w`` of the frontier
``T = N(S) \\ B`` is examined: ``w in A`` moves it to ``S`` and writes a 1,
otherwise it moves to ``B`` and writes a 0.  The walk stops when the frontier
is empty, at which point ``S = A`` and ``B = N(A)``.  The code therefore has
exactly ``|A| - 1`` ones and ``|N(A)|`` zeros, and distinct sets get distinct
codes, so at most ``C(a+b-1, b)`` connected sets have ``|A| = a`` and
``|N(A)| = b``.

Sets are handled internally as int bitmasks over the vertex labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

from .errors import DecodeError, DomainError, ParameterError
from .graph import Graph


@dataclass(frozen=True)
class ConnectedSetCode:
    root: int
    bits: str
    a: int
    b: int

    def __str__(self):
        return f"{self.root} {self.a} {self.b}:{self.bits}"


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _members(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def code_bound(a: int, b: int) -> int:
    """``C(a+b-1, b)``, the number of codes with ``a-1`` ones and ``b`` zeros."""
    if a < 1 or b < 0:
        return 0
    return comb(a + b - 1, b)


def encode_connected_set(g: Graph, A: Iterable[int], v: int) -> ConnectedSetCode:
    """Code of the connected set ``A`` rooted at ``v``.

    The whole vertex set is accepted and encodes as ``n-1`` ones; this is the
    ``b = 0`` case the enumerator also produces.
    """
    A = set(A)
    if v not in A:
        raise DomainError(f"root {v} is not in the set")
    if any(not 0 <= u < g.n for u in A):
        raise DomainError("set contains a vertex outside the graph")
    if not g.induced_connected(A):
        raise DomainError("set does not induce a connected subgraph")
    adj = g.adj_masks
    target = _mask(A)
    S = 1 << v
    B = 0
    nbr = adj[v]
    bits = []
    T = nbr & ~S
    while T:
        low = T & -T
        w = low.bit_length() - 1
        if target & low:
            S |= low
            nbr |= adj[w]
            bits.append("1")
        else:
            B |= low
            bits.append("0")
        T = nbr & ~S & ~B
    return ConnectedSetCode(v, "".join(bits), len(A), bits.count("0"))


def decode_connected_set(g: Graph, v: int, bits: str) -> frozenset[int]:
    """Replay the growth loop, reading membership answers from ``bits``."""
    if not 0 <= v < g.n:
        raise DomainError(f"root {v} is not a vertex")
    adj = g.adj_masks
    S = 1 << v
    B = 0
    nbr = adj[v]
    T = nbr & ~S
    for i, c in enumerate(bits):
        if c not in "01":
            raise DecodeError(f"invalid symbol {c!r}", i)
        if not T:
            raise DecodeError("frontier empty before the code was consumed", i)
        low = T & -T
        if c == "1":
            S |= low
            nbr |= adj[low.bit_length() - 1]
        else:
            B |= low
        T = nbr & ~S & ~B
    if T:
        raise DecodeError("code exhausted with the frontier still nonempty", len(bits))
    return _members(S)


def _enumerate_masks(g: Graph, v: int, a: int, b: int) -> Iterator[int]:
    adj = g.adj_masks
    need_ones = a - 1

    def grow(S, B, nbr, ones, zeros):
        T = nbr & ~S & ~B
        if not T:
            if ones == need_ones and zeros == b:
                yield S
            return
        if ones == need_ones:
            # only zeros remain and they cannot enlarge the frontier
            if zeros + T.bit_count() == b:
                yield S
            return
        low = T & -T
        yield from grow(S | low, B, nbr | adj[low.bit_length() - 1], ones + 1, zeros)
        if zeros < b:
            yield from grow(S, B | low, nbr, ones, zeros + 1)

    start = 1 << v
    yield from grow(start, 0, adj[v], 0, 0)


def enumerate_connected_sets(g: Graph, v: int, a: int, b: int) -> list[frozenset[int]]:
    """All connected ``A`` with ``v in A``, ``|A| = a`` and ``|N(A)| = b``.

    Depth-first over the code's decision tree, taking the 1-branch first, so
    the output order is canonical.
    """
    if a < 1 or b < 0:
        raise ParameterError("need a >= 1 and b >= 0")
    if not 0 <= v < g.n:
        raise ParameterError(f"root {v} is not a vertex")
    return [_members(S) for S in _enumerate_masks(g, v, a, b)]


def enumerate_codes(g: Graph, v: int, a: int, b: int) -> list[ConnectedSetCode]:
    return [encode_connected_set(g, A, v) for A in enumerate_connected_sets(g, v, a, b)]


def count_table(g: Graph, v: int) -> dict[tuple[int, int], int]:
    """``(a, b) -> |C(v, a, b)|`` for every nonempty class."""
    out = {}
    for a in range(1, g.n + 1):
        for b in range(0, g.n - a + 1):
            c = sum(1 for _ in _enumerate_masks(g, v, a, b))
            if c:
                out[(a, b)] = c
    return out


def bound_violations(g: Graph) -> list[tuple[int, int, int, int]]:
    """``(v, a, b, count)`` for every class whose size exceeds ``C(a+b-1, b)``.

    An empty list is the expected outcome on every graph.
    """
    bad = []
    for v in range(g.n):
        for (a, b), c in count_table(g, v).items():
            if c > code_bound(a, b):
                bad.append((v, a, b, c))
    return bad
