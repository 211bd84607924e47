"""Isoperimetric quantities: cut statistics, exact c(G) and iota(G),
expansion and conductance profiles, and a spectral sweep upper bound.

Exact routines scan every vertex subset.  Subsets are the integers
``0..2^n-1`` (bit ``v`` = vertex ``v``) and per-subset quantities are built by
doubling: the table for ``[2^i, 2^(i+1))`` is the table for ``[0, 2^i)``
updated with vertex ``i``, an O(1) vectorized update per subset.  Conductance
comparisons are done in exact rational arithmetic so band edges and ties are
never decided by rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from .errors import CapabilityError, DomainError, ParameterError
from .graph import Graph, rng_for

EXHAUSTIVE_MAX_N = 24
CONNECTED_MAX_N = 18
SWEEP_MAX_ITER = 10_000
SWEEP_TOL = 1e-10


class Extremum(NamedTuple):
    value: Fraction
    argmin: frozenset


@dataclass(frozen=True)
class CutStats:
    S: frozenset
    size: int
    e_S: int
    boundary_edges: int
    neighborhood: int
    pi_S: float
    Q_S: float
    phi_S: float
    m: int

    @property
    def volume(self) -> int:
        return 2 * self.e_S + self.boundary_edges

    @property
    def pi_exact(self) -> Fraction:
        return Fraction(self.volume, 2 * self.m)

    @property
    def Q_exact(self) -> Fraction:
        return Fraction(self.boundary_edges, 4 * self.m)

    @property
    def phi_exact(self) -> Fraction:
        pi = self.pi_exact
        return self.Q_exact / (pi * (1 - pi))

    @property
    def phi_alt(self) -> float:
        """Conductance as ``|dS| / (2 (2e(S) + |dS|) pi(S^c))``."""
        return self.boundary_edges / (2.0 * self.volume * (1.0 - self.pi_S))

    def as_dict(self) -> dict:
        return {
            "S": sorted(self.S),
            "size": self.size,
            "e_S": self.e_S,
            "boundary_edges": self.boundary_edges,
            "neighborhood": self.neighborhood,
            "pi_S": self.pi_S,
            "Q_S": self.Q_S,
            "phi_S": self.phi_S,
        }


def cut_stats(g: Graph, S: Iterable[int]) -> CutStats:
    S = frozenset(S)
    if not S or len(S) >= g.n:
        raise DomainError("cut_stats needs a nonempty proper subset")
    if any(not 0 <= v < g.n for v in S):
        raise DomainError("set contains a vertex outside the graph")
    e_in = 0
    boundary = 0
    nbhd = set()
    for u in S:
        for w in g.adj[u]:
            if w in S:
                e_in += 1
            else:
                boundary += 1
                nbhd.add(w)
    e_in //= 2
    m = g.m
    vol = 2 * e_in + boundary
    pi = vol / (2 * m)
    Q = boundary / (4 * m)
    phi = Q / (pi * (1 - pi)) if 0 < pi < 1 else math.inf
    return CutStats(S, len(S), e_in, boundary, len(nbhd), pi, Q, phi, m)


# all-subset tables ----------------------------------------------------------


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x)


class SubsetTable:
    """Per-subset size, edge count, volume and neighborhood arrays."""

    def __init__(self, g: Graph, limit: int = EXHAUSTIVE_MAX_N):
        if g.n > limit:
            raise CapabilityError(
                f"exact scan needs n <= {limit} (got n={g.n}); use sweep_cut_upper_bound for large graphs"
            )
        self.g = g
        self.n = g.n
        self.adj = [int(x) for x in g.adj_masks]

    @cached_property
    def masks(self) -> np.ndarray:
        return np.arange(1 << self.n, dtype=np.uint32)

    @cached_property
    def size(self) -> np.ndarray:
        return _popcount(self.masks).astype(np.int16)

    @cached_property
    def inner(self) -> np.ndarray:
        e = np.zeros(1 << self.n, dtype=np.int16)
        masks = self.masks
        for i in range(self.n):
            lo = 1 << i
            e[lo:2 * lo] = e[:lo] + _popcount(masks[:lo] & np.uint32(self.adj[i] & (lo - 1)))
        return e

    @cached_property
    def volume(self) -> np.ndarray:
        v = np.zeros(1 << self.n, dtype=np.int16)
        deg = self.g.degrees
        for i in range(self.n):
            lo = 1 << i
            v[lo:2 * lo] = v[:lo] + int(deg[i])
        return v

    @cached_property
    def boundary(self) -> np.ndarray:
        return self.volume - 2 * self.inner

    @cached_property
    def nbr(self) -> np.ndarray:
        """Union of neighborhoods (may include members of the set)."""
        out = np.zeros(1 << self.n, dtype=np.uint32)
        for i in range(self.n):
            lo = 1 << i
            out[lo:2 * lo] = out[:lo] | np.uint32(self.adj[i])
        return out

    @cached_property
    def neighborhood(self) -> np.ndarray:
        return _popcount(self.nbr & ~self.masks).astype(np.int16)

    @cached_property
    def connected(self) -> np.ndarray:
        masks = self.masks
        nbr = self.nbr
        reach = masks & (~masks + np.uint32(1))
        while True:
            nxt = (reach | nbr[reach]) & masks
            if np.array_equal(nxt, reach):
                break
            reach = nxt
        conn = reach == masks
        conn[0] = False
        return conn


def _members(mask: int) -> frozenset:
    return frozenset(v for v in range(mask.bit_length()) if mask >> v & 1)


def _lex_least(cands: np.ndarray) -> int:
    """Candidate with the fewest vertices, then the lexicographically least
    sorted vertex tuple."""
    cands = np.asarray(cands, dtype=np.uint32)
    sizes = _popcount(cands)
    orig = cands[sizes == sizes.min()]
    rest = orig.copy()
    while orig.size > 1:
        low = rest & (~rest + np.uint32(1))
        keep = low == low.min()
        orig, rest = orig[keep], rest[keep] ^ low[keep]
    return int(orig[0])


def _require_connected(g: Graph):
    if not g.is_connected():
        raise DomainError("graph must be connected")


def _isoperimetric(g: Graph, numer_name: str, max_frac: float) -> Extremum:
    if not 0 < max_frac <= 1:
        raise ParameterError("max_frac must lie in (0, 1]")
    if g.n > EXHAUSTIVE_MAX_N:
        raise CapabilityError(
            f"exact isoperimetric number needs n <= {EXHAUSTIVE_MAX_N} (got n={g.n}); "
            "use sweep_cut_upper_bound instead"
        )
    _require_connected(g)
    smax = int(math.floor(max_frac * g.n + 1e-12))
    if smax < 1:
        raise ParameterError("max_frac * n must allow at least one vertex")
    tab = SubsetTable(g)
    numer = getattr(tab, numer_name)
    size = tab.size
    best: tuple[Fraction, int, int] | None = None
    for s in range(1, smax + 1):
        sel = size == s
        b = int(numer[sel].min())
        val = Fraction(b, s)
        if best is None or val < best[0]:
            best = (val, s, b)
    val, s, b = best
    cands = tab.masks[(size == s) & (numer == b)]
    return Extremum(val, _members(_lex_least(cands)))


def edge_isoperimetric_exact(g: Graph, max_frac: float = 0.5) -> Extremum:
    """``min |dS|/|S|`` over ``0 < |S| <= max_frac * n`` with a witness set.

    Ties go to the smallest ``|S|``, then the lexicographically least set.
    """
    return _isoperimetric(g, "boundary", max_frac)


def vertex_isoperimetric_exact(g: Graph, max_frac: float = 0.5) -> Extremum:
    """``min |N(S)|/|S|`` over ``0 < |S| <= max_frac * n``; ties as above."""
    return _isoperimetric(g, "neighborhood", max_frac)


def expansion_profile(g: Graph, alpha: float) -> list[tuple[int, float]]:
    """``(s, min_{|S|=s} |dS| log(e n / s) / s)`` for ``s = 1..floor(alpha n)``."""
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    if g.n > EXHAUSTIVE_MAX_N:
        raise CapabilityError(f"expansion_profile needs n <= {EXHAUSTIVE_MAX_N} (got n={g.n})")
    _require_connected(g)
    tab = SubsetTable(g)
    out = []
    for s in range(1, int(math.floor(alpha * g.n + 1e-12)) + 1):
        b = int(tab.boundary[tab.size == s].min())
        out.append((s, b * math.log(math.e * g.n / s) / s))
    return out


# conductance ------------------------------------------------------------------


def band_count(g: Graph) -> int:
    """``ceil(log2(1/pi_min))`` computed in integers."""
    two_m = 2 * g.m
    dmin = int(g.degrees.min())
    j = 0
    while (dmin << j) < two_m:
        j += 1
    return j


def _min_phi(boundary: np.ndarray, vol: np.ndarray, masks: np.ndarray, two_m: int):
    """Exact minimum of ``|dS| * 2m / (2 vol (2m - vol))`` and its lex-least witness."""
    b = boundary.astype(np.float64)
    v = vol.astype(np.float64)
    phi = b * two_m / (2.0 * v * (two_m - v))
    lo = phi.min()
    near = phi <= lo * (1 + 1e-9) + 1e-15
    cb, cv, cm = boundary[near], vol[near], masks[near]
    vals = [Fraction(int(x) * two_m, 2 * int(y) * (two_m - int(y))) for x, y in zip(cb, cv)]
    best = min(vals)
    keep = np.array([x == best for x in vals])
    return best, _members(_lex_least(cm[keep]))


def conductance_profile(g: Graph, restrict_connected: bool = True) -> dict[int, Fraction]:
    """``j -> Phi(2^-j)`` for ``j = 1..ceil(log2(1/pi_min))``.

    ``Phi(p)`` is the least conductance of a (connected, when requested) set
    with ``p/2 <= pi(S) <= p``, both ends inclusive, and 1 when no set falls
    in the band.  The last band may be partial when ``pi_min`` is not a power
    of two.
    """
    return {j: phi for j, (phi, _) in conductance_bands(g, restrict_connected).items()}


def conductance_bands(g: Graph, restrict_connected: bool = True) -> dict[int, tuple[Fraction, frozenset | None]]:
    """Like :func:`conductance_profile` but also returns a minimizing set."""
    limit = CONNECTED_MAX_N if restrict_connected else EXHAUSTIVE_MAX_N
    if g.n > limit:
        raise CapabilityError(f"conductance_profile needs n <= {limit} (got n={g.n})")
    _require_connected(g)
    tab = SubsetTable(g, limit)
    two_m = 2 * g.m
    vol = tab.volume.astype(np.int64)
    ok = tab.connected if restrict_connected else np.ones(vol.size, dtype=bool)
    ok = ok & (vol > 0)
    out = {}
    for j in range(1, band_count(g) + 1):
        # p/2 <= vol/2m <= p with p = 2^-j
        sel = ok & ((vol << (j + 1)) >= two_m) & ((vol << j) <= two_m)
        if not sel.any():
            out[j] = (Fraction(1), None)
            continue
        out[j] = _min_phi(tab.boundary[sel], tab.volume[sel], tab.masks[sel], two_m)
    return out


def min_conductance_exact(g: Graph) -> Extremum:
    """Least ``Phi(S)`` over nonempty ``S`` with ``pi(S) <= 1/2``."""
    if g.n > EXHAUSTIVE_MAX_N:
        raise CapabilityError(f"exact conductance needs n <= {EXHAUSTIVE_MAX_N} (got n={g.n})")
    _require_connected(g)
    tab = SubsetTable(g)
    two_m = 2 * g.m
    vol = tab.volume.astype(np.int64)
    sel = (vol > 0) & (2 * vol <= two_m)
    phi, S = _min_phi(tab.boundary[sel], tab.volume[sel], tab.masks[sel], two_m)
    return Extremum(phi, S)


# spectral sweep ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    value: Fraction
    S: frozenset
    converged: bool
    iterations: int


def fiedler_order(g: Graph, seed: int = 0) -> tuple[np.ndarray, bool, int]:
    """Vertices sorted by an approximate second eigenvector.

    Power iteration on the lazy normalized adjacency ``(I + D^-1/2 A D^-1/2)/2``
    (spectrum in [0, 1]) with the top eigenvector ``sqrt(deg)`` projected out
    at every step.  Returns ``(order, converged, iterations)``.
    """
    from scipy import sparse

    _require_connected(g)
    n = g.n
    indptr, indices = g.csr
    deg = g.degrees.astype(np.float64)
    A = sparse.csr_matrix((np.ones(indices.size), indices, indptr), shape=(n, n))
    dinv = 1.0 / np.sqrt(deg)
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)
    x = rng_for(seed, n).standard_normal(n)
    x -= top * (top @ x)
    x /= np.linalg.norm(x)
    converged = False
    it = 0
    for it in range(1, SWEEP_MAX_ITER + 1):
        y = 0.5 * (x + dinv * (A @ (dinv * x)))
        y -= top * (top @ y)
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        y /= norm
        delta = np.linalg.norm(y - x)
        x = y
        if delta < SWEEP_TOL:
            converged = True
            break
    f = dinv * x
    return np.argsort(f, kind="stable"), converged, it


def _prefix_scan(g: Graph, order: Iterable[int], smax: int):
    """Yield ``(size, boundary, volume, members)`` for growing prefixes."""
    inside = np.zeros(g.n, dtype=bool)
    boundary = 0
    vol = 0
    members = []
    for v in order:
        v = int(v)
        k = sum(1 for w in g.adj[v] if inside[w])
        boundary += len(g.adj[v]) - 2 * k
        vol += len(g.adj[v])
        inside[v] = True
        members.append(v)
        yield len(members), boundary, vol, members
        if len(members) >= smax:
            return


def sweep_cut_upper_bound(g: Graph, seed: int = 0) -> SweepResult:
    """Best prefix cut ``|dS|/|S|`` (``|S| <= n/2``) along the spectral order.

    Both ends of the order are scanned.  The value is always >= c(G) because
    it is attained by an actual set; ``converged`` is False when the power
    iteration hit its cap, in which case the best scanned cut is still
    returned.
    """
    if g.n < 2:
        raise DomainError("sweep cut needs at least two vertices")
    order, converged, it = fiedler_order(g, seed)
    smax = g.n // 2
    best = None
    for seq in (order, order[::-1]):
        for s, b, _, members in _prefix_scan(g, seq, smax):
            key = (Fraction(b, s), s, tuple(sorted(members)))
            if best is None or key < best:
                best = key
    return SweepResult(best[0], frozenset(best[2]), converged, it)


def sweep_conductance(g: Graph, seed: int = 0) -> tuple[Fraction, dict[int, Fraction], bool]:
    """Approximate conductance data from sweep prefixes.

    Returns ``(phi_min, bands, converged)``: the least prefix conductance with
    ``pi(S) <= 1/2`` and the least prefix conductance in each band (1 for
    bands no prefix reaches).  Prefixes need not be connected, so these are
    estimates and never exact values.
    """
    order, converged, _ = fiedler_order(g, seed)
    two_m = 2 * g.m
    nb = band_count(g)
    bands = {j: Fraction(1) for j in range(1, nb + 1)}
    phi_min = None
    for seq in (order, order[::-1]):
        for _, b, vol, _ in _prefix_scan(g, seq, g.n):
            if 2 * vol > two_m:
                break
            phi = Fraction(b * two_m, 2 * vol * (two_m - vol))
            if phi_min is None or phi < phi_min:
                phi_min = phi
            for j in range(1, nb + 1):
                if (vol << (j + 1)) >= two_m and (vol << j) <= two_m and phi < bands[j]:
                    bands[j] = phi
    return phi_min, bands, converged
