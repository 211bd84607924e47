"""Lazy random walk: stationary law, exact mixing time, conductance bounds.

The lazy walk stays put with probability 1/2 and otherwise moves to a
uniform neighbor.  Mixing time is the first ``t`` at which the worst
starting distribution is within total variation 1/4 of stationarity.  The
worst start can always be taken to be a point mass: ``x -> d_TV(x P^t, pi)``
is convex, so its maximum over the simplex is attained at a vertex.

Floating-point guard: ``t_mix`` is the first ``t`` whose worst-case distance
is at most ``1/4 - TV_GUARD``; if the distance at ``t`` or ``t - 1`` lies
within ``TV_GUARD`` of 1/4 the result carries ``boundary=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import CapabilityError, DomainError, ParameterError
from .expansion import (
    CONNECTED_MAX_N,
    conductance_profile,
    min_conductance_exact,
    sweep_conductance,
)
from .graph import Graph, farthest_pair, key_of, rng_for

DENSE_MAX_N = 4096
MIX_THRESHOLD = 0.25
TV_GUARD = 1e-9


def _require_walkable(g: Graph):
    if g.n < 1 or g.m < 1:
        raise DomainError("walk needs a graph with at least one edge")
    if not g.is_connected():
        raise DomainError("walk needs a connected graph")


def stationary(g: Graph) -> np.ndarray:
    """``pi(u) = deg(u) / 2m``."""
    _require_walkable(g)
    return g.degrees / (2.0 * g.m)


def stationary_exact(g: Graph) -> list[Fraction]:
    _require_walkable(g)
    return [Fraction(int(d), 2 * g.m) for d in g.degrees]


def transition_matrix(g: Graph) -> np.ndarray:
    """Dense lazy transition matrix: ``P[u,u] = 1/2``, ``P[u,v] = 1/(2 deg u)``."""
    _require_walkable(g)
    if g.n > DENSE_MAX_N:
        raise CapabilityError(f"dense transition matrix needs n <= {DENSE_MAX_N} (got n={g.n})")
    P = np.zeros((g.n, g.n))
    for u, nbrs in enumerate(g.adj):
        if nbrs:
            P[u, list(nbrs)] = 0.5 / len(nbrs)
        P[u, u] = 0.5
    return P


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def flow(g: Graph, S: Iterable[int], P: np.ndarray | None = None) -> float:
    """``Q(S) = sum_{u in S, v not in S} pi(u) P(u, v)`` from the matrix."""
    if P is None:
        P = transition_matrix(g)
    pi = stationary(g)
    inside = np.zeros(g.n, dtype=bool)
    inside[list(S)] = True
    return float((pi[inside, None] * P[np.ix_(inside, ~inside)]).sum())


def _worst_tv(Pt: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(Pt - pi).sum(axis=1).max())


def tv_trajectory(g: Graph, t_max: int) -> list[float]:
    """Worst-case distance ``d(t)`` for ``t = 0..t_max`` by repeated multiplication."""
    P = transition_matrix(g)
    pi = stationary(g)
    Pt = np.eye(g.n)
    out = [_worst_tv(Pt, pi)]
    for _ in range(t_max):
        Pt = Pt @ P
        out.append(_worst_tv(Pt, pi))
    return out


@dataclass(frozen=True)
class MixingResult:
    t_mix: int
    tv_at: float
    tv_before: float
    boundary: bool


def mixing_details(g: Graph) -> MixingResult:
    """Exact mixing time with the distances on either side of it.

    Worst-case distance is non-increasing in ``t``, so the first good ``t`` is
    located by squaring ``P`` until a good power appears and then binary
    searching with the stored powers.
    """
    if g.n > DENSE_MAX_N:
        raise CapabilityError(
            f"exact mixing time needs n <= {DENSE_MAX_N} (got n={g.n}); "
            "use mixing_bounds or empirical_mixing_estimate"
        )
    P = transition_matrix(g)
    pi = stationary(g)
    target = MIX_THRESHOLD - TV_GUARD
    d0 = _worst_tv(np.eye(g.n), pi)
    if d0 <= target:
        # only possible for a single vertex, which has no edge and is rejected above
        return MixingResult(0, d0, d0, False)
    powers = [P]
    dists = [_worst_tv(P, pi)]
    while dists[-1] > target:
        if len(powers) > 60:
            raise CapabilityError("walk did not mix within 2^60 steps")
        Q = powers[-1] @ powers[-1]
        powers.append(Q)
        dists.append(_worst_tv(Q, pi))
    k = len(powers) - 1
    if k == 0:
        lo, d_lo, d_hi = 0, d0, dists[0]
    else:
        lo, cur, d_lo = 1 << (k - 1), powers[k - 1], dists[k - 1]
        d_hi = dists[k]
        for i in range(k - 2, -1, -1):
            cand = cur @ powers[i]
            d = _worst_tv(cand, pi)
            if d > target:
                lo += 1 << i
                cur, d_lo = cand, d
        if lo + 1 != 1 << k:
            d_hi = _worst_tv(cur @ P, pi)
    boundary = abs(d_lo - MIX_THRESHOLD) <= TV_GUARD or abs(d_hi - MIX_THRESHOLD) <= TV_GUARD
    return MixingResult(lo + 1, d_hi, d_lo, boundary)


def mixing_time_exact(g: Graph) -> int:
    return mixing_details(g).t_mix


@dataclass(frozen=True)
class MixingBounds:
    fr_sum: float
    js_value: float
    exact: bool
    phi_min: float
    bands: dict = field(default_factory=dict)


def mixing_bounds(g: Graph, exact: bool | None = None) -> MixingBounds:
    """Conductance-profile sum and the global-conductance bound.

    ``fr_sum = sum_j Phi(2^-j)^-2`` over connected-set bands and
    ``js_value = log(n) / Phi_min^2``.  Exact when ``n`` allows exhaustive
    connected-set scans (or when forced); otherwise both come from spectral
    sweep prefixes and ``exact`` is False.
    """
    _require_walkable(g)
    if exact is None:
        exact = g.n <= CONNECTED_MAX_N
    if exact:
        if g.n > CONNECTED_MAX_N:
            raise CapabilityError(f"exact conductance bounds need n <= {CONNECTED_MAX_N} (got n={g.n})")
        bands = conductance_profile(g, restrict_connected=True)
        phi_min = min_conductance_exact(g).value
    else:
        phi_min, bands, _ = sweep_conductance(g)
    fr = float(sum(1 / (phi * phi) for phi in bands.values()))
    js = math.log(g.n) / float(phi_min) ** 2
    return MixingBounds(fr, js, exact, float(phi_min), {j: float(v) for j, v in bands.items()})


@dataclass(frozen=True)
class WalkAnalysis:
    pi: np.ndarray
    pi_min: float
    t_mix: int
    fr_sum: float
    js_value: float
    flags: dict


def analyze_walk(g: Graph) -> WalkAnalysis:
    pi = stationary(g)
    det = mixing_details(g)
    mb = mixing_bounds(g)
    flags = {"boundary": det.boundary, "bounds_exact": mb.exact}
    return WalkAnalysis(pi, float(pi.min()), det.t_mix, mb.fr_sum, mb.js_value, flags)


# sampling estimate ------------------------------------------------------------


def _checkpoints(horizon: int) -> list[int]:
    out = list(range(1, min(horizon, 64) + 1))
    t = 64
    while t < horizon:
        t = min(horizon, max(t + 1, int(math.ceil(t * 1.05))))
        out.append(t)
    return out


@dataclass(frozen=True)
class EmpiricalEstimate:
    estimate: int | None
    status: str
    starts: tuple[int, ...]
    tv_at_estimate: float | None
    noise_floor: float
    checkpoints: list = field(default_factory=list)

    def note(self) -> str:
        return (
            "sampling estimate, not exact: empirical TV is biased upward by roughly "
            f"{self.noise_floor:.3g} at stationarity and checkpoints are spaced up to 5% apart"
        )


def empirical_mixing_estimate(g: Graph, walkers: int, horizon: int, seed: int) -> EmpiricalEstimate:
    """Estimate the mixing time by simulating lazy walks.

    Walkers are split between the two ends of a double-BFS far pair (the
    likely worst starts).  At each checkpoint the empirical law of each
    start's walkers is compared with ``pi``; the estimate is the first
    checkpoint at which every start is within 1/4.
    """
    _require_walkable(g)
    if walkers < 1 or horizon < 1:
        raise ParameterError("walkers and horizon must be positive")
    a, b = farthest_pair(g)
    starts = (a,) if a == b else (a, b)
    pi = stationary(g)
    indptr, indices = g.csr
    deg = g.degrees
    per = [walkers // len(starts) + (1 if i < walkers % len(starts) else 0) for i in range(len(starts))]
    pos = [np.full(w, s, dtype=np.int64) for w, s in zip(per, starts)]
    rngs = [rng_for(seed, key_of("walk"), i) for i in range(len(starts))]
    noise = max(0.5 * float(np.sqrt(2 * pi * (1 - pi) / (math.pi * w)).sum()) for w in per)
    trace = []
    t = 0
    for cp in _checkpoints(horizon):
        while t < cp:
            for i in range(len(starts)):
                x = pos[i]
                stay = rngs[i].random(x.size) < 0.5
                u = rngs[i].random(x.size)
                step = indices[indptr[x] + (u * deg[x]).astype(np.int64)]
                pos[i] = np.where(stay, x, step)
            t += 1
        tv = max(tv_distance(np.bincount(x, minlength=g.n) / x.size, pi) for x in pos)
        trace.append((cp, tv))
        if tv <= MIX_THRESHOLD:
            return EmpiricalEstimate(cp, "mixed", starts, tv, noise, trace)
    return EmpiricalEstimate(None, "not mixed by horizon", starts, None, noise, trace)
