import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from perturbgraph.errors import CapabilityError, DomainError, ParameterError
from perturbgraph.expansion import (
    band_count,
    conductance_bands,
    conductance_profile,
    cut_stats,
    edge_isoperimetric_exact,
    expansion_profile,
    min_conductance_exact,
    sweep_cut_upper_bound,
    vertex_isoperimetric_exact,
)
from perturbgraph.graph import Graph, PerturbationParams, generate_base, perturb

from corpus import corpus
from test_graph import connected_graphs


def _brute(g, key, max_frac=0.5):
    best = None
    for s in range(1, int(max_frac * g.n) + 1):
        for S in itertools.combinations(range(g.n), s):
            st = cut_stats(g, S)
            val = Fraction(st.boundary_edges if key == "edge" else st.neighborhood, s)
            if best is None or val < best[0]:
                best = (val, frozenset(S))
    return best


def test_cut_stats_examples():
    k2 = generate_base("path", 2)
    st = cut_stats(k2, {0})
    assert (st.e_S, st.boundary_edges, st.pi_exact, st.Q_exact, st.phi_exact) == (0, 1, Fraction(1, 2), Fraction(1, 4), 1)
    st = cut_stats(generate_base("path", 3), {0, 1})
    assert (st.boundary_edges, st.e_S, st.pi_exact, st.phi_exact) == (1, 1, Fraction(3, 4), Fraction(2, 3))
    with pytest.raises(DomainError):
        cut_stats(k2, set())
    with pytest.raises(DomainError):
        cut_stats(k2, {0, 1})


def test_isoperimetric_examples():
    assert edge_isoperimetric_exact(generate_base("path", 6)) == (Fraction(1, 3), frozenset({0, 1, 2}))
    c6 = edge_isoperimetric_exact(generate_base("cycle", 6))
    assert c6.value == Fraction(2, 3) and c6.argmin == frozenset({0, 1, 2})
    assert edge_isoperimetric_exact(generate_base("complete", 4)).value == 2
    assert vertex_isoperimetric_exact(generate_base("path", 6)) == (Fraction(1, 3), frozenset({0, 1, 2}))
    star = vertex_isoperimetric_exact(generate_base("star", 6))
    assert star == (Fraction(1, 3), frozenset({1, 2, 3}))


def test_isoperimetric_capability():
    with pytest.raises(CapabilityError):
        edge_isoperimetric_exact(generate_base("path", 25))


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=10))
def test_isoperimetric_matches_brute_force(g):
    assert edge_isoperimetric_exact(g) == _brute(g, "edge")
    assert vertex_isoperimetric_exact(g) == _brute(g, "vertex")


def test_iota_at_least_c_over_delta():
    for _, g in corpus():
        if g.n < 2:
            continue
        assert vertex_isoperimetric_exact(g).value >= edge_isoperimetric_exact(g).value / g.max_degree


def test_sweep_is_upper_bound():
    for name, g in corpus():
        if g.n < 2:
            continue
        sw = sweep_cut_upper_bound(g)
        assert sw.value >= edge_isoperimetric_exact(g).value, name
        assert cut_stats(g, sw.S).boundary_edges == sw.value * len(sw.S)
    assert sweep_cut_upper_bound(generate_base("path", 6)).value == Fraction(1, 3)
    assert sweep_cut_upper_bound(generate_base("complete", 8)).value >= 4
    for seed in range(5):
        g = perturb(generate_base("path", 20), PerturbationParams(0.5, seed)).merged
        assert sweep_cut_upper_bound(g).value >= edge_isoperimetric_exact(g).value


def test_expansion_profile_examples():
    prof = dict(expansion_profile(generate_base("path", 8), 0.5))
    assert prof[4] == pytest.approx(math.log(2 * math.e) / 4)
    g = perturb(generate_base("path", 16), PerturbationParams(0.5, 3)).merged
    prof = expansion_profile(g, 0.5)
    assert all(v > 0 for _, v in prof)
    assert prof[0][1] == pytest.approx(min(g.degree(v) for v in range(16)) * math.log(math.e * 16))
    with pytest.raises(ParameterError):
        expansion_profile(g, 1.0)


def test_conductance_profile_examples():
    assert conductance_profile(generate_base("path", 2)) == {1: Fraction(1)}
    p8 = generate_base("path", 8)
    conn = conductance_profile(p8, True)
    every = conductance_profile(p8, False)
    assert conn.keys() == every.keys() == set(range(1, band_count(p8) + 1))
    assert all(conn[j] >= every[j] for j in conn)


def _brute_bands(g, connected):
    twom = 2 * g.m
    out = {}
    for j in range(1, band_count(g) + 1):
        best = Fraction(1)
        for mask in range(1, (1 << g.n) - 1):
            S = [v for v in range(g.n) if mask >> v & 1]
            if connected and not g.induced_connected(S):
                continue
            st = cut_stats(g, S)
            pi = st.pi_exact
            if Fraction(1, 2 ** (j + 1)) <= pi <= Fraction(1, 2**j):
                best = min(best, st.phi_exact)
        out[j] = best
    return out


@settings(max_examples=25, deadline=None)
@given(connected_graphs(max_n=9))
def test_conductance_profile_brute_force(g):
    assert conductance_profile(g, True) == _brute_bands(g, True)
    assert conductance_profile(g, False) == _brute_bands(g, False)
    bands = conductance_bands(g)
    for j, (v, S) in bands.items():
        if S is not None:
            assert cut_stats(g, S).phi_exact == v


def test_empty_band_is_one():
    # K_{1,7}: pi_min = 1/14 gives 4 bands; no set has pi in [1/32, 1/16]
    star = generate_base("star", 8)
    prof = conductance_profile(star)
    assert band_count(star) == 4 and prof[4] == 1


def test_min_conductance():
    g = generate_base("path", 6)
    ext = min_conductance_exact(g)
    brute = min(
        cut_stats(g, S).phi_exact
        for s in range(1, 6)
        for S in itertools.combinations(range(6), s)
        if cut_stats(g, S).pi_exact <= Fraction(1, 2)
    )
    assert ext.value == brute


def test_monotone_under_perturbation():
    for kind, n in [("path", 14), ("star", 12), ("binary_tree", 15), ("cycle", 16)]:
        g = generate_base(kind, n)
        c0 = edge_isoperimetric_exact(g).value
        i0 = vertex_isoperimetric_exact(g).value
        for seed in range(3):
            h = perturb(g, PerturbationParams(0.5, seed)).merged
            assert edge_isoperimetric_exact(h).value >= c0
            assert vertex_isoperimetric_exact(h).value >= i0
