import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from perturbgraph.errors import CapabilityError, DomainError
from perturbgraph.expansion import cut_stats
from perturbgraph.graph import Graph, PerturbationParams, generate_base, perturb
from perturbgraph.walks import (
    analyze_walk,
    empirical_mixing_estimate,
    flow,
    mixing_bounds,
    mixing_details,
    mixing_time_exact,
    stationary,
    stationary_exact,
    transition_matrix,
    tv_distance,
    tv_trajectory,
)

from corpus import walkable
from test_graph import connected_graphs


def _mix_oracle(g, t_max=10**5):
    # plain repeated multiplication, first t with worst TV <= 1/4
    P = transition_matrix(g)
    pi = stationary(g)
    Pt = np.eye(g.n)
    for t in range(1, t_max):
        Pt = Pt @ P
        if 0.5 * np.abs(Pt - pi).sum(axis=1).max() <= 0.25 - 1e-9:
            return t
    raise AssertionError


def test_stationary_examples():
    assert stationary_exact(generate_base("path", 3)) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    assert np.allclose(stationary(generate_base("cycle", 7)), 1 / 7)
    s = stationary_exact(generate_base("star", 5))
    assert s[0] == Fraction(1, 2) and all(x == Fraction(1, 8) for x in s[1:])
    with pytest.raises(DomainError):
        stationary(Graph.from_edges(4, [(0, 1), (2, 3)]))


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_n=15))
def test_operator_invariants(g):
    P = transition_matrix(g)
    pi = stationary(g)
    assert np.allclose(P.sum(axis=1), 1, atol=1e-12, rtol=0)
    assert np.all(np.diag(P) == 0.5)
    F = pi[:, None] * P
    assert np.allclose(F, F.T, atol=1e-12, rtol=0)
    assert np.abs(pi @ P - pi).sum() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=8))
def test_tv_half_l1_equals_max_over_sets(g):
    P = transition_matrix(g)
    pi = stationary(g)
    x = P[0] @ P
    best = max(
        abs(x[list(A)].sum() - pi[list(A)].sum())
        for r in range(g.n + 1)
        for A in itertools.combinations(range(g.n), r)
    )
    assert tv_distance(x, pi) == pytest.approx(best, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=12))
def test_flow_matches_cut_stats(g):
    P = transition_matrix(g)
    rng = np.random.default_rng(g.n)
    for _ in range(5):
        S = [v for v in range(g.n) if rng.random() < 0.5]
        if 0 < len(S) < g.n:
            Sc = [v for v in range(g.n) if v not in S]
            assert flow(g, S, P) == pytest.approx(cut_stats(g, S).Q_S, abs=1e-14)
            assert flow(g, S, P) == pytest.approx(flow(g, Sc, P), abs=1e-14)


def test_trajectory_monotone():
    for kind, n in [("path", 12), ("two_clique_bridge", 10), ("star", 9), ("binary_tree", 15)]:
        d = tv_trajectory(generate_base(kind, n), 300)
        assert all(b <= a + 1e-12 for a, b in zip(d, d[1:]))


def test_mixing_examples():
    assert mixing_time_exact(generate_base("path", 2)) == 1
    det = mixing_details(generate_base("path", 3))
    # d(1) is exactly 1/4, so the guarded rule reports t = 2 and flags it
    assert det.t_mix == 2 and det.boundary and det.tv_before == pytest.approx(0.25)
    assert mixing_time_exact(generate_base("path", 16)) == 86
    assert mixing_time_exact(generate_base("two_clique_bridge", 16)) == 50


def test_complete_graph_mixing_oracle():
    # after one lazy step only the start vertex is above 1/n, by 1/2 - 1/n
    assert mixing_time_exact(generate_base("complete", 2)) == 1
    for n in (4, 8, 16):
        assert mixing_time_exact(generate_base("complete", n)) == 2
        d1 = tv_trajectory(generate_base("complete", n), 1)[1]
        assert d1 == pytest.approx(0.5 - 1 / n)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=14))
def test_mixing_matches_plain_iteration(g):
    assert mixing_time_exact(g) == _mix_oracle(g)


def test_mixing_bounds_examples():
    mb = mixing_bounds(generate_base("path", 2))
    assert mb.fr_sum == 1 and mb.js_value == pytest.approx(math.log(2)) and mb.exact
    pg = perturb(generate_base("path", 16), PerturbationParams(0.5, 1)).merged
    assert mixing_time_exact(pg) <= 10 * mixing_bounds(pg).fr_sum


def test_fr_sum_at_least_subunit_band_count():
    for _, g in walkable():
        mb = mixing_bounds(g)
        assert mb.fr_sum >= sum(1 for v in mb.bands.values() if v < 1)
        assert mixing_time_exact(g) >= 1


def test_mixing_bounds_approximate_mode():
    g = perturb(generate_base("path", 200), PerturbationParams(0.5, 2)).merged
    mb = mixing_bounds(g)
    assert not mb.exact and mb.fr_sum > 0 and mb.js_value > 0
    with pytest.raises(CapabilityError):
        mixing_bounds(g, exact=True)


def test_analyze_walk():
    wa = analyze_walk(generate_base("star", 5))
    assert wa.pi_min == pytest.approx(1 / 8) and wa.t_mix >= 1 and wa.flags["bounds_exact"]


def test_empirical_estimate_k2_and_path64():
    est = empirical_mixing_estimate(generate_base("path", 2), 10**4, 100, seed=3)
    assert est.status == "mixed" and est.estimate == 1
    g = generate_base("path", 64)
    exact = mixing_time_exact(g)
    est = empirical_mixing_estimate(g, 10**4, 10**6, seed=1)
    assert est.status == "mixed" and exact / 2 <= est.estimate <= 2 * exact
    again = empirical_mixing_estimate(g, 10**4, 10**6, seed=1)
    assert again == est


def test_empirical_not_mixed_by_horizon():
    est = empirical_mixing_estimate(generate_base("path", 64), 1000, 10, seed=0)
    assert est.status == "not mixed by horizon" and est.estimate is None
