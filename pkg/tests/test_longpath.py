import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbgraph.errors import CapabilityError, ParameterError
from perturbgraph.graph import Graph, PerturbationParams, generate_base, perturb
from perturbgraph.longpath import default_k, long_path_blob_heuristic, longest_path_exact

from test_graph import connected_graphs


def test_exact_examples():
    assert longest_path_exact(generate_base("path", 5)).length == 4
    assert longest_path_exact(generate_base("star", 7)).length == 2
    w = longest_path_exact(generate_base("binary_tree", 15))
    assert w.length == 6 and w.vertices == (7, 3, 1, 0, 2, 5, 11)
    with pytest.raises(CapabilityError):
        longest_path_exact(generate_base("path", 21))


def _brute_longest(g):
    best = 0

    def dfs(u, seen, length):
        nonlocal best
        best = max(best, length)
        for w in g.adj[u]:
            if w not in seen:
                seen.add(w)
                dfs(w, seen, length + 1)
                seen.remove(w)

    for v in range(g.n):
        dfs(v, {v}, 0)
    return best


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_n=9))
def test_exact_matches_brute_force(g):
    w = longest_path_exact(g)
    assert w.is_valid(g) and w.length == _brute_longest(g)


def test_heuristic_path30_eps0():
    pg = perturb(generate_base("path", 30), PerturbationParams(0.0, 0))
    w = long_path_blob_heuristic(pg, 3, seed=0)
    assert w.aux_length == 9 and w.length == 29 and w.method == "blob_heuristic"


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=20), st.floats(0.1, 3), st.integers(0, 10**6), st.data())
def test_heuristic_valid_and_below_exact(g, eps, seed, data):
    pg = perturb(g, PerturbationParams(eps, seed))
    k = data.draw(st.integers(1, g.n))
    w = long_path_blob_heuristic(pg, k, seed)
    assert w.is_valid(pg.merged)
    assert w.length >= w.aux_length
    assert w.length <= longest_path_exact(pg.merged).length


def test_binary_tree_1023_linear_fraction():
    base = generate_base("binary_tree", 1023)
    k = default_k(0.8)
    lengths = [long_path_blob_heuristic(perturb(base, PerturbationParams(0.8, s)), k).length for s in range(20)]
    assert statistics.median(lengths) >= 0.02 * 1023 > 18


def test_default_k():
    assert default_k(0.5) == 8 and default_k(0.8) == 5
    with pytest.raises(ParameterError):
        default_k(0.0)


def test_fallback_single_blob():
    pg = perturb(generate_base("star", 30), PerturbationParams(0.5, 1))
    w = long_path_blob_heuristic(pg, 8, seed=1)
    assert w.method == "dfs_fallback" and w.is_valid(pg.merged) and w.length >= 2
