import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbgraph.blobs import auxiliary_blob_graph, blob_partition, check_partition
from perturbgraph.errors import DomainError, ParameterError
from perturbgraph.graph import Graph, PerturbationParams, generate_base, perturb

from test_graph import connected_graphs


def test_path10_k3():
    part = blob_partition(generate_base("path", 10), 3)
    assert part.blobs[0] == (7, 8, 9)
    assert all(3 <= len(b) <= 6 for b in part.blobs)
    assert check_partition(generate_base("path", 10), part) == []


def test_k1_singletons():
    g = generate_base("grid", 20)
    part = blob_partition(g, 1)
    assert part.t == 20 and all(len(b) == 1 for b in part.blobs)


def test_binary_tree_k2():
    g = generate_base("binary_tree", 15)
    part = blob_partition(g, 2)
    assert all(2 <= len(b) <= 6 for b in part.blobs) and check_partition(g, part) == []


def test_errors():
    with pytest.raises(ParameterError):
        blob_partition(generate_base("path", 5), 6)
    with pytest.raises(ParameterError):
        blob_partition(generate_base("path", 5), 0)
    with pytest.raises(DomainError):
        blob_partition(Graph.from_edges(4, [(0, 1), (2, 3)]), 2)


@settings(max_examples=200, deadline=None)
@given(connected_graphs(max_n=40), st.data())
def test_partition_invariants(g, data):
    k = data.draw(st.integers(1, g.n))
    part = blob_partition(g, k)
    assert check_partition(g, part) == []


def test_auxiliary_path9():
    g = generate_base("path", 9)
    pg = perturb(g, PerturbationParams(0.0, 0))
    part = blob_partition(g, 3)
    assert sorted(part.blobs) == [(0, 1, 2), (3, 4, 5), (6, 7, 8)]
    aux = auxiliary_blob_graph(pg, part)
    assert aux.graph.m == 2 and aux.graph.is_connected() and max(aux.graph.degrees) == 2


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_n=30), st.integers(0, 1000), st.data())
def test_auxiliary_monotone_and_witnesses(g, seed, data):
    k = data.draw(st.integers(1, g.n))
    part = blob_partition(g, k)
    pg = perturb(g, PerturbationParams(1.0, seed))
    plain = auxiliary_blob_graph(g, part)
    aux = auxiliary_blob_graph(pg, part)
    assert plain.graph.is_connected()
    assert plain.graph.edge_set <= aux.graph.edge_set
    for (i, j) in aux.graph.edges():
        u, v = aux.witness(i, j)
        assert pg.merged.has_edge(u, v) and part.blob_of[u] == i and part.blob_of[v] == j
        assert aux.witness(j, i) == (v, u)
