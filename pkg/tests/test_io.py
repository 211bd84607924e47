import json

import pytest
from hypothesis import given, settings

from perturbgraph.errors import DomainError
from perturbgraph.graph import PerturbationParams, generate_base, perturb
from perturbgraph.io import (
    format_edge_list,
    parse_edge_list,
    perturbed_from_dict,
    perturbed_to_dict,
    read_edge_list,
    read_graph,
    write_edge_list,
    write_json,
)

from test_graph import graphs


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=15))
def test_edge_list_round_trip(g):
    assert parse_edge_list(format_edge_list(g)) == g


def test_file_round_trip(tmp_path):
    g = generate_base("grid", 12)
    write_edge_list(g, tmp_path / "g.el")
    assert (tmp_path / "g.el").read_text() == "12 17\n" + "".join(f"{u} {v}\n" for u, v in g.edges())
    assert read_edge_list(tmp_path / "g.el") == g


@pytest.mark.parametrize(
    "text",
    ["", "3 1\n1 1\n", "3 2\n0 1\n0 1\n", "3 1\n2 1\n", "3 2\n0 1\n", "3 1\n0 5\n", "3 x\n"],
)
def test_reader_rejects(text):
    with pytest.raises(DomainError):
        parse_edge_list(text)


def test_perturbed_json_round_trip(tmp_path):
    pg = perturb(generate_base("cycle", 40), PerturbationParams(1.5, 77))
    d = perturbed_to_dict(pg)
    write_json(d, tmp_path / "p.json")
    back = perturbed_from_dict(json.loads((tmp_path / "p.json").read_text()))
    assert back.base == pg.base and back.merged == pg.merged
    assert back.random_edges == pg.random_edges and back.seed == 77
    assert read_graph(tmp_path / "p.json") == pg.merged
