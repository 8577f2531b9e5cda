import json
import random

import pytest

from flowframe.domain import BUILTIN, HARRIS, PATH_COUNT, SHORTEST_PATH, make_product_domain
from flowframe.errors import InputError
from flowframe.generators import random_flow_graph, random_interface
from flowframe.graph import solve_flow
from flowframe.interface import interface_of
from flowframe.multiset import INF, Multiset
from flowframe.serialize import (
    decode_domain,
    decode_edge,
    decode_graph,
    decode_interface,
    decode_value,
    dumps,
    encode_domain,
    encode_graph,
    encode_interface,
    encode_value,
    load_json,
)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_graph_round_trip(name):
    d = BUILTIN[name]
    rng = random.Random(name)
    for _ in range(25):
        h = random_flow_graph(d, rng, max_nodes=5)
        j = json.loads(dumps(encode_graph(h.graph, h.inflow, h.flow)))
        back = decode_graph(j)
        assert back.graph == h.graph
        assert back.flow == dict(h.flow)
        assert {n: back.inflow.get(n, d.zero) for n in h.nodes} == dict(h.inflow)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_interface_round_trip(name):
    d = BUILTIN[name]
    rng = random.Random(name)
    for _ in range(25):
        i = random_interface(d, rng, ["a", "b", "c", "d"])
        assert decode_interface(json.loads(dumps(encode_interface(i)))) == i


def test_nested_product_domain():
    d = make_product_domain(HARRIS, PATH_COUNT)
    assert decode_domain(encode_domain(d)) == d
    assert decode_domain("path_count") is PATH_COUNT


def test_infinite_costs_survive_json():
    v = Multiset([INF, 2, 2])
    j = json.loads(dumps(encode_value(SHORTEST_PATH, v)))
    assert decode_value(SHORTEST_PATH, j) == v


def test_encoding_is_canonical():
    h = random_flow_graph(PATH_COUNT, random.Random(5), max_nodes=5, min_nodes=3)
    a = dumps(encode_graph(h.graph, h.inflow, h.flow))
    b = dumps(encode_graph(decode_graph(json.loads(a)).graph, h.inflow, h.flow))
    assert a == b


@pytest.mark.parametrize("bad", [
    [],
    {"nodes": ["a"]},
    {"domain": "path_count", "nodes": ["a", "a"]},
    {"domain": "path_count", "nodes": ["a"], "extra": 1},
    {"domain": "nonsense", "nodes": []},
    {"domain": "path_count", "nodes": ["a"], "edges": [{"from": "a"}]},
    {"domain": "path_count", "nodes": ["a"], "edges": [{"from": "a", "to": "b"}, {"from": "a", "to": "b"}]},
    {"domain": "path_count", "nodes": ["a"], "inflow": {"a": -2}},
    {"domain": "path_count", "nodes": ["a"], "inflow": {"z": 1}},
    {"domain": {"kind": "product", "factors": [{"kind": "path_count"}]}, "nodes": []},
])
def test_malformed_graph_files(bad):
    with pytest.raises(InputError):
        f = decode_graph(bad)
        # unknown inflow nodes are caught when the flow graph is built
        solve_flow(f.graph, f.inflow)


def test_malformed_values_and_edges():
    with pytest.raises(InputError):
        decode_value(HARRIS, [1])
    with pytest.raises(InputError):
        decode_value(PATH_COUNT, True)
    with pytest.raises(InputError):
        decode_edge(PATH_COUNT, {"max_with": 1})
    with pytest.raises(InputError):
        decode_edge(PATH_COUNT, {"scale": [1], "kind": "identity"})
    with pytest.raises(InputError):
        decode_interface({"domain": "a"})


def test_load_json_errors(tmp_path):
    with pytest.raises(InputError):
        load_json(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{")
    with pytest.raises(InputError):
        load_json(p)


def test_interface_file_of_a_flow_graph():
    h = random_flow_graph(HARRIS, random.Random(2), max_nodes=4, min_nodes=2)
    j = encode_interface(interface_of(h))
    assert j["domain"] == sorted(h.nodes) and j["flow_domain"] == encode_domain(HARRIS)
