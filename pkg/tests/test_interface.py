import random

import pytest

from flowframe.domain import BUILTIN, HARRIS, IDENTITY, PATH_COUNT, PIP, ScaleVec
from flowframe.errors import InputError
from flowframe.generators import random_flow_graph, random_partition
from flowframe.graph import Graph, compose_flow_graphs, restrict, validate_flow_graph
from flowframe.interface import (
    FlowInterface,
    empty_interface,
    interface_compose,
    interface_of,
    is_identity,
)
from flowframe.multiset import Multiset
from flowframe.oracle import interface_compose_oracle


def fi(inflow, outflow=None, d=PATH_COUNT):
    return FlowInterface(d, inflow, inflow, outflow or {})


def test_inflow_is_total_and_outflow_sparse():
    i = FlowInterface(PATH_COUNT, ["a", "b"], {"a": 2}, {"x": 0, "y": 3})
    assert dict(i.inflow) == {"a": 2, "b": 0}
    assert dict(i.outflow) == {"y": 3} and i.out("x") == 0


def test_outflow_may_not_point_inside():
    with pytest.raises(InputError):
        FlowInterface(PATH_COUNT, ["a"], {}, {"a": 1})
    with pytest.raises(InputError):
        FlowInterface(PATH_COUNT, ["a"], {"b": 1})


def test_equality_is_structural():
    assert fi({"a": 1}, {"x": 2}) == fi({"a": 1}, {"x": 2, "y": 0})
    assert fi({"a": 1}) != fi({"a": 2})
    assert len({fi({"a": 1}), fi({"a": 1})}) == 1


def test_compose_subtracts_what_the_other_side_sends():
    # a sends 2 to b; b has inflow 3, so the composite needs only 1 from outside
    i1 = fi({"a": 2}, {"b": 2, "z": 1})
    i2 = fi({"b": 3}, {"z": 4})
    c = interface_compose(i1, i2)
    assert c == fi({"a": 2, "b": 1}, {"z": 5})
    assert interface_compose(i2, i1) == c


def test_compose_undefined_cases():
    assert interface_compose(fi({"a": 1}), fi({"a": 1})) is None
    assert interface_compose(fi({"a": 1}, {"b": 2}), fi({"b": 1})) is None
    with pytest.raises(InputError):
        interface_compose(fi({"a": 1}), fi({"b": Multiset()}, d=PIP))


def test_empty_interface_is_identity():
    e = empty_interface(HARRIS)
    i = fi({"a": (1, 0)}, {"b": (0, 1)}, d=HARRIS)
    assert is_identity(e) and not is_identity(i)
    assert interface_compose(i, e) == i == interface_compose(e, i)


def test_interface_of_chain():
    g = Graph(PATH_COUNT, ["a", "b"], {("a", "b"): ScaleVec((3,)), ("b", "x"): IDENTITY})
    h = validate_flow_graph(g, {"a": 1, "b": 4})
    assert interface_of(h) == fi({"a": 1, "b": 1}, {"x": 4})


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_interface_composition_matches_graph_composition(name):
    d = BUILTIN[name]
    rng = random.Random(name)
    for _ in range(60):
        h = random_flow_graph(d, rng, max_nodes=6, ea=True)
        a, b = random_partition(h.nodes, rng, 2)
        h1, h2 = restrict(h, a), restrict(h, b)
        want = interface_compose_oracle(h1, h2)
        got = interface_compose(interface_of(h1), interface_of(h2))
        assert got == want
        assert interface_of(compose_flow_graphs(h1, h2)) == got


def test_oracle_sees_undefined_composition():
    g = Graph(PATH_COUNT, ["p"], {("p", "q"): IDENTITY})
    h1 = validate_flow_graph(g, {"p": 2})
    h2 = validate_flow_graph(Graph(PATH_COUNT, ["q"]), {"q": 1})
    assert interface_compose_oracle(h1, h2) is None
    assert interface_compose(interface_of(h1), interface_of(h2)) is None
