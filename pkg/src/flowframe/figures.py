"""Small path-counting graphs that motivate effective acyclicity.

``fig4a`` has no flow, ``fig4b`` has many, and the ``fig4c`` pair shows an
interface-preserving swap of the region ``{n3, n4}`` that turns a chain into
a graph with a self-sustaining cycle.
"""

from __future__ import annotations

from .domain import IDENTITY, PATH_COUNT
from .graph import FlowGraph, Graph, validate_flow_graph


def _graph(nodes, pairs) -> Graph:
    return Graph(PATH_COUNT, nodes, {p: IDENTITY for p in pairs})


def fig4a() -> tuple:
    """``a1 -> a2 <-> a3`` with inflow 1 at ``a1``: no solution."""
    g = _graph(["a1", "a2", "a3"], [("a1", "a2"), ("a2", "a3"), ("a3", "a2")])
    return g, {"a1": 1}


def fig4b() -> tuple:
    """Isolated ``b1`` with inflow 1 next to a closed 2-cycle: any ``x`` works."""
    g = _graph(["b1", "b2", "b3"], [("b2", "b3"), ("b3", "b2")])
    return g, {"b1": 1}


FIG4C_NODES = ["n1", "n2", "n3", "n4", "n5"]
FIG4C_REGION = frozenset({"n3", "n4"})


def fig4c_left() -> FlowGraph:
    g = _graph(FIG4C_NODES, [("n1", "n3"), ("n3", "n5"), ("n5", "n4"), ("n4", "n2")])
    return validate_flow_graph(g, {n: 1 for n in FIG4C_NODES})


def fig4c_right() -> FlowGraph:
    g = _graph(FIG4C_NODES, [("n1", "n3"), ("n3", "n2"), ("n4", "n5"), ("n5", "n4")])
    return validate_flow_graph(g, {n: 1 for n in FIG4C_NODES})
