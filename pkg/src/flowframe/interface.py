"""Flow interfaces and their partial composition."""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Mapping

from .domain import FlowDomain
from .errors import InputError
from .graph import FlowGraph, compute_outflow


class FlowInterface:
    """The ``(inflow, outflow)`` abstraction of a flow graph.

    ``inflow`` is total on ``nodes``; ``outflow`` is sparse with zero default
    and its support never meets ``nodes``. Zero outflow entries are dropped so
    equality is structural.
    """

    __slots__ = ("domain", "nodes", "inflow", "outflow")

    def __init__(self, domain: FlowDomain, nodes: Iterable[str], inflow: Mapping, outflow: Mapping | None = None):
        self.domain = domain
        self.nodes = frozenset(nodes)
        inflow = dict(inflow)
        if set(inflow) - self.nodes:
            raise InputError(f"inflow mentions nodes outside the interface: {sorted(set(inflow) - self.nodes)}")
        self.inflow = MappingProxyType(
            {n: domain.check_value(inflow[n]) if n in inflow else domain.zero for n in sorted(self.nodes)}
        )
        out = {}
        for n, v in sorted((outflow or {}).items()):
            if n in self.nodes:
                raise InputError(f"outflow at {n!r}, which is inside the interface")
            if domain.check_value(v) != domain.zero:
                out[n] = v
        self.outflow = MappingProxyType(out)

    def out(self, n: str):
        return self.outflow.get(n, self.domain.zero)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowInterface):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.nodes == other.nodes
            and dict(self.inflow) == dict(other.inflow)
            and dict(self.outflow) == dict(other.outflow)
        )

    def __hash__(self):
        return hash((self.domain, self.nodes, frozenset(self.inflow.items()), frozenset(self.outflow.items())))

    def __repr__(self) -> str:
        ins = ", ".join(f"{k}↦{v!r}" for k, v in self.inflow.items())
        outs = ", ".join(f"{k}↦{v!r}" for k, v in self.outflow.items())
        return f"FlowInterface(in={{{ins}}}, out={{{outs}}})"


def empty_interface(domain: FlowDomain) -> FlowInterface:
    return FlowInterface(domain, (), {}, {})


def interface_of(h: FlowGraph) -> FlowInterface:
    return FlowInterface(h.domain, h.nodes, h.inflow, compute_outflow(h))


def interface_equal(i1: FlowInterface, i2: FlowInterface) -> bool:
    return i1 == i2


def is_identity(i: FlowInterface) -> bool:
    return not i.nodes and not i.outflow


def interface_compose(i1: FlowInterface, i2: FlowInterface) -> FlowInterface | None:
    """``i1 ⊕ i2``, or None when undefined."""
    if i1.domain != i2.domain:
        raise InputError(f"cannot compose interfaces over {i1.domain.name} and {i2.domain.name}")
    if i1.nodes & i2.nodes:
        return None
    d = i1.domain
    inflow = {}
    for mine, other in ((i1, i2), (i2, i1)):
        for n, v in mine.inflow.items():
            rest = d._subtract(v, other.out(n))
            if rest is None:
                return None
            inflow[n] = rest
    nodes = i1.nodes | i2.nodes
    outflow = {}
    for n in set(i1.outflow) | set(i2.outflow):
        if n not in nodes:
            outflow[n] = d._add(i1.out(n), i2.out(n))
    return FlowInterface(d, nodes, inflow, outflow)
