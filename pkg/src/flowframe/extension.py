"""Contextual extension, capacity, effective acyclicity, footprints, replacement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import networkx as nx

from .domain import ZERO, FlowDomain, ScaleVec
from .errors import (
    CapabilityError,
    CompositionUndefined,
    FreshNodeReceivesFlow,
    InputError,
    InterfaceMismatch,
    NotContextualExtension,
    NotEffectivelyAcyclic,
    NotSubflowPreserving,
)
from .graph import FlowGraph, Graph, compose_flow_graphs, restrict, singleton
from .interface import FlowInterface, interface_of

# -- contextual extension -------------------------------------------------


def contextual_extension(i: FlowInterface, i2: FlowInterface) -> bool:
    """``i ≾ i2``: the domain grows, old inflow is kept, external outflow is kept."""
    if i.domain != i2.domain:
        raise InputError("interfaces over different flow domains")
    if not i.nodes <= i2.nodes:
        return False
    if any(i.inflow[n] != i2.inflow[n] for n in i.nodes):
        return False
    for n in set(i.outflow) | set(i2.outflow):
        if n not in i.nodes and i.out(n) != i2.out(n):
            return False
    return True


# -- capacity -------------------------------------------------------------


def _require_scalevec(d: FlowDomain, what: str):
    if not d.scalevec:
        raise CapabilityError(f"{what} needs a ScaleVec edge family; {d.name} has none")


def _coeffs(d: FlowDomain, e) -> tuple:
    return d._coeffs(e)


def _mul(a: tuple, b: tuple) -> tuple:
    return tuple(x * y for x, y in zip(a, b))


def _plus(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class Capacity:
    """Symbolic ``cap(G)(n, n')`` for the requested sources, at ``depth``."""

    domain: FlowDomain
    sources: frozenset
    depth: int
    table: Mapping = field(repr=False)  # source -> target -> non-zero edge function

    def __call__(self, n: str, n2: str):
        if n not in self.sources:
            raise InputError(f"{n!r} is not a capacity source")
        return self.table.get(n, {}).get(n2, ZERO)

    def row(self, n: str) -> dict:
        if n not in self.sources:
            raise InputError(f"{n!r} is not a capacity source")
        return {t: e for t, e in self.table.get(n, {}).items()}


def _to_table(d: FlowDomain, rows: dict) -> dict:
    table = {}
    for s, row in rows.items():
        out = table[s] = {}
        for t, c in row.items():
            e = d.normalize(ScaleVec(c))
            if e != ZERO:
                out[t] = e
    return table


def capacity(g: Graph, sources: Iterable[str] | None = None, method: str = "fast") -> Capacity:
    """Capacity at depth ``|G|``.

    ``reference`` follows the inductive definition literally; ``fast``
    propagates one path length at a time and stops once a layer vanishes.
    """
    d = g.domain
    _require_scalevec(d, "capacity")
    sources = frozenset(g.nodes if sources is None else sources)
    if not sources <= g.nodes:
        raise InputError("capacity sources must be nodes of the graph")
    depth = len(g.nodes)
    one = (1,) * d.arity
    zero = (0,) * d.arity
    succ = {n: {t: _coeffs(d, e) for t, e in g._succ.get(n, {}).items()} for n in g.nodes}
    rows = {}
    for s in sources:
        if method == "reference":
            cur = {s: one}
            for _ in range(depth):
                nxt = {s: one}
                for mid, c in cur.items():
                    for t, ce in succ.get(mid, {}).items():
                        nxt[t] = _plus(nxt.get(t, zero), _mul(c, ce))
                cur = nxt
            rows[s] = cur
        elif method == "fast":
            total = {s: one}
            layer = {s: one}
            for _ in range(depth):
                nxt = {}
                for mid, c in layer.items():
                    for t, ce in succ.get(mid, {}).items():
                        v = _mul(c, ce)
                        if v != zero:
                            nxt[t] = _plus(nxt.get(t, zero), v)
                if not nxt:
                    break
                for t, c in nxt.items():
                    total[t] = _plus(total.get(t, zero), c)
                layer = nxt
            rows[s] = total
        else:
            raise InputError(f"unknown capacity method {method!r}")
    return Capacity(d, sources, depth, _to_table(d, rows))


def capacity_flow(g: Graph, inflow: Mapping) -> dict:
    """``flow(n) = Σ_{n'} in(n') ▷ cap(G)(n', n)`` restricted to ``N``.

    Values are pushed through the graph directly, which equals the
    capacity sum because every edge function is an endomorphism.
    """
    d = g.domain
    _require_scalevec(d, "capacity solving")
    zero = d.zero
    flow = {n: inflow.get(n, zero) for n in g.nodes}
    layer = {n: v for n, v in flow.items() if v != zero}
    for _ in range(len(g.nodes)):
        nxt = {}
        for mid, v in layer.items():
            for t, e in g._succ.get(mid, {}).items():
                if t not in g.nodes:
                    continue
                w = d._apply(e, v)
                if w != zero:
                    nxt[t] = d._add(nxt.get(t, zero), w)
        if not nxt:
            break
        for t, v in nxt.items():
            flow[t] = d._add(flow[t], v)
        layer = nxt
    return flow


# -- effective acyclicity -------------------------------------------------


class EAResult(NamedTuple):
    effectively_acyclic: bool
    witness: tuple | None  # cycle (n1, ..., nk) whose composite does not vanish


def _cycle_value(h: FlowGraph, cyc: tuple):
    d = h.domain
    v = h.flow[cyc[0]]
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        v = d._apply(h.graph.edge(a, b), v)
        if v == d.zero:
            break
    return v


def _rotate_min(cyc: list) -> tuple:
    i = cyc.index(min(cyc))
    return tuple(cyc[i:] + cyc[:i])


def _ea_cycles(h: FlowGraph) -> EAResult:
    dg = nx.DiGraph()
    dg.add_nodes_from(h.nodes)
    dg.add_edges_from(h.graph.inner_edges())
    zero = h.domain.zero
    for cyc in sorted(_rotate_min(c) for c in nx.simple_cycles(dg)):
        for k in range(len(cyc)):
            rot = cyc[k:] + cyc[:k]
            if _cycle_value(h, rot) != zero:
                return EAResult(False, rot)
    return EAResult(True, None)


def _ea_components(h: FlowGraph) -> EAResult:
    d = h.domain
    _require_scalevec(d, "the component EA check")
    inner = h.graph.inner_edges()
    for j in range(d.arity):
        dg = nx.DiGraph()
        for (a, b), e in inner.items():
            if _coeffs(d, e)[j]:
                dg.add_edge(a, b)
        for comp in nx.strongly_connected_components(dg):
            nodes = sorted(comp)
            if len(nodes) == 1 and not dg.has_edge(nodes[0], nodes[0]):
                continue
            live = [n for n in nodes if _component(d, h.flow[n], j) > 0]
            if live:
                start = live[0]
                cyc = [a for a, _ in nx.find_cycle(dg.subgraph(nodes), source=start)]
                return EAResult(False, _witness_from(h, cyc))
    return EAResult(True, None)


def _component(d: FlowDomain, v, j: int) -> int:
    return v if d.kind == "path_count" else v[j]


def _witness_from(h: FlowGraph, cyc: list) -> tuple:
    rot = _rotate_min(cyc)
    for k in range(len(rot)):
        r = rot[k:] + rot[:k]
        if _cycle_value(h, r) != h.domain.zero:
            return r
    return rot


def check_effectively_acyclic(h: FlowGraph, method: str = "auto") -> EAResult:
    """Does every cyclic composite of edge functions annihilate the flow entering it?

    ``cycles`` enumerates simple cycles and every rotation; ``components``
    (ScaleVec only) looks for a strongly connected part of one component's
    support graph that carries positive flow in that component.
    """
    d = h.domain
    if not d.endomorphic:
        raise CapabilityError(f"the cycle-based EA check needs endomorphic edges; {d.name} is not")
    if method == "auto":
        method = "components" if d.scalevec else "cycles"
    if method == "cycles":
        return _ea_cycles(h)
    if method == "components":
        return _ea_components(h)
    raise InputError(f"unknown EA method {method!r}")


# -- subflow-preserving extension -----------------------------------------


def subflow_violation(h: FlowGraph, h2: FlowGraph, mode: str = "symbolic", limit: int = 4096) -> str | None:
    """Why ``h ≾ₛ h2`` fails, or None when it holds."""
    d = h.domain
    if d != h2.domain:
        raise InputError("flow graphs over different domains")
    _require_scalevec(d, "the subflow-preserving check")
    if mode not in ("symbolic", "enumerative"):
        raise InputError(f"unknown mode {mode!r}")
    if not contextual_extension(interface_of(h), interface_of(h2)):
        return "interface is not contextually extended"
    if not (h.graph.external_targets() | h2.graph.external_targets()) - h2.nodes:
        return None  # no routed flow leaves h2
    cap1 = capacity(h.graph)
    cap2 = capacity(h2.graph)
    outside = lambda t: t not in h2.nodes  # noqa: E731

    def same(m, e1, e2) -> bool:
        if mode == "symbolic":
            c1, c2 = _coeffs(d, e1), _coeffs(d, e2)
            mv = (m,) if d.kind == "path_count" else m
            return all(a == b for a, b, k in zip(c1, c2, mv) if k > 0)
        return all(d._apply(e1, x) == d._apply(e2, x) for x in d.downset(m, limit))

    for n in sorted(h.nodes):
        targets = {t for t in cap1.row(n)} | {t for t in cap2.row(n)}
        for t in sorted(filter(outside, targets)):
            if not same(h.inflow[n], cap1(n, t), cap2(n, t)):
                return f"capacity {n}->{t} changes on the inflow's downset"
    for n in sorted(h2.nodes - h.nodes):
        for t in sorted(filter(outside, cap2.row(n))):
            if not same(h2.inflow[n], cap2(n, t), ZERO):
                return f"fresh node {n} routes flow to {t}"
    return None


def subflow_preserving(h: FlowGraph, h2: FlowGraph, mode: str = "symbolic", limit: int = 4096) -> bool:
    return subflow_violation(h, h2, mode, limit) is None


# -- footprints -----------------------------------------------------------


def footprint(h: FlowGraph, h2: FlowGraph) -> frozenset:
    """Nodes whose singleton flow subgraph differs between ``h`` and ``h2``."""
    if h.nodes != h2.nodes:
        raise InputError("footprint needs flow graphs over the same nodes")
    if interface_of(h) != interface_of(h2):
        raise InputError("footprint needs flow graphs with equal interfaces")
    return frozenset(n for n in h.nodes if singleton(h, n) != singleton(h2, n))


# -- replacement ----------------------------------------------------------

MODES = ("equal", "contextual", "subflow")


@dataclass(frozen=True)
class Replacement:
    result: FlowGraph
    relations: dict


def replace(h: FlowGraph, region: Iterable[str], new: FlowGraph, mode: str = "equal") -> Replacement:
    """Swap the subgraph of ``h`` on ``region`` for ``new`` after checking side conditions."""
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}; expected one of {MODES}")
    region = frozenset(region)
    if not region <= h.nodes:
        raise InputError("region must be a subset of the flow graph's nodes")
    rest_nodes = h.nodes - region
    if new.nodes & rest_nodes:
        raise InputError(f"new region reuses context nodes {sorted(new.nodes & rest_nodes)}")
    h1 = restrict(h, region)
    h2 = restrict(h, rest_nodes)
    i1, i1n = interface_of(h1), interface_of(new)

    if mode == "equal":
        if i1 != i1n:
            raise InterfaceMismatch(f"{i1!r} != {i1n!r}")
    else:
        if not contextual_extension(i1, i1n):
            raise NotContextualExtension(f"{i1!r} is not extended by {i1n!r}")
        out2 = interface_of(h2)
        for n in sorted(new.nodes - region):
            if out2.out(n) != h.domain.zero:
                raise FreshNodeReceivesFlow(f"context sends {out2.out(n)!r} to fresh node {n!r}")
    if mode == "subflow":
        if not h.domain.reduced:
            raise CapabilityError(f"EA-preserving replacement needs reduced endomorphisms; {h.domain.name} is not")
        why = subflow_violation(h1, new)
        if why:
            raise NotSubflowPreserving(why)
        for name, part in (("original", h), ("new region", new), ("context", h2)):
            ea = check_effectively_acyclic(part)
            if not ea.effectively_acyclic:
                raise NotEffectivelyAcyclic(f"{name} has non-vanishing cycle {ea.witness}")

    result = compose_flow_graphs(new, h2)
    if result is None:
        raise CompositionUndefined("new region does not compose with the context")
    ih, ir = interface_of(h), interface_of(result)
    relations = {"interface_equal": ih == ir, "contextual_extension": contextual_extension(ih, ir)}
    if h.domain.endomorphic:
        relations["effectively_acyclic"] = check_effectively_acyclic(result).effectively_acyclic
    if h.domain.scalevec:
        relations["subflow_preserving"] = subflow_preserving(h, result)
    return Replacement(result, relations)
