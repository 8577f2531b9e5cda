"""Graphs, the flow equation, flow graphs and their algebra."""

from __future__ import annotations

import graphlib
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .domain import ZERO, FlowDomain
from .errors import (
    CapabilityError,
    InputError,
    MultipleSolutions,
    NoInflow,
    NoSolution,
    NotConverged,
)

STRATEGIES = ("auto", "topo", "capacity", "kleene", "oracle")


class Graph:
    """A partial graph: node set ``N`` plus sparse edge labelling.

    ``edges`` maps ``(source, target)`` to an edge function; sources must be
    in ``N``, targets may lie anywhere. Missing pairs are ``Zero``.
    """

    __slots__ = ("domain", "nodes", "_edges", "_succ", "_pred")

    def __init__(self, domain: FlowDomain, nodes: Iterable[str], edges: Mapping | None = None):
        self.domain = domain
        self.nodes = frozenset(nodes)
        for n in self.nodes:
            if not isinstance(n, str):
                raise InputError(f"node ids must be strings, got {n!r}")
        clean = {}
        succ: dict = {}
        pred: dict = {}
        for (a, b), e in (edges or {}).items():
            if a not in self.nodes:
                raise InputError(f"edge source {a!r} is not a node of the graph")
            if not isinstance(b, str):
                raise InputError(f"node ids must be strings, got {b!r}")
            e = domain.normalize(e)
            if e == ZERO:
                continue
            clean[(a, b)] = e
            succ.setdefault(a, {})[b] = e
            pred.setdefault(b, {})[a] = e
        self._edges = MappingProxyType(clean)
        self._succ = succ
        self._pred = pred

    @property
    def edges(self) -> Mapping:
        return self._edges

    def edge(self, a: str, b: str):
        return self._edges.get((a, b), ZERO)

    def successors(self, n: str) -> dict:
        return dict(self._succ.get(n, {}))

    def predecessors(self, n: str) -> dict:
        return dict(self._pred.get(n, {}))

    def targets(self) -> frozenset:
        return frozenset(b for _, b in self._edges)

    def external_targets(self) -> frozenset:
        return self.targets() - self.nodes

    def inner_edges(self) -> dict:
        """Non-zero edges with both endpoints in ``N``."""
        return {k: e for k, e in self._edges.items() if k[1] in self.nodes}

    def is_acyclic(self) -> bool:
        try:
            _topo_order(self)
        except graphlib.CycleError:
            return False
        return True

    def restrict(self, xs: Iterable[str]) -> "Graph":
        xs = frozenset(xs)
        return Graph(self.domain, xs, {k: e for k, e in self._edges.items() if k[0] in xs})

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.domain, self.nodes, dict(self._edges)) == (other.domain, other.nodes, dict(other._edges))

    def __hash__(self):
        return hash((self.domain, self.nodes, frozenset(self._edges.items())))

    def __repr__(self) -> str:
        return f"Graph({self.domain.name}, {len(self.nodes)} nodes, {len(self._edges)} edges)"


def _topo_order(g: Graph) -> list:
    ts = graphlib.TopologicalSorter({n: () for n in g.nodes})
    for (a, b) in g.inner_edges():
        ts.add(b, a)
    return list(ts.static_order())


def _total(g: Graph, m: Mapping | None, what: str) -> dict:
    m = dict(m or {})
    extra = set(m) - g.nodes
    if extra:
        raise InputError(f"{what} mentions nodes outside the graph: {sorted(extra)}")
    d = g.domain
    out = {}
    for n in g.nodes:
        out[n] = d.check_value(m[n]) if n in m else d.zero
    return out


def incoming(g: Graph, flow: Mapping, n: str):
    """``Σ_{n'∈N} flow(n') ▷ e(n', n)``."""
    d = g.domain
    return d.sum(d._apply(e, flow[a]) for a, e in g._pred.get(n, {}).items())


class FlowEqnResult(NamedTuple):
    holds: bool
    residuals: dict  # node -> (expected, actual)


def check_flow_eqn(g: Graph, inflow: Mapping, flow: Mapping) -> FlowEqnResult:
    """Check ``flow(n) = in(n) + Σ flow(n') ▷ e(n', n)`` at every node."""
    inflow = _total(g, inflow, "inflow")
    flow = _total(g, flow, "flow")
    d = g.domain
    residuals = {}
    for n in sorted(g.nodes):
        expected = d._add(inflow[n], incoming(g, flow, n))
        if expected != flow[n]:
            residuals[n] = (expected, flow[n])
    return FlowEqnResult(not residuals, residuals)


class FlowGraph:
    """A graph with a flow admitting an inflow; immutable once built.

    Build one with :func:`validate_flow_graph` (from a candidate flow) or
    :func:`solve_flow_graph` (from an inflow).
    """

    __slots__ = ("graph", "flow", "inflow")

    def __init__(self, graph: Graph, flow: Mapping, inflow: Mapping):
        self.graph = graph
        self.flow = MappingProxyType(dict(flow))
        self.inflow = MappingProxyType(dict(inflow))

    @property
    def domain(self) -> FlowDomain:
        return self.graph.domain

    @property
    def nodes(self) -> frozenset:
        return self.graph.nodes

    def edge(self, a, b):
        return self.graph.edge(a, b)

    def __len__(self):
        return len(self.graph.nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowGraph):
            return NotImplemented
        return self.graph == other.graph and dict(self.flow) == dict(other.flow)

    def __hash__(self):
        return hash((self.graph, frozenset(self.flow.items())))

    def __repr__(self) -> str:
        return f"FlowGraph({self.domain.name}, nodes={sorted(self.nodes)})"


def empty_flow_graph(domain: FlowDomain) -> FlowGraph:
    return FlowGraph(Graph(domain, ()), {}, {})


def infer_inflow(g: Graph, flow: Mapping) -> dict:
    """The unique inflow for ``flow``; raises NoInflow at the first failing node."""
    flow = _total(g, flow, "flow")
    d = g.domain
    inflow = {}
    for n in sorted(g.nodes):
        got = incoming(g, flow, n)
        rest = d._subtract(flow[n], got)
        if rest is None:
            raise NoInflow(n, f"flow {flow[n]!r} is smaller than incoming {got!r}")
        inflow[n] = rest
    return inflow


def validate_flow_graph(g: Graph, flow: Mapping) -> FlowGraph:
    flow = _total(g, flow, "flow")
    return FlowGraph(g, flow, infer_inflow(g, flow))


def compute_outflow(h: FlowGraph) -> dict:
    """Sparse outflow to nodes outside ``h``; zero entries are omitted."""
    g, d = h.graph, h.domain
    out = {}
    for n in sorted(g.external_targets()):
        v = incoming(g, h.flow, n)
        if v != d.zero:
            out[n] = v
    return out


# -- solving --------------------------------------------------------------


def solve_flow(
    g: Graph,
    inflow: Mapping | None = None,
    strategy: str = "auto",
    max_iters: int | None = None,
    bound=None,
) -> dict:
    """Find a flow for ``g`` under ``inflow``.

    Raises NoSolution, NotConverged or MultipleSolutions for the modelled
    negative outcomes, CapabilityError when the strategy does not apply.
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    inflow = _total(g, inflow, "inflow")
    d = g.domain
    if strategy == "auto":
        if g.is_acyclic():
            strategy = "topo"
        elif d.scalevec:
            strategy = "capacity"
        else:
            strategy = "kleene"

    if strategy == "topo":
        try:
            order = _topo_order(g)
        except graphlib.CycleError as exc:
            raise CapabilityError(f"topo strategy needs an acyclic graph; cycle {exc.args[1]}") from None
        flow: dict = {}
        for n in order:
            flow[n] = d._add(inflow[n], d.sum(d._apply(e, flow[a]) for a, e in g._pred.get(n, {}).items()))
        return flow

    if strategy == "capacity":
        from .extension import capacity_flow, check_effectively_acyclic

        flow = capacity_flow(g, inflow)
        res = check_flow_eqn(g, inflow, flow)
        if not res.holds:
            n = next(iter(res.residuals))
            raise NoSolution(f"sum-of-paths candidate violates the flow equation at {n!r}")
        ea = check_effectively_acyclic(FlowGraph(g, flow, inflow))
        if not ea.effectively_acyclic:
            raise NoSolution(f"sum-of-paths candidate is not effectively acyclic (cycle {ea.witness})")
        return flow

    if strategy == "kleene":
        return kleene_iterations(g, inflow, max_iters)[0]

    # oracle
    from .oracle import ValueBound, enumerate_flows

    sols = enumerate_flows(g, inflow, bound or ValueBound())
    if not sols:
        raise NoSolution("no flow within the oracle's value bound")
    if len(sols) > 1:
        raise MultipleSolutions(sols)
    return sols[0]


def kleene_iterations(g: Graph, inflow: Mapping | None = None, max_iters: int | None = None) -> tuple:
    """Like kleene solving but also report the iteration at which it stabilized."""
    inflow = _total(g, inflow, "inflow")
    d = g.domain
    if max_iters is None:
        p = d.nilpotent_degree
        max_iters = p * len(g.nodes) + 1 if p else 8 * len(g.nodes) + 1
    cur = dict(inflow)
    for i in range(1, max_iters + 1):
        nxt = {n: d._add(inflow[n], incoming(g, cur, n)) for n in g.nodes}
        if nxt == cur:
            return cur, i
        cur = nxt
    raise NotConverged(max_iters)


def solve_flow_graph(g: Graph, inflow: Mapping | None = None, strategy: str = "auto", **kw) -> FlowGraph:
    flow = solve_flow(g, inflow, strategy, **kw)
    return FlowGraph(g, flow, _total(g, inflow, "inflow"))


# -- flow graph algebra ---------------------------------------------------


def compose_flow_graphs(h1: FlowGraph, h2: FlowGraph) -> FlowGraph | None:
    """``h1 ⊙ h2``, or None when undefined."""
    if h1.domain != h2.domain:
        raise InputError(f"cannot compose {h1.domain.name} with {h2.domain.name}")
    if h1.nodes & h2.nodes:
        return None
    edges = dict(h1.graph.edges)
    edges.update(h2.graph.edges)
    g = Graph(h1.domain, h1.nodes | h2.nodes, edges)
    flow = {**h1.flow, **h2.flow}
    try:
        return validate_flow_graph(g, flow)
    except NoInflow:
        return None


def restrict(h: FlowGraph, xs: Iterable[str]) -> FlowGraph:
    xs = frozenset(xs)
    if not xs <= h.nodes:
        raise InputError(f"restriction set has nodes outside the flow graph: {sorted(xs - h.nodes)}")
    g = h.graph.restrict(xs)
    return validate_flow_graph(g, {n: h.flow[n] for n in xs})


def singleton(h: FlowGraph, n: str) -> FlowGraph:
    if n not in h.nodes:
        raise InputError(f"{n!r} is not a node of the flow graph")
    return restrict(h, {n})


