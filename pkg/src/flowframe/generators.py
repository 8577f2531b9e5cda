"""Seeded random values, graphs, flow graphs and interfaces for property suites."""

from __future__ import annotations

import random
from typing import Iterable

from .domain import (
    IDENTITY,
    AddMinWith,
    FlowDomain,
    MaxWith,
    PathFilter,
    ScaleVec,
)
from .errors import NoInflow, NoSolution
from .graph import FlowGraph, Graph, restrict, solve_flow, validate_flow_graph
from .interface import FlowInterface, interface_of
from .multiset import INF, Multiset


def node_names(k: int, prefix: str = "n") -> list:
    return [f"{prefix}{i}" for i in range(k)]


def random_value(d: FlowDomain, rng: random.Random, nodes: Iterable[str] = (), big: bool = False):
    hi = 6 if big else 3
    k = d.kind
    if k == "path_count":
        return rng.randint(0, hi)
    if k == "product":
        return tuple(rng.randint(0, hi) for _ in range(d.arity))
    size = rng.randint(0, 3)
    if k == "pip":
        return Multiset(rng.randint(0, hi) for _ in range(size))
    if k == "shortest_path":
        return Multiset(INF if rng.random() < 0.15 else rng.randint(0, hi) for _ in range(size))
    ns = sorted(nodes) or ["a", "b", "c"]
    return Multiset(frozenset(rng.sample(ns, rng.randint(0, min(2, len(ns))))) for _ in range(size))


def random_nonzero(d: FlowDomain, rng: random.Random, nodes: Iterable[str] = ()):
    for _ in range(100):
        v = random_value(d, rng, nodes)
        if v != d.zero:
            return v
    return random_value(d, rng, nodes)


def random_edge(d: FlowDomain, rng: random.Random, src: str):
    k = d.kind
    if k == "path_count":
        return rng.choice([IDENTITY, IDENTITY, ScaleVec((2,)), ScaleVec((0,))])
    if k == "product":
        return rng.choice([IDENTITY, ScaleVec((1, 0)), ScaleVec((0, 1)), ScaleVec((1, 0)), ScaleVec((0, 1)),
                           ScaleVec((2, 1)), ScaleVec((0, 2))])
    if k == "pip":
        return MaxWith(rng.randint(0, 3))
    if k == "shortest_path":
        return AddMinWith(rng.randint(0, 3))
    return PathFilter(frozenset([src]))


def random_graph(
    d: FlowDomain,
    rng: random.Random,
    k: int,
    acyclic: bool = True,
    density: float = 0.35,
    external: int = 2,
    prefix: str = "n",
) -> Graph:
    nodes = node_names(k, prefix)
    outside = node_names(external, "x")
    edges = {}
    for i, a in enumerate(nodes):
        for j, b in enumerate(nodes):
            if (acyclic and j <= i) or (not acyclic and rng.random() < 0.5 and i == j):
                continue
            if rng.random() < density:
                edges[(a, b)] = random_edge(d, rng, a)
        for x in outside:
            if rng.random() < density / 2:
                edges[(a, x)] = random_edge(d, rng, a)
    return Graph(d, nodes, edges)


def random_inflow(d: FlowDomain, rng: random.Random, nodes: Iterable[str], fill: float = 0.5) -> dict:
    nodes = sorted(nodes)
    inflow = {}
    for n in nodes:
        if d.kind == "shortest_path":
            # every node needs a cost or AddMinWith would see an empty multiset
            inflow[n] = Multiset([rng.choice([0, 1, 2, 3, INF])]) + (random_value(d, rng) if rng.random() < fill else d.zero)
        elif rng.random() < fill:
            inflow[n] = random_value(d, rng, nodes)
        else:
            inflow[n] = d.zero
    return inflow


def random_flow_graph(d: FlowDomain, rng: random.Random, max_nodes: int = 6, acyclic: bool | None = None,
                      min_nodes: int = 0, prefix: str = "n", ea: bool = False) -> FlowGraph:
    """A valid flow graph; cyclic ones only for domains with unique flows.

    With ``ea`` set, graphs over endomorphic domains are resampled until they
    are effectively acyclic.
    """
    from .extension import check_effectively_acyclic

    if acyclic is None:
        acyclic = not (d.scalevec or d.nilpotent_degree) or rng.random() < 0.5
    for _ in range(200):
        k = rng.randint(min_nodes, max_nodes)
        g = random_graph(d, rng, k, acyclic=acyclic, prefix=prefix)
        inflow = random_inflow(d, rng, g.nodes)
        try:
            flow = solve_flow(g, inflow)
        except NoSolution:
            continue
        h = FlowGraph(g, flow, inflow)
        if ea and d.endomorphic and not check_effectively_acyclic(h).effectively_acyclic:
            continue
        return h
    raise RuntimeError("could not generate a flow graph")


def random_cyclic_candidate(d: FlowDomain, rng: random.Random, max_nodes: int = 6) -> FlowGraph:
    """A valid (possibly non-EA) flow graph over a ScaleVec domain with cycles allowed."""
    for _ in range(1000):
        k = rng.randint(1, max_nodes)
        g = random_graph(d, rng, k, acyclic=False, density=0.4)
        flow = {n: random_value(d, rng) if rng.random() < 0.7 else d.zero for n in g.nodes}
        # a few upward adjustments so incoming never exceeds the flow
        for _ in range(3):
            for n in sorted(g.nodes):
                got = d.sum(d.apply(e, flow[a]) for a, e in g.predecessors(n).items())
                if not d.leq(got, flow[n]):
                    flow[n] = got
        try:
            return validate_flow_graph(g, flow)
        except NoInflow:
            continue
    raise RuntimeError("could not generate a cyclic flow graph")


def random_partition(nodes: Iterable[str], rng: random.Random, parts: int) -> list:
    out = [set() for _ in range(parts)]
    for n in sorted(nodes):
        out[rng.randrange(parts)].add(n)
    return [frozenset(p) for p in out]


def random_interface(d: FlowDomain, rng: random.Random, pool: list, k: int | None = None) -> FlowInterface:
    k = rng.randint(0, min(3, len(pool))) if k is None else k
    nodes = rng.sample(pool, k)
    rest = [n for n in pool if n not in nodes]
    inflow = {n: random_value(d, rng, pool) for n in nodes}
    outflow = {n: random_value(d, rng, pool) for n in rng.sample(rest, rng.randint(0, min(2, len(rest))))}
    return FlowInterface(d, nodes, inflow, outflow)


def perturb_interface(d: FlowDomain, rng: random.Random, i: FlowInterface, pool: list) -> FlowInterface:
    inflow, outflow = dict(i.inflow), dict(i.outflow)
    if inflow and rng.random() < 0.5:
        n = rng.choice(sorted(inflow))
        inflow[n] = d.add(inflow[n], random_nonzero(d, rng, pool))
    else:
        outside = [n for n in pool if n not in i.nodes]
        if outside:
            n = rng.choice(outside)
            outflow[n] = d.add(outflow.get(n, d.zero), random_nonzero(d, rng, pool))
    return FlowInterface(d, i.nodes, inflow, outflow)


def random_interface_triple(d: FlowDomain, rng: random.Random) -> tuple:
    """Three interfaces; usually pieces of one flow graph, sometimes perturbed or unrelated."""
    r = rng.random()
    h = random_flow_graph(d, rng, max_nodes=6)
    pool = sorted(h.nodes | h.graph.external_targets()) or ["n0", "n1", "x0"]
    if r < 0.15:
        return tuple(random_interface(d, rng, pool) for _ in range(3))
    parts = random_partition(h.nodes, rng, 3)
    ifs = [interface_of(restrict(h, p)) for p in parts]
    if r < 0.45:
        j = rng.randrange(3)
        ifs[j] = perturb_interface(d, rng, ifs[j], pool)
    return tuple(ifs)


def _mutate(d: FlowDomain, rng: random.Random, g: Graph) -> Graph:
    edges = dict(g.edges)
    nodes = sorted(g.nodes)
    targets = nodes + sorted(g.external_targets())
    r = rng.random()
    if edges and r < 0.4:
        (a, b), e = rng.choice(sorted(edges.items(), key=lambda kv: kv[0]))
        del edges[(a, b)]
        if r < 0.3 and targets:
            edges[(a, rng.choice(targets))] = e
    elif nodes and targets:
        a, b = rng.choice(nodes), rng.choice(targets)
        edges[(a, b)] = random_edge(d, rng, a)
    return Graph(d, nodes, edges)


def random_footprint_pair(d: FlowDomain, rng: random.Random, max_nodes: int = 6, tries: int = 400) -> tuple:
    """Two flow graphs over the same nodes with equal interfaces.

    The second is the first after a few random edge edits, re-solved under
    the same inflow, kept only when the interface survived.
    """
    while True:
        h = random_flow_graph(d, rng, max_nodes=max_nodes, acyclic=True, min_nodes=1)
        i = interface_of(h)
        g = h.graph
        for _ in range(tries):
            g = _mutate(d, rng, g if rng.random() < 0.7 else h.graph)
            if not g.is_acyclic():
                continue
            h2 = FlowGraph(g, solve_flow(g, h.inflow), h.inflow)
            if interface_of(h2) == i:
                return h, h2
        if rng.random() < 0.05:
            return h, h


def random_replacement(d: FlowDomain, rng: random.Random, max_nodes: int = 6, ea: bool = True) -> tuple:
    """``(h, region, new)``: a flow graph, a region of it and a candidate replacement.

    Candidates modify the region by splitting edges through fresh nodes,
    adding fresh side nodes, re-targeting edges or swapping successors, so
    some satisfy the replacement side conditions and some do not.
    """
    h = random_flow_graph(d, rng, max_nodes=max_nodes, min_nodes=1, ea=ea)
    nodes = sorted(h.nodes)
    region = frozenset(rng.sample(nodes, rng.randint(1, len(nodes))))
    old = restrict(h, region)
    g = old.graph
    fresh = [f"f{i}" for i in range(rng.randint(1, 2))]
    edges = dict(g.edges)
    inner = sorted(k for k in edges)
    for f in fresh:
        r = rng.random()
        if inner and r < 0.5:
            a, b = rng.choice(inner)
            if (a, b) in edges:
                e = edges.pop((a, b))
                edges[(a, f)] = e
                edges[(f, b)] = IDENTITY
        elif r < 0.75:
            src = rng.choice(sorted(region))
            edges[(src, f)] = random_edge(d, rng, src)
            if rng.random() < 0.5:
                edges[(f, rng.choice(sorted(region)))] = random_edge(d, rng, f)
    if rng.random() < 0.3:
        edges = dict(_mutate(d, rng, Graph(d, sorted(region) + fresh, edges)).edges)
    same = [(a, b) for a in sorted(region) for b in sorted(region)
            if a < b and old.flow[a] == old.flow[b] != d.zero]
    swapped = bool(same) and rng.random() < 0.5
    if swapped:
        # swap successors of two nodes carrying equal flow: outflow survives, paths may not
        a, b = rng.choice(same)
        swap = {a: b, b: a}
        edges = {(swap.get(x, x), y): e for (x, y), e in edges.items()}
    g2 = Graph(d, sorted(region) + fresh, {k: e for k, e in edges.items() if k[0] in region or k[0] in fresh})
    inflow = {n: old.inflow[n] for n in region}
    start = {**inflow, **{f: d.zero for f in fresh}}
    try:
        flow = solve_flow(g2, start)
    except (NoSolution, NoInflow):
        flow = None
    if swapped:
        # keep the old flows and let the inflow follow, so the region may feed itself
        kept = {**(flow or {f: d.zero for f in fresh}), **old.flow}
        try:
            return h, region, validate_flow_graph(g2, kept)
        except NoInflow:
            pass
    if flow is None:
        return h, region, old
    return h, region, FlowGraph(g2, flow, start)
