"""Brute-force reference implementations.

Everything here is deliberately naive and self-contained: values are
converted to plain ints, tuples or ``{elem: count}`` dicts on entry, edge
descriptors are interpreted by a local evaluator, and no solver, capacity or
symbolic composition from the rest of the package is used. The only shared
pieces are the descriptor data classes themselves and the result containers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import InputError, ResourceLimit
from .multiset import Multiset

DEFAULT_STATE_CAP = 1_000_000


@dataclass(frozen=True)
class ValueBound:
    """Enumeration bounds for the oracle's value space."""

    max_nat: int = 4
    max_elem: int = 3
    max_count: int = 2
    max_set_size: int = 2

    def __post_init__(self):
        for k in ("max_nat", "max_elem", "max_count", "max_set_size"):
            if getattr(self, k) < 0:
                raise InputError(f"{k} must be >= 0")


# -- local arithmetic on plain values ---------------------------------------
# multisets are tuples of sorted (elem, count) pairs so they stay hashable


def _msort(x):
    if isinstance(x, frozenset):
        return (1, len(x), tuple(sorted(x)))
    return (0, x)


def _ms(d: dict) -> tuple:
    return tuple(sorted(((k, c) for k, c in d.items() if c), key=lambda kc: _msort(kc[0])))


class _Arith:
    def __init__(self, domain):
        self.kind = domain.kind
        self.arity = domain.arity

    def zero(self):
        if self.kind == "path_count":
            return 0
        if self.kind == "product":
            return (0,) * self.arity
        return ()

    def plain(self, v):
        if isinstance(v, Multiset):
            return _ms(v.counts())
        return v

    def back(self, v):
        if self.kind in ("path_count", "product"):
            return v
        return Multiset(dict(v))

    def add(self, a, b):
        if self.kind == "path_count":
            return a + b
        if self.kind == "product":
            return tuple(x + y for x, y in zip(a, b))
        d = dict(a)
        for k, c in b:
            d[k] = d.get(k, 0) + c
        return _ms(d)

    def sub(self, a, b):
        if self.kind == "path_count":
            return a - b if a >= b else None
        if self.kind == "product":
            r = tuple(x - y for x, y in zip(a, b))
            return r if min(r, default=0) >= 0 else None
        d = dict(a)
        for k, c in b:
            if d.get(k, 0) < c:
                return None
            d[k] -= c
        return _ms(d)

    def apply(self, e, v):
        name = type(e).__name__
        if name == "Zero":
            return self.zero()
        if name == "Identity":
            return v
        if name == "ScaleVec":
            if self.kind == "path_count":
                return v * e.coeffs[0]
            return tuple(x * c for x, c in zip(v, e.coeffs))
        if name == "MaxWith":
            return ((max([k for k, _ in v] + [e.p]), 1),)
        if name == "AddMinWith":
            if not v:
                raise InputError("AddMinWith on an empty multiset")
            return ((e.n + min(k for k, _ in v), 1),)
        if name == "PathFilter":
            out = {}
            for s, c in v:
                if not (s & e.nodes):
                    out[s | e.nodes] = c
            return _ms(out)
        raise InputError(f"oracle cannot evaluate {e!r}")

    def space(self, b: ValueBound, nodes) -> list:
        if self.kind == "path_count":
            return list(range(b.max_nat + 1))
        if self.kind == "product":
            return list(itertools.product(range(b.max_nat + 1), repeat=self.arity))
        if self.kind == "pip":
            elems = list(range(b.max_elem + 1))
        elif self.kind == "shortest_path":
            elems = list(range(b.max_elem + 1)) + [math.inf]
        else:
            ns = sorted(nodes)
            elems = [frozenset(c) for r in range(b.max_set_size + 1) for c in itertools.combinations(ns, r)]
        out = []
        for counts in itertools.product(range(b.max_count + 1), repeat=len(elems)):
            out.append(_ms(dict(zip(elems, counts))))
        return out


def _pred_lists(g) -> dict:
    preds = {n: [] for n in g.nodes}
    for (a, b), e in g.edges.items():
        if b in preds:
            preds[b].append((a, e))
    return preds


def _incoming(ar: _Arith, preds, flow, n):
    total = ar.zero()
    for a, e in preds[n]:
        total = ar.add(total, ar.apply(e, flow[a]))
    return total


# -- flows ------------------------------------------------------------------


def enumerate_flows(g, inflow: Mapping, b: ValueBound = ValueBound(), state_cap: int = DEFAULT_STATE_CAP) -> list:
    """Every flow with values inside ``b`` that satisfies the flow equation."""
    ar = _Arith(g.domain)
    nodes = sorted(g.nodes)
    inn = {n: ar.plain(inflow.get(n, g.domain.zero)) for n in nodes}
    preds = _pred_lists(g)
    space = ar.space(b, nodes)
    if len(space) > state_cap:
        raise ResourceLimit(f"value space of {len(space)} exceeds the oracle cap")

    # greedy order: make equations checkable as early as possible
    order, placed = [], set()
    needs = {n: {n} | {a for a, _ in preds[n]} for n in nodes}
    while len(order) < len(nodes):
        best = max(
            (n for n in nodes if n not in placed),
            key=lambda n: (sum(1 for m in nodes if n in needs[m] and needs[m] <= placed | {n}), -nodes.index(n)),
        )
        order.append(best)
        placed.add(best)
    checks_at = {}
    seen = set()
    for i, n in enumerate(order):
        seen.add(n)
        checks_at[i] = [m for m in nodes if needs[m] <= seen and not any(m in checks_at[j] for j in range(i))]

    sols, flow, steps = [], {}, 0

    def go(i):
        nonlocal steps
        if i == len(order):
            sols.append({n: ar.back(flow[n]) for n in nodes})
            return
        n = order[i]
        for v in space:
            steps += 1
            if steps > state_cap:
                raise ResourceLimit(f"oracle search exceeded {state_cap} states")
            flow[n] = v
            if all(ar.add(inn[m], _incoming(ar, preds, flow, m)) == flow[m] for m in checks_at[i]):
                go(i + 1)
        del flow[n]

    go(0)
    return sols


def path_sum_flow(g, inflow: Mapping, max_len: int | None = None) -> dict:
    """Flow as the sum over all walks of the inflow pushed along each walk.

    Only meaningful when every long enough walk carries zero (acyclic
    graphs, or nilpotent edge families); raises InputError otherwise.
    """
    ar = _Arith(g.domain)
    nodes = sorted(g.nodes)
    cap = len(nodes) + 1 if max_len is None else max_len
    succ = {n: [] for n in nodes}
    for (a, b), e in sorted(g.edges.items()):
        if b in succ:
            succ[a].append((b, e))
    zero = ar.zero()
    total = {n: ar.plain(inflow.get(n, g.domain.zero)) for n in nodes}
    stack = [(n, total[n], 0) for n in nodes if total[n] != zero]
    while stack:
        n, v, depth = stack.pop()
        for t, e in succ[n]:
            w = ar.apply(e, v)
            if w == zero:
                continue
            if depth + 1 > cap:
                raise InputError("walk sum does not vanish; graph is neither acyclic nor nilpotent")
            total[t] = ar.add(total[t], w)
            stack.append((t, w, depth + 1))
    return {n: ar.back(total[n]) for n in nodes}


# -- effective acyclicity ----------------------------------------------------


def brute_cycle_check(h, max_len: int, step_cap: int = 5_000_000) -> bool:
    """True iff every closed walk of length ``1..max_len`` sends the start's flow to zero."""
    ar = _Arith(h.domain)
    nodes = sorted(h.nodes)
    zero = ar.zero()
    succ = {n: [] for n in nodes}
    for (a, b), e in sorted(h.graph.edges.items()):
        if b in succ:
            succ[a].append((b, e))
    steps = 0
    for start in nodes:
        v0 = ar.plain(h.flow[start])
        if v0 == zero:
            continue
        # nodes from which ``start`` is reachable
        back = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for a in nodes:
                if a not in back and any(t == x for t, _ in succ[a]):
                    back.add(a)
                    frontier.append(a)
        stack = [(start, v0, 0)]
        while stack:
            n, v, k = stack.pop()
            for t, e in succ[n]:
                steps += 1
                if steps > step_cap:
                    raise ResourceLimit(f"cycle enumeration exceeded {step_cap} steps")
                w = ar.apply(e, v)
                if w == zero:
                    continue
                if t == start:
                    return False
                if k + 1 < max_len and t in back:
                    stack.append((t, w, k + 1))
    return True


# -- footprints and interfaces ----------------------------------------------


def _region_interface(h, xs: frozenset):
    ar = _Arith(h.domain)
    zero = ar.zero()
    flow = {n: ar.plain(v) for n, v in h.flow.items()}
    inn = {}
    for n in sorted(xs):
        got = zero
        for (a, b), e in h.graph.edges.items():
            if b == n and a in xs:
                got = ar.add(got, ar.apply(e, flow[a]))
        r = ar.sub(flow[n], got)
        if r is None:
            return None
        inn[n] = r
    out = {}
    for (a, b), e in h.graph.edges.items():
        if a in xs and b not in xs:
            out[b] = ar.add(out.get(b, zero), ar.apply(e, flow[a]))
    out = {k: v for k, v in out.items() if v != zero}
    return inn, out


def _part(h, xs: frozenset):
    edges = {k: e for k, e in h.graph.edges.items() if k[0] in xs}
    flow = {n: h.flow[n] for n in xs}
    return edges, flow


def minimal_footprint_search(h, h2, max_nodes: int = 12) -> frozenset:
    """Smallest region outside which both graphs agree and whose interfaces match."""
    if h.nodes != h2.nodes:
        raise InputError("footprint search needs equal node sets")
    nodes = sorted(h.nodes)
    if len(nodes) > max_nodes:
        raise ResourceLimit(f"{len(nodes)} nodes exceed the subset-search cap of {max_nodes}")
    all_nodes = frozenset(nodes)
    for r in range(len(nodes) + 1):
        for xs in itertools.combinations(nodes, r):
            xs = frozenset(xs)
            rest = all_nodes - xs
            if _part(h, rest) != _part(h2, rest):
                continue
            if _region_interface(h, xs) == _region_interface(h2, xs):
                return xs
    raise InputError("graphs have different interfaces; no footprint exists")


def interface_compose_oracle(h1, h2):
    """Interface of ``h1 ⊙ h2`` computed from the graphs, or None when undefined."""
    from .interface import FlowInterface

    if h1.nodes & h2.nodes:
        return None
    ar = _Arith(h1.domain)
    zero = ar.zero()
    flow = {**{n: ar.plain(v) for n, v in h1.flow.items()}, **{n: ar.plain(v) for n, v in h2.flow.items()}}
    edges = list(h1.graph.edges.items()) + list(h2.graph.edges.items())
    nodes = set(flow)
    inn = {}
    for n in sorted(nodes):
        got = zero
        for (a, b), e in edges:
            if b == n:
                got = ar.add(got, ar.apply(e, flow[a]))
        r = ar.sub(flow[n], got)
        if r is None:
            return None
        inn[n] = ar.back(r)
    out = {}
    for (a, b), e in edges:
        if b not in nodes:
            out[b] = ar.add(out.get(b, zero), ar.apply(e, flow[a]))
    return FlowInterface(h1.domain, nodes, inn, {k: ar.back(v) for k, v in out.items()})
