"""Randomized algebraic law suites."""

from __future__ import annotations

import random
from typing import Any, Callable, NamedTuple

from .domain import FlowDomain
from .generators import (
    perturb_interface,
    random_flow_graph,
    random_interface_triple,
    random_partition,
    random_value,
)
from .graph import FlowGraph, compose_flow_graphs, restrict
from .interface import FlowInterface, empty_interface, interface_compose, interface_of
from .report import Report


class MonoidOps(NamedTuple):
    """The bare monoid interface the law checker exercises."""

    zero: Any
    add: Callable
    subtract: Callable
    sample: Callable  # rng -> value


def monoid_ops(d: FlowDomain) -> MonoidOps:
    def sample(rng):
        return d.zero if rng.random() < 0.1 else random_value(d, rng, ("a", "b", "c"))

    return MonoidOps(d.zero, d.add, d.subtract, sample)


def check_monoid_laws(d: FlowDomain | MonoidOps, seed: int = 0, cases: int = 1000) -> Report:
    ops = monoid_ops(d) if isinstance(d, FlowDomain) else d
    rng = random.Random(seed)
    rep = Report(f"monoid laws ({d.name if isinstance(d, FlowDomain) else 'custom'})")
    bad: dict = {}

    def note(law, ok, witness):
        if not ok and law not in bad:
            bad[law] = witness

    z, add, sub = ops.zero, ops.add, ops.subtract
    for _ in range(cases):
        a, b, c = ops.sample(rng), ops.sample(rng), ops.sample(rng)
        note("commutativity", add(a, b) == add(b, a), [a, b])
        note("associativity", add(add(a, b), c) == add(a, add(b, c)), [a, b, c])
        note("zero identity", add(a, z) == a and add(z, a) == a, [a])
        note("cancellativity", add(a, b) != add(a, c) or b == c, [a, b, c])
        note("subtract round-trip", sub(add(a, b), b) == a, [a, b])
        note("positivity", add(a, b) != z or (a == z and b == z), [a, b])
    for law in ("commutativity", "associativity", "zero identity", "cancellativity",
                "subtract round-trip", "positivity"):
        rep.check(law, law not in bad, repr(bad.get(law)))
    rep.data["cases"] = cases
    return rep.stop()


def _compose(a, b):
    if a is None or b is None:
        return None
    return interface_compose(a, b)


def separation_laws_hold(d: FlowDomain, i1: FlowInterface, i2: FlowInterface, i3: FlowInterface,
                         rng: random.Random | None = None) -> dict:
    """Evaluate the four laws on one triple; returns law -> bool."""
    e = empty_interface(d)
    c12 = _compose(i1, i2)
    res = {
        "commutativity": c12 == _compose(i2, i1),
        "associativity": _compose(c12, i3) == _compose(i1, _compose(i2, i3)),
        "identity": _compose(i1, e) == i1 and _compose(e, i1) == i1,
    }
    ok = True
    c13 = _compose(i1, i3)
    if c12 is not None and c12 == c13 and i2 != i3:
        ok = False
    if rng is not None and c12 is not None:
        pool = sorted(i1.nodes | i2.nodes | i3.nodes | set(i1.outflow) | set(i2.outflow)) or ["n0"]
        alt = perturb_interface(d, rng, i2, pool)
        if alt != i2 and _compose(i1, alt) == c12:
            ok = False
    res["cancellativity"] = ok
    return res


def check_separation_algebra_laws(d: FlowDomain, seed: int = 0, cases: int = 1000) -> Report:
    rng = random.Random(seed)
    rep = Report(f"separation algebra laws ({d.name})")
    failures = {}
    defined = 0
    for case in range(cases):
        i1, i2, i3 = random_interface_triple(d, rng)
        if _compose(_compose(i1, i2), i3) is not None:
            defined += 1
        for law, ok in separation_laws_hold(d, i1, i2, i3, rng).items():
            if not ok and law not in failures:
                failures[law] = {"case": case, "triple": [repr(i1), repr(i2), repr(i3)]}
    for law in ("commutativity", "associativity", "identity", "cancellativity"):
        rep.check(law, law not in failures, failures.get(law))
    rep.data.update(cases=cases, fully_defined=defined)
    return rep.stop()


def check_congruence(h1: FlowGraph, h2: FlowGraph) -> Report:
    """Composition of flow graphs and of their interfaces agree."""
    rep = Report("congruence")
    h = compose_flow_graphs(h1, h2)
    i = interface_compose(interface_of(h1), interface_of(h2))
    rep.check("definedness agrees", (h is None) == (i is None),
              {"graphs": h is not None, "interfaces": i is not None})
    if h is not None and i is not None:
        rep.check("interface of composite", interface_of(h) == i, [repr(interface_of(h)), repr(i)])
    return rep.stop()


def congruence_suite(d: FlowDomain, seed: int = 0, cases: int = 500, max_nodes: int = 8) -> Report:
    """Random bipartitions of random EA flow graphs, plus mismatched pairs."""
    from .extension import check_effectively_acyclic

    rng = random.Random(seed)
    rep = Report(f"congruence suite ({d.name})")
    first_bad = None
    defined = non_ea = 0
    for case in range(cases):
        h = random_flow_graph(d, rng, max_nodes=max_nodes, ea=True)
        if d.endomorphic and not check_effectively_acyclic(h).effectively_acyclic:
            non_ea += 1
        a, b = random_partition(h.nodes, rng, 2)
        h1, h2 = restrict(h, a), restrict(h, b)
        if rng.random() < 0.3:
            # pair with a piece of an unrelated graph over a disjoint namespace
            other = random_flow_graph(d, rng, max_nodes=max_nodes, prefix="n")
            renamed = {n for n in other.nodes if n not in h1.nodes}
            h2 = restrict(other, renamed)
        r = check_congruence(h1, h2)
        defined += compose_flow_graphs(h1, h2) is not None
        if not r.ok and first_bad is None:
            first_bad = {"case": case, "entries": [e.to_dict() for e in r.failures]}
    rep.check("generated graphs are effectively acyclic", non_ea == 0, non_ea)
    rep.check("definedness and values agree", first_bad is None, first_bad)
    rep.data.update(cases=cases, defined=defined)
    return rep.stop()
