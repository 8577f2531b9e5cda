"""Executable priority inheritance protocol with flow-based invariant checks.

Processes and resources share one node type. ``r.next = p`` means ``p``
holds ``r``; ``p.next = r`` means ``p`` waits for ``r``. Every node
propagates its current priority along ``next``, and each node's ``prios``
multiset must equal its flow under that propagation with empty inflow.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Iterable, Mapping

from .domain import PIP, MaxWith
from .errors import InputError, ModelError, NoInflow, ScenarioError
from .extension import footprint
from .graph import FlowGraph, Graph, validate_flow_graph
from .interface import FlowInterface, interface_of
from .multiset import EMPTY, Multiset
from .report import Report
from .serialize import dumps, encode_interface

NO_PRIO = -1


@dataclass(frozen=True)
class PipNode:
    next: str | None
    curr_prio: int
    def_prio: int
    prios: Multiset = EMPTY
    kind: str = "process"


class PipState:
    """Immutable mapping of node ids to :class:`PipNode`."""

    __slots__ = ("nodes",)

    def __init__(self, nodes: Mapping[str, PipNode]):
        self.nodes = MappingProxyType(dict(nodes))

    def __getitem__(self, n: str) -> PipNode:
        try:
            return self.nodes[n]
        except KeyError:
            raise InputError(f"unknown PIP node {n!r}") from None

    def __contains__(self, n) -> bool:
        return n in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def set(self, n: str, **changes) -> "PipState":
        d = dict(self.nodes)
        d[n] = replace(self[n], **changes)
        return PipState(d)

    def kind(self, kind: str) -> list:
        return sorted(n for n, v in self.nodes.items() if v.kind == kind)

    def curr(self) -> dict:
        return {n: v.curr_prio for n, v in sorted(self.nodes.items())}

    def __eq__(self, other) -> bool:
        return isinstance(other, PipState) and dict(self.nodes) == dict(other.nodes)

    def __repr__(self) -> str:
        return f"PipState({len(self.nodes)} nodes)"


def _curr(prios: Multiset, def_prio: int) -> int:
    top = prios.max()
    return def_prio if top is None else max(top, def_prio)


def make_state(spec: Mapping[str, tuple]) -> PipState:
    """``{id: (kind, def_prio, next, prios)}`` with ``curr_prio`` derived."""
    nodes = {}
    for n, (kind, def_prio, nxt, prios) in spec.items():
        ms = prios if isinstance(prios, Multiset) else Multiset(prios)
        nodes[n] = PipNode(nxt, _curr(ms, def_prio), def_prio, ms, kind)
    return PipState(nodes)


# -- abstraction and invariants ---------------------------------------------


def pip_abstract(s: PipState) -> tuple:
    """Graph with edges ``x -> next(x)`` labelled ``MaxWith(def_prio(x))``, plus candidate flow."""
    edges = {(n, v.next): MaxWith(v.def_prio) for n, v in s.nodes.items() if v.next is not None}
    g = Graph(PIP, s.nodes.keys(), edges)
    return g, {n: v.prios for n, v in s.nodes.items()}


def pip_flow_graph(s: PipState) -> FlowGraph:
    g, flow = pip_abstract(s)
    return validate_flow_graph(g, flow)


def pip_gamma(s: PipState, n: str, flow=None) -> bool:
    v = s[n]
    if flow is None:
        flow = v.prios
    return (
        v.def_prio >= 0
        and all(q >= 0 for q in v.prios.distinct())
        and v.curr_prio == _curr(v.prios, v.def_prio)
        and v.prios == flow
        and v.next != n
    )


def pip_phi(i: FlowInterface) -> bool:
    return all(m == EMPTY for m in i.inflow.values()) and not i.outflow


def interface_hash(i: FlowInterface) -> str:
    return hashlib.sha256(dumps(encode_interface(i)).encode()).hexdigest()[:16]


def pip_check(s: PipState, expected: FlowInterface | None = None) -> Report:
    rep = Report("pip invariants")
    g, flow = pip_abstract(s)
    try:
        h = validate_flow_graph(g, flow)
    except NoInflow as exc:
        rep.check("valid flow graph", False, exc.node)
        return rep.stop()
    rep.check("valid flow graph", True)
    bad_in = sorted(n for n, m in h.inflow.items() if m != EMPTY)
    rep.check("empty inflow", not bad_in, bad_in)
    bad = [n for n in sorted(s.nodes) if not pip_gamma(s, n, h.flow[n])]
    rep.check("gamma", not bad, bad)
    i = interface_of(h)
    rep.check("phi", pip_phi(i), repr(i))
    if expected is not None:
        rep.check("interface preserved", i == expected, repr(i))
    return rep.stop()


# -- operations ---------------------------------------------------------------


def update(s: PipState, n: str, frm: int, to: int, budget: int | None = None) -> PipState:
    """Priority propagation loop; ``-1`` stands for "no priority"."""
    if n not in s:
        raise InputError(f"unknown PIP node {n!r}")
    budget = 4 * len(s) if budget is None else budget
    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise ModelError(f"update did not terminate within {budget} steps")
        v = s[n]
        prios = v.prios.remove_one(frm) if frm >= 0 else v.prios
        if to >= 0:
            prios = prios + Multiset([to])
        frm = v.curr_prio
        curr = _curr(prios, v.def_prio)
        to = curr
        s = s.set(n, prios=prios, curr_prio=curr)
        if frm == to or v.next is None:
            return s
        n = v.next


def _pre(cond: bool, msg: str):
    if not cond:
        raise ScenarioError(msg)


def acquire(s: PipState, p: str, r: str) -> PipState:
    s[p], s[r]
    _pre(p != r, "acquire needs p != r")
    _pre(s[p].next is None, f"{p} is already waiting (next = {s[p].next})")
    if s[r].next is None:
        s = s.set(r, next=p)
        return update(s, p, NO_PRIO, s[r].curr_prio)
    s = s.set(p, next=r)
    return update(s, r, NO_PRIO, s[p].curr_prio)


def release(s: PipState, p: str, r: str) -> PipState:
    s[p], s[r]
    _pre(p != r, "release needs p != r")
    _pre(s[r].next == p, f"{p} does not hold {r}")
    s = s.set(r, next=None)
    return update(s, p, s[r].curr_prio, NO_PRIO)


def add_edge(s: PipState, x: str, y: str) -> PipState:
    """Raw edge insertion ``x.next := y`` with priority propagation."""
    _pre(s[x].next is None and x != y, f"cannot add edge {x}->{y}")
    s[y]
    s = s.set(x, next=y)
    return update(s, y, NO_PRIO, s[x].curr_prio)


def remove_edge(s: PipState, x: str) -> PipState:
    """Raw edge removal ``x.next := null`` with priority propagation."""
    y = s[x].next
    _pre(y is not None, f"{x} has no outgoing edge")
    s = s.set(x, next=None)
    return update(s, y, s[x].curr_prio, NO_PRIO)


# -- files --------------------------------------------------------------------


def encode_state(s: PipState) -> dict:
    return {"nodes": {n: {"kind": v.kind, "def_prio": v.def_prio, "next": v.next, "prios": sorted(v.prios.elements())}
                      for n, v in sorted(s.nodes.items())}}


def decode_state(j) -> PipState:
    """``{"nodes": {id: {"kind", "def_prio", "next", "prios"}}}``; ``curr_prio`` is derived."""
    if not isinstance(j, dict) or not isinstance(j.get("nodes"), dict) or set(j) - {"nodes"}:
        raise InputError('PIP state file must be {"nodes": {id: {...}}}')
    spec = {}
    for n, v in j["nodes"].items():
        if not isinstance(v, dict) or set(v) - {"kind", "def_prio", "next", "prios"}:
            raise InputError(f"bad PIP node entry for {n!r}")
        d, prios = v.get("def_prio", 0), v.get("prios", [])
        if not isinstance(d, int) or d < 0 or not all(isinstance(q, int) and q >= 0 for q in prios):
            raise InputError(f"priorities of {n!r} must be natural numbers")
        spec[n] = (v.get("kind", "process"), d, v.get("next"), prios)
    s = make_state(spec)
    for n, v in s.nodes.items():
        if v.next is not None and v.next not in s:
            raise InputError(f"{n!r} points to unknown node {v.next!r}")
    return s


def decode_scenario(j) -> list:
    if not isinstance(j, list):
        raise InputError("scenario file must hold a JSON list")
    ops = []
    for item in j:
        if not isinstance(item, dict) or set(item) != {"op", "p", "r"} or item["op"] not in ("acquire", "release"):
            raise InputError(f'bad scenario step {item!r}; expected {{"op": "acquire"|"release", "p", "r"}}')
        ops.append(dict(item))
    return ops


# -- the Fig. 1 state ----------------------------------------------------------


def figure1_state() -> PipState:
    return make_state({
        "r1": ("resource", 0, "p2", []),
        "p2": ("process", 1, "r2", [0]),
        "r2": ("resource", 0, "p3", [1]),
        "p3": ("process", 2, "r3", [1]),
        "r3": ("resource", 0, "p1", [1, 2, 2]),
        "p1": ("process", 3, None, [2]),
        "p4": ("process", 1, "r3", []),
        "p5": ("process", 2, "r3", []),
        "p6": ("process", 2, "r4", []),
        "p7": ("process", 2, "r4", []),
        "r4": ("resource", 0, None, [2, 2]),
    })


FIGURE1_SCENARIO = [{"op": "acquire", "p": "p1", "r": "r1"}]


# -- scenario harness -----------------------------------------------------------


def initial_state(processes: int, resources: int, rng: random.Random) -> PipState:
    spec = {f"p{i}": ("process", rng.randint(0, 5), None, []) for i in range(1, processes + 1)}
    spec.update({f"r{i}": ("resource", 0, None, []) for i in range(1, resources + 1)})
    return make_state(spec)


def legal_moves(s: PipState) -> list:
    moves = []
    for p in s.kind("process"):
        if s[p].next is None:
            moves += [("acquire", p, r) for r in s.kind("resource")]
    for r in s.kind("resource"):
        if s[r].next is not None:
            moves.append(("release", s[r].next, r))
    return moves


def apply_op(s: PipState, op: str, p: str, r: str) -> PipState:
    if op == "acquire":
        return acquire(s, p, r)
    if op == "release":
        return release(s, p, r)
    raise InputError(f"unknown PIP op {op!r}")


def run_scenario(s: PipState, ops: Iterable[Mapping], seed: int | None = None) -> tuple:
    """Apply ``ops`` checking every boundary; returns ``(state, trace, report)``."""
    ops = list(ops)
    rep = Report("pip scenario")
    first = pip_check(s)
    rep.extend(first, "initial: ")
    if not first.ok:
        return s, [], rep.stop()
    h = pip_flow_graph(s)
    i0 = interface_of(h)
    trace = []
    for k, op in enumerate(ops):
        label = f"step {k}: {op['op']}({op['p']},{op['r']})"
        try:
            nxt = apply_op(s, op["op"], op["p"], op["r"])
        except ModelError as exc:
            rep.check(f"{label} terminates", False, str(exc))
            break
        r = pip_check(nxt, i0)
        entry = {"step": k, "op": op["op"], "p": op["p"], "r": op["r"], "checks": r.status}
        for e in r.failures:
            rep.check(f"{label}: {e.name}", False, e.witness)
        if not r.ok:
            trace.append(entry)
            break
        h2 = pip_flow_graph(nxt)
        entry["footprint"] = sorted(footprint(h, h2))
        entry["interface_hash"] = interface_hash(interface_of(h2))
        trace.append(entry)
        s, h = nxt, h2
    rep.check("every step passed", len(trace) == len(ops) and all(t["checks"] == "pass" for t in trace))
    rep.data.update(steps=len(trace), final_curr_prio=s.curr())
    if seed is not None:
        rep.data["seed"] = seed
    return s, trace, rep.stop()


def pip_run(seed: int, processes: int = 5, resources: int = 3, steps: int = 100, state: PipState | None = None) -> tuple:
    """Seeded random acquire/release run of ``steps`` operations; returns ``(trace, report)``.

    Waiting processes are never woken, so states eventually run out of legal
    moves; the run then continues with a fresh episode from a new initial
    state (or from ``state`` again when one was given).
    """
    rng = random.Random(seed)
    rep = Report("pip run")
    start = state if state is not None else initial_state(processes, resources, rng)
    trace, done, episode, failed = [], 0, 0, None
    while done < steps:
        ops, cur = [], start
        while done + len(ops) < steps:
            moves = legal_moves(cur)
            if not moves:
                break
            op, p, r = rng.choice(moves)
            ops.append({"op": op, "p": p, "r": r})
            try:
                cur = apply_op(cur, op, p, r)
            except ModelError:
                break
        if not ops:
            break
        _, tr, r = run_scenario(start, ops)
        for t in tr:
            t["episode"] = episode
            t["step"] += done
        trace += tr
        done += len(ops)
        episode += 1
        if not r.ok:
            failed = [e.to_dict() for e in r.failures]
            break
        start = state if state is not None else initial_state(processes, resources, rng)
    rep.check("every operation boundary passed", failed is None, failed)
    rep.data.update(seed=seed, steps=done, episodes=episode,
                    acquires=sum(t["op"] == "acquire" for t in trace),
                    releases=sum(t["op"] == "release" for t in trace))
    return trace, rep.stop()
