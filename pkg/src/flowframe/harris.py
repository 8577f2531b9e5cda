"""Seeded interleaving simulator of Harris' list with a drained free list.

The shared heap holds nodes with a ``key``, a tagged ``next`` reference
(target plus mark bit) and an ``fnext`` reference for the free list. Every
thread runs search/insert/delete as a generator that yields one shared
access at a time; the scheduler performs the access atomically, classifies
the resulting heap change as an action and re-checks the flow invariants.

The heap abstracts into the product path-counting domain: the first
component counts ``next`` paths from ``mh``, the second ``fnext`` paths
from ``fh``.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field, replace as dc_replace
from types import MappingProxyType
from typing import Iterable, Mapping

from .domain import FNEXT_ONLY, HARRIS, IDENTITY, NEXT_ONLY
from .errors import FlowError, ModelError, NoSolution, ReplacementError
from .extension import check_effectively_acyclic, contextual_extension, replace as replace_region
from .graph import FlowGraph, Graph, restrict, singleton, solve_flow
from .interface import FlowInterface, interface_of
from .report import Report

MAIN = (1, 0)
FREE = (0, 1)
BOTH = (1, 1)
KINDS = ("Insert", "Mark", "Link", "Unlink", "LocalOnly")


@dataclass(frozen=True)
class HarrisNode:
    key: float  # ints, plus -inf/inf for the sentinels
    next: str | None = None
    marked: bool = False
    fnext: str | None = None


class HarrisHeap:
    """Immutable shared state: nodes plus the roots ``mh``, ``fh`` and ``ft``."""

    __slots__ = ("nodes", "mh", "fh", "ft", "_abstraction")

    def __init__(self, nodes: Mapping[str, HarrisNode], mh: str, fh: str, ft: str):
        self.nodes = MappingProxyType(dict(nodes))
        self.mh, self.fh, self.ft = mh, fh, ft
        self._abstraction = None  # cached FlowGraph

    def __getitem__(self, n: str) -> HarrisNode:
        try:
            return self.nodes[n]
        except KeyError:
            raise ModelError(f"dangling reference to {n!r}") from None

    def __contains__(self, n) -> bool:
        return n in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def set(self, n: str, **changes) -> "HarrisHeap":
        d = dict(self.nodes)
        d[n] = dc_replace(self[n], **changes)
        return HarrisHeap(d, self.mh, self.fh, self.ft)

    def add(self, n: str, node: HarrisNode) -> "HarrisHeap":
        d = dict(self.nodes)
        d[n] = node
        return HarrisHeap(d, self.mh, self.fh, self.ft)

    def with_ft(self, ft: str) -> "HarrisHeap":
        return HarrisHeap(self.nodes, self.mh, self.fh, ft)

    def roots(self) -> tuple:
        return self.mh, self.fh, self.ft

    def __eq__(self, other) -> bool:
        return (isinstance(other, HarrisHeap) and self.roots() == other.roots()
                and dict(self.nodes) == dict(other.nodes))

    def __repr__(self) -> str:
        return f"HarrisHeap({len(self.nodes)} nodes, ft={self.ft!r})"


def initial_heap() -> HarrisHeap:
    """Head and tail sentinels plus a marked free-list sentinel that starts as ``ft``."""
    return HarrisHeap({
        "-inf": HarrisNode(-math.inf, "inf"),
        "inf": HarrisNode(math.inf),
        "fh": HarrisNode(-math.inf, None, True),
    }, mh="-inf", fh="fh", ft="fh")


def figure3_heap() -> HarrisHeap:
    """The drawn state: 5 and 10 are marked and still on both lists."""
    n = HarrisNode
    return HarrisHeap({
        "-inf": n(-math.inf, "3"),
        "3": n(3, "5"),
        "5": n(5, "9", True, "10"),
        "9": n(9, "10"),
        "10": n(10, "12", True),
        "12": n(12, "inf"),
        "inf": n(math.inf),
        "2": n(2, "3", True, "6"),
        "6": n(6, "9", True, "1"),
        "1": n(1, "2", True, "7"),
        "7": n(7, "9", True, "5"),
    }, mh="-inf", fh="2", ft="10")


# -- abstraction ------------------------------------------------------------------


def harris_edges(heap: HarrisHeap) -> dict:
    edges = {}
    for x, v in heap.nodes.items():
        if v.next is not None and v.next == v.fnext:
            edges[(x, v.next)] = IDENTITY
            continue
        if v.next is not None:
            edges[(x, v.next)] = NEXT_ONLY
        if v.fnext is not None:
            edges[(x, v.fnext)] = FNEXT_ONLY
    return edges


def harris_inflow(heap: HarrisHeap) -> dict:
    inflow = {n: (0, 0) for n in heap.nodes}
    inflow[heap.mh] = MAIN
    inflow[heap.fh] = HARRIS.add(inflow[heap.fh], FREE)
    return inflow


def harris_abstract(heap: HarrisHeap) -> tuple:
    """``(Graph, flow)``; raises ModelError when no EA flow exists."""
    heap = _heap_of(heap)
    g = Graph(HARRIS, heap.nodes.keys(), harris_edges(heap))
    try:
        flow = solve_flow(g, harris_inflow(heap), strategy="capacity")
    except NoSolution as exc:
        raise ModelError(f"heap abstraction has no effectively acyclic flow: {exc}") from None
    return g, flow


def harris_flow_graph(heap: HarrisHeap) -> FlowGraph:
    heap = _heap_of(heap)
    if heap._abstraction is None:
        g, flow = harris_abstract(heap)
        heap._abstraction = FlowGraph(g, flow, harris_inflow(heap))
    return heap._abstraction


def harris_gamma(heap: HarrisHeap, x: str, flow) -> bool:
    v = heap[x]
    return (
        flow in (MAIN, FREE, BOTH)
        and (flow == MAIN or v.marked)
        and (x != heap.ft or flow[1] == 1)
        and (v.marked or v.fnext is None)
    )


def harris_phi(i: FlowInterface, heap: HarrisHeap) -> bool:
    return i.inflow == harris_inflow(heap) and not i.outflow


def _walk(heap: HarrisHeap, start: str, attr: str) -> tuple:
    """Nodes along ``attr`` from ``start`` and whether the walk ends in null."""
    seen, order, n = set(), [], start
    while n is not None:
        if n in seen or n not in heap:
            return order, False
        seen.add(n)
        order.append(n)
        n = getattr(heap.nodes[n], attr)
    return order, True


def main_keys(heap: HarrisHeap) -> frozenset:
    """The abstract set: keys of unmarked nodes on the ``next`` list from ``mh``."""
    order, _ = _walk(heap, heap.mh, "next")
    return frozenset(heap.nodes[n].key for n in order
                     if not heap.nodes[n].marked and math.isfinite(heap.nodes[n].key))


def harris_check(sim) -> Report:
    heap = _heap_of(sim)
    rep = Report("harris invariants")
    main, main_ok = _walk(heap, heap.mh, "next")
    free, free_ok = _walk(heap, heap.fh, "fnext")
    rep.check("(b) next list from mh is null-terminated", main_ok, main[-3:])
    rep.check("(b) fnext list from fh is null-terminated", free_ok, free[-3:])
    stray = sorted(set(heap.nodes) - set(main) - set(free))
    rep.check("(a) every node is on the main or free list", not stray, stray)
    dangling = sorted(x for x in free if heap.nodes[x].next is not None and heap.nodes[x].next not in heap)
    rep.check("(b) next edges of free-list nodes stay in the heap", not dangling, dangling)
    unmarked = sorted(x for x in free if not heap.nodes[x].marked)
    rep.check("(c) free-list nodes are marked", not unmarked, unmarked)
    rep.check("(d) ft is on the free list", heap.ft in free, heap.ft)
    try:
        h = harris_flow_graph(heap)
    except FlowError as exc:
        rep.check("valid flow graph", False, str(exc))
        return rep.stop()
    rep.check("valid flow graph", True)
    ea = check_effectively_acyclic(h)
    rep.check("effectively acyclic", ea.effectively_acyclic, ea.witness)
    bad = sorted(x for x in heap.nodes if not harris_gamma(heap, x, h.flow[x]))
    rep.check("gamma", not bad, {x: list(h.flow[x]) for x in bad} or None)
    rep.check("phi", harris_phi(interface_of(h), heap), repr(interface_of(h)))
    return rep.stop()


def _heap_of(x) -> HarrisHeap:
    return x.heap if isinstance(x, HarrisSim) else x


# -- actions ----------------------------------------------------------------------


@dataclass(frozen=True)
class HarrisAction:
    kind: str
    touched: tuple = ()
    pre: Mapping = field(default_factory=dict)   # node -> singleton interface before
    post: Mapping = field(default_factory=dict)  # node -> singleton interface after
    condition: bool = True
    detail: str | None = None
    key: float | None = None


def _singletons(h: FlowGraph, nodes: Iterable[str]) -> dict:
    return {n: interface_of(singleton(h, n)) for n in nodes if n in h.nodes}


def _pair_preserved(h: FlowGraph, h2: FlowGraph, nodes) -> tuple:
    i, i2 = interface_of(restrict(h, nodes)), interface_of(restrict(h2, nodes))
    return i == i2, None if i == i2 else f"{i!r} != {i2!r}"


def classify_action(pre: HarrisHeap, post: HarrisHeap, pre_h: FlowGraph | None = None,
                    post_h: FlowGraph | None = None) -> HarrisAction:
    """Match the heap diff against Insert, Mark, Link, Unlink or LocalOnly.

    Also evaluates the action's interface side condition. An unrecognised
    diff raises ModelError.
    """
    pre, post = _heap_of(pre), _heap_of(post)
    added = sorted(set(post.nodes) - set(pre.nodes))
    removed = sorted(set(pre.nodes) - set(post.nodes))
    changed = sorted(n for n in pre.nodes if n in post.nodes and pre.nodes[n] != post.nodes[n])
    roots = (pre.mh, pre.fh) == (post.mh, post.fh)
    if not (added or removed or changed) and pre.ft == post.ft:
        return HarrisAction("LocalOnly")
    if removed or not roots:
        raise ModelError(f"unclassifiable heap change: removed {removed}, roots {post.roots()}")
    pre_h = pre_h or harris_flow_graph(pre)
    post_h = post_h or harris_flow_graph(post)

    def action(kind, touched, ok, detail=None, key=None):
        return HarrisAction(kind, tuple(touched), _singletons(pre_h, touched), _singletons(post_h, touched),
                            ok, detail, key)

    if len(added) == 1 and len(changed) == 1 and pre.ft == post.ft:
        (n,), (l,) = added, changed
        a, b, v = pre.nodes[l], post.nodes[l], post.nodes[n]
        if (not a.marked and not b.marked and b.next == n and v.next == a.next
                and not v.marked and v.fnext is None and a.fnext == b.fnext):
            ok, detail = _insert_condition(pre_h, post_h, l, n)
            return action("Insert", (l, n), ok, detail, v.key)
    if not added and len(changed) == 1 and pre.ft == post.ft:
        (x,) = changed
        a, b = pre.nodes[x], post.nodes[x]
        if not a.marked and b.marked and a.next == b.next and a.fnext == b.fnext:
            ok, detail = _pair_preserved(pre_h, post_h, {x})
            return action("Mark", (x,), ok, detail, a.key)
        if (not a.marked and not b.marked and a.fnext == b.fnext and a.next in pre
                and pre.nodes[a.next].marked and pre.nodes[a.next].next == b.next):
            r = a.next
            ok, detail = _pair_preserved(pre_h, post_h, {x, r})
            return action("Unlink", (x, r), ok, detail, pre.nodes[r].key)
    if not added and changed == [pre.ft] and post.ft != pre.ft:
        f, r = pre.ft, post.ft
        a, b = pre.nodes[f], post.nodes[f]
        if (a.fnext is None and b.fnext == r and a.next == b.next and a.marked == b.marked
                and r in pre and pre.nodes[r].marked and pre.nodes[r].fnext is None):
            ok, detail = _pair_preserved(pre_h, post_h, {f, r})
            return action("Link", (f, r), ok, detail, pre.nodes[r].key)
    raise ModelError(f"unclassifiable heap change: added {added}, changed {changed}, ft {pre.ft}->{post.ft}")


def _insert_condition(pre_h: FlowGraph, post_h: FlowGraph, l: str, n: str) -> tuple:
    """``I_l ≾ I'_l ⊕ I_n`` plus a subflow-preserving replacement that rebuilds ``post_h``."""
    new = restrict(post_h, {l, n})
    if not contextual_extension(interface_of(restrict(pre_h, {l})), interface_of(new)):
        return False, "linked-in pair does not contextually extend the old node"
    try:
        rep = replace_region(pre_h, {l}, new, mode="subflow")
    except ReplacementError as exc:
        return False, f"{type(exc).__name__}: {exc}"
    if rep.result != post_h:
        return False, "replacement result differs from the post-state abstraction"
    return True, None


# -- threads ----------------------------------------------------------------------


@dataclass
class _Op:
    name: str
    key: int
    start: int
    gen: object
    seen_in: bool = False
    seen_out: bool = False
    actions: list = field(default_factory=list)


@dataclass
class _Thread:
    tid: int
    script: list
    remaining: int
    op: _Op | None = None
    request: tuple | None = None
    done: list = field(default_factory=list)


class HarrisSim:
    """Shared heap, thread table and seeded scheduler.

    ``scripts`` fixes each thread's operations as ``(name, key)`` pairs;
    otherwise threads draw ``ops`` random operations over ``range(keys)``.
    ``schedule`` fixes the first scheduling decisions.
    """

    def __init__(self, seed: int = 0, threads: int = 3, ops: int = 200, keys: int = 32,
                 heap: HarrisHeap | None = None, scripts: list | None = None, schedule: Iterable[int] = ()):
        if threads < 1:
            raise ModelError("need at least one thread")
        self.rng = random.Random(seed)
        self.keys = keys
        self.heap = heap if heap is not None else initial_heap()
        self.steps = 0
        self.serial = 0
        self.schedule = list(schedule)
        self.picked: list = []
        self._last = None
        self.threads = []
        for t in range(threads):
            script = list(scripts[t]) if scripts is not None else []
            self.threads.append(_Thread(t, script, len(script) if scripts is not None else ops))
        for t in self.threads:
            self._next_op(t)

    # -- shared accesses ----------------------------------------------------------

    def _access(self, req: tuple):
        kind = req[0]
        h = self.heap
        if kind == "read_next":
            v = h[req[1]]
            return v.next, v.marked
        if kind == "read_fnext":
            return h[req[1]].fnext
        if kind == "read_ft":
            return h.ft
        if kind == "cas_next":
            _, x, old, new = req
            v = h[x]
            if (v.next, v.marked) != old:
                return False
            self.heap = h.set(x, next=new[0], marked=new[1])
            return True
        if kind == "cas_insert":
            _, l, r, n, node = req
            v = h[l]
            if (v.next, v.marked) != (r, False):
                return False
            self.heap = h.add(n, node).set(l, next=n)
            return True
        if kind == "cas_link":
            # CAS(f.fnext, null, r) with ft := r serialized into the same step
            _, f, r = req
            if h[f].fnext is not None:
                return False
            self.heap = h.set(f, fnext=r).with_ft(r)
            return True
        raise ModelError(f"unknown shared access {req!r}")

    # -- procedures ---------------------------------------------------------------

    def _key(self, n: str):
        return self.heap[n].key

    def _linked(self, r: str):
        f = yield ("read_fnext", r)
        if f is not None:
            return True
        t = yield ("read_ft",)
        return t == r

    def _search(self, k: int):
        mh = self.heap.mh
        while True:
            l = r = mh
            n, nm = yield ("read_next", mh)
            restart = False
            while nm or self._key(r) < k:
                if nm:
                    # r is marked; unlink only once it is reachable from fh
                    if not (yield from self._linked(r)):
                        restart = True
                        break
                    if not (yield ("cas_next", l, (r, False), (n, False))):
                        restart = True
                        break
                    r = n
                else:
                    if n is None:
                        raise ModelError(f"main list ends at {r!r} before reaching the tail")
                    l, r = r, n
                n, nm = yield ("read_next", r)
            if not restart:
                return l, r

    def _insert(self, k: int):
        self.serial += 1
        n = f"{k}.{self.serial}"
        while True:
            l, r = yield from self._search(k)
            if self._key(r) == k:
                return False
            if (yield ("cas_insert", l, r, n, HarrisNode(k, r))):
                return True

    def _delete(self, k: int):
        while True:
            l, r = yield from self._search(k)
            n, nm = yield ("read_next", r)
            if self._key(r) != k:
                return False
            if not nm and (yield ("cas_next", r, (n, False), (n, True))):
                break
        while True:
            f = yield ("read_ft",)
            if (yield ("cas_link", f, r)):
                break
        # if this fails the next search unlinks r
        yield ("cas_next", l, (r, False), (n, False))
        return True

    def _contains(self, k: int):
        _, r = yield from self._search(k)
        return self._key(r) == k

    # -- scheduling ---------------------------------------------------------------

    def _next_op(self, t: _Thread):
        t.op = t.request = None
        if t.remaining <= 0:
            return
        if t.script:
            name, k = t.script.pop(0)
        else:
            name = self.rng.choices(("insert", "delete", "search"), (2, 2, 1))[0]
            k = self.rng.randrange(self.keys)
        t.remaining -= 1
        proc = {"insert": self._insert, "delete": self._delete, "search": self._contains}.get(name)
        if proc is None:
            raise ModelError(f"unknown Harris operation {name!r}")
        keys = main_keys(self.heap)
        t.op = _Op(name, k, self.steps, proc(k), seen_in=k in keys, seen_out=k not in keys)
        self._advance(t, None, first=True)

    def _advance(self, t: _Thread, value, first: bool = False):
        try:
            t.request = next(t.op.gen) if first else t.op.gen.send(value)
        except StopIteration as stop:
            op = t.op
            t.done.append({"op": op.name, "key": op.key, "result": stop.value, "start": op.start,
                           "end": self.steps, "seen_in": op.seen_in, "seen_out": op.seen_out,
                           "actions": op.actions})
            self._next_op(t)

    def runnable(self) -> list:
        return [t for t in self.threads if t.request is not None]

    def step(self) -> tuple:
        """Run one shared access of a scheduled thread; returns ``(thread, action, pre, post)``."""
        ready = self.runnable()
        if not ready:
            raise ModelError("no runnable thread")
        if self.schedule:
            tid = self.schedule.pop(0)
            t = next((x for x in ready if x.tid == tid), None)
            if t is None:
                raise ModelError(f"scheduled thread {tid} is not runnable")
        else:
            t = self.rng.choice(ready)
        self.picked.append(t.tid)
        pre = self.heap
        req = t.request
        value = self._access(req)
        self.steps += 1
        post = self.heap
        if post is pre:
            act = HarrisAction("LocalOnly")
        else:
            act = classify_action(pre, post)
            if act.kind in ("Insert", "Mark"):
                t.op.actions.append((act.kind, act.key, self.steps))
        self._last = (t.tid, req, pre, post, act)
        self._advance(t, value)
        return t.tid, act, pre, post


def step(sim: HarrisSim) -> tuple:
    """One scheduler step; returns ``(sim, action)``."""
    _, act, _, _ = sim.step()
    return sim, act


# -- runs -------------------------------------------------------------------------


def _describe(req: tuple) -> str:
    return f"{req[0]}({', '.join(str(x) for x in req[1:4])})"


def _op_consistent(o: dict) -> bool:
    kind = {"insert": "Insert", "delete": "Mark"}.get(o["op"])
    own = [a for a in o["actions"] if a[1] == o["key"] and a[0] == kind]
    if len(o["actions"]) != len(own) or len(own) > 1:
        return False
    if o["op"] == "search":
        return o["seen_in"] if o["result"] else o["seen_out"]
    if o["result"]:
        return len(own) == 1
    # a failed insert saw the key present, a failed delete saw it absent
    return not own and (o["seen_in"] if o["op"] == "insert" else o["seen_out"])


def run_simulation(seed: int = 0, threads: int = 3, ops: int = 200, key_range: int = 32,
                   heap: HarrisHeap | None = None, scripts: list | None = None, schedule: Iterable[int] = (),
                   max_steps: int | None = None) -> tuple:
    """Seeded run checking every shared-state step; returns ``(trace, report)``.

    ``ops`` counts operations per thread. A failure stops the run and the
    report carries the schedule needed to replay it.
    """
    sim = HarrisSim(seed, threads, ops, key_range, heap, scripts, schedule)
    rep = Report("harris run")
    first = harris_check(sim)
    rep.extend(first, "initial: ")
    counts = Counter()
    history, trace = [], []
    failure = None if first.ok else "initial state"
    max_steps = max_steps or 2000 * max(1, threads * (ops if scripts is None else max(map(len, scripts), default=1)))
    keys = main_keys(sim.heap)
    while failure is None and sim.runnable():
        if sim.steps >= max_steps:
            failure = f"no progress within {max_steps} steps"
            break
        try:
            tid, act, pre, post = sim.step()
        except ModelError as exc:
            failure = str(exc)
            break
        counts[act.kind] += 1
        if act.kind == "LocalOnly":
            assert post is pre
            continue
        chk = harris_check(post)
        new_keys = main_keys(post)
        if act.kind == "Insert":
            keys_ok = act.key not in keys and new_keys == keys | {act.key}
        elif act.kind == "Mark":
            keys_ok = act.key in keys and new_keys == keys - {act.key}
        else:
            keys_ok = new_keys == keys
        if act.kind in ("Insert", "Mark"):
            history.append({"step": sim.steps, "thread": tid, "action": act.kind, "key": act.key})
            for t in sim.threads:
                if t.op is not None:
                    t.op.seen_in |= t.op.key in new_keys
                    t.op.seen_out |= t.op.key not in new_keys
        ok = chk.ok and act.condition and keys_ok
        trace.append({"step": sim.steps, "thread": tid, "action": act.kind, "touched": list(act.touched),
                      "access": _describe(sim._last[1]), "checks": "pass" if ok else "fail"})
        if not ok:
            bits = [f"{e.name}: {e.witness}" for e in chk.failures]
            if not act.condition:
                bits.append(f"{act.kind} side condition: {act.detail}")
            if not keys_ok:
                bits.append(f"key set {sorted(keys)} -> {sorted(new_keys)} under {act.kind}({act.key})")
            failure = f"step {sim.steps}: " + "; ".join(bits)
        keys = new_keys

    completed = [o for t in sim.threads for o in t.done]
    bad_ops = [o for o in completed if not _op_consistent(o)]
    shared = sum(counts[k] for k in KINDS[:4])
    rep.check("every shared-state step passed", failure is None, failure)
    rep.check("every shared-state step is exactly one action", shared == len(trace), shared)
    rep.check("operation results agree with the key-set history", not bad_ops,
              [{k: o[k] for k in ("op", "key", "result", "start", "end")} for o in bad_ops[:5]] or None)
    expected = sum(len(s) for s in scripts) if scripts is not None else threads * ops
    rep.check("all operations completed", failure is not None or len(completed) == expected, len(completed))
    succ = Counter((o["op"], o["result"]) for o in completed)
    rep.check("successful inserts and deletes match Insert and Mark actions",
              succ[("insert", True)] == counts["Insert"] and succ[("delete", True)] == counts["Mark"],
              dict(counts))
    rep.data.update(seed=seed, threads=threads, ops=ops, keys=key_range, steps=sim.steps,
                    actions={k: counts[k] for k in KINDS}, operations=len(completed),
                    final_keys=sorted(main_keys(sim.heap)), history=history)
    if failure is not None:
        rep.data["schedule"] = sim.picked
    return trace, rep.stop()
