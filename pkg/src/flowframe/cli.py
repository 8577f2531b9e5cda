"""Command-line front end.

Exit codes: 0 pass/defined, 1 a check failed, 2 undefined, no solution or
not converged, 3 bad input, 4 a resource bound was hit. Reports go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harris, laws, pip
from .domain import BUILTIN
from .errors import (
    CapabilityError,
    InputError,
    ModelError,
    MultipleSolutions,
    NoInflow,
    NoSolution,
    NotConverged,
    ReplacementError,
    ResourceLimit,
)
from .extension import check_effectively_acyclic, contextual_extension, footprint, replace, subflow_violation
from .graph import STRATEGIES, FlowGraph, compose_flow_graphs, kleene_iterations, solve_flow, validate_flow_graph
from .interface import interface_compose, interface_of
from .oracle import ValueBound, brute_cycle_check, enumerate_flows
from .report import Report
from .serialize import (
    decode_graph,
    decode_interface,
    dumps,
    encode_flow_map,
    encode_graph,
    encode_interface,
    load_json,
)

OK, FAILED, UNDEFINED, BAD_INPUT, RESOURCE = range(5)


class _Exit(Exception):
    def __init__(self, code: int, payload: dict):
        self.code, self.payload = code, payload


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        print(dumps(payload))
        return
    for key in sorted(payload):
        val = payload[key]
        if key == "entries":
            for e in val:
                extra = f"  {json.dumps(e['witness'], sort_keys=True)}" if "witness" in e else ""
                print(f"  [{e['outcome']}] {e['name']}{extra}")
            continue
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        print(f"{key}: {val}")


def _graph_file(path):
    return decode_graph(load_json(path))


def _flow_graph(path) -> FlowGraph:
    """A flow graph from a file: its ``flow`` when present, else solved from ``inflow``."""
    f = _graph_file(path)
    if f.flow is not None:
        return validate_flow_graph(f.graph, f.flow)
    flow = solve_flow(f.graph, f.inflow)
    return FlowGraph(f.graph, flow, {n: f.inflow.get(n, f.graph.domain.zero) for n in f.graph.nodes})


def _report(args, rep: Report) -> int:
    _emit(args, rep.to_dict())
    return OK if rep.ok else FAILED


# -- commands -----------------------------------------------------------------------


def cmd_solve(args) -> int:
    f = _graph_file(args.file)
    g, d = f.graph, f.graph.domain
    out = {"strategy": args.strategy}
    try:
        if args.strategy == "oracle":
            sols = enumerate_flows(g, f.inflow, ValueBound(max_nat=args.bound), state_cap=args.oracle_cap)
            if len(sols) != 1:
                raise NoSolution("no flow in bound") if not sols else MultipleSolutions(sols)
            flow = sols[0]
        elif args.strategy == "kleene":
            flow, it = kleene_iterations(g, f.inflow, args.max_iters)
            out["iterations"] = it
        else:
            flow = solve_flow(g, f.inflow, args.strategy, max_iters=args.max_iters)
    except NoSolution as exc:
        raise _Exit(UNDEFINED, {**out, "status": "no_solution", "detail": str(exc)})
    except MultipleSolutions as exc:
        raise _Exit(UNDEFINED, {**out, "status": "multiple_solutions", "count": len(exc.solutions),
                                "solutions": [encode_flow_map(d, s) for s in exc.solutions[:10]]})
    except NotConverged as exc:
        raise _Exit(UNDEFINED, {**out, "status": "not_converged", "iterations": exc.iterations})
    _emit(args, {**out, "status": "pass", "flow": encode_flow_map(d, flow)})
    return OK


def cmd_check(args) -> int:
    f = _graph_file(args.file)
    if f.flow is None:
        raise InputError("check needs a graph file with a 'flow' entry")
    d = f.graph.domain
    try:
        h = validate_flow_graph(f.graph, f.flow)
    except NoInflow as exc:
        raise _Exit(FAILED, {"status": "fail", "valid": False, "witness": exc.node, "detail": str(exc)})
    payload = {"status": "pass", "valid": True, "inflow": encode_flow_map(d, h.inflow)}
    given = {n: v for n, v in f.inflow.items() if v != d.zero}
    inferred = {n: v for n, v in h.inflow.items() if v != d.zero}
    if given and given != inferred:
        payload.update(status="fail", detail="stated inflow differs from the inferred one")
        _emit(args, payload)
        return FAILED
    _emit(args, payload)
    return OK


def cmd_interface(args) -> int:
    _emit(args, {"status": "pass", "interface": encode_interface(interface_of(_flow_graph(args.file)))})
    return OK


def cmd_compose(args) -> int:
    h1, h2 = _flow_graph(args.first), _flow_graph(args.second)
    h = compose_flow_graphs(h1, h2)
    if h is None:
        raise _Exit(UNDEFINED, {"status": "undefined", "detail": "flow graphs do not compose"})
    _emit(args, {"status": "pass", "graph": encode_graph(h.graph, h.inflow, h.flow),
                 "interface": encode_interface(interface_of(h))})
    return OK


def cmd_iface_compose(args) -> int:
    i1, i2 = decode_interface(load_json(args.first)), decode_interface(load_json(args.second))
    if i1.domain != i2.domain:
        raise InputError("interfaces over different flow domains")
    i = interface_compose(i1, i2)
    if i is None:
        raise _Exit(UNDEFINED, {"status": "undefined", "detail": "interfaces do not compose"})
    _emit(args, {"status": "pass", "interface": encode_interface(i)})
    return OK


def cmd_extend(args) -> int:
    base, new = _flow_graph(args.base), _flow_graph(args.new)
    if base.domain != new.domain:
        raise InputError("base and new graphs use different flow domains")
    rep = Report(f"extension ({args.mode})")
    if args.region:
        region = [n for n in args.region.split(",") if n]
        try:
            res = replace(base, region, new, mode=args.mode)
        except ReplacementError as exc:
            rep.check(type(exc).__name__, False, str(exc))
        else:
            for k, v in sorted(res.relations.items()):
                rep.data[k] = v
            rep.check("composite defined", True)
            rep.data["composite"] = encode_graph(res.result.graph, res.result.inflow, res.result.flow)
    else:
        i, i2 = interface_of(base), interface_of(new)
        if args.mode == "equal":
            rep.check("interface_equal", i == i2, [repr(i), repr(i2)])
        else:
            rep.check("contextual_extension", contextual_extension(i, i2), [repr(i), repr(i2)])
        if args.mode == "subflow":
            why = subflow_violation(base, new)
            rep.check("subflow_preserving", why is None, why)
            for name, h in (("base", base), ("new", new)):
                ea = check_effectively_acyclic(h)
                rep.check(f"{name} effectively acyclic", ea.effectively_acyclic,
                          None if ea.witness is None else list(ea.witness))
    return _report(args, rep.stop())


def cmd_ea(args) -> int:
    h = _flow_graph(args.file)
    ea = check_effectively_acyclic(h, args.method)
    rep = Report("effective acyclicity")
    rep.check("effectively acyclic", ea.effectively_acyclic, None if ea.witness is None else list(ea.witness))
    if args.brute_max_len is not None:
        try:
            brute = brute_cycle_check(h, args.brute_max_len)
        except ResourceLimit as exc:
            raise _Exit(RESOURCE, {"status": "resource_limit", "detail": str(exc)})
        rep.check("bounded closed-walk search agrees", brute == ea.effectively_acyclic, brute)
    return _report(args, rep.stop())


def cmd_footprint(args) -> int:
    h, h2 = _flow_graph(args.before), _flow_graph(args.after)
    if h.nodes != h2.nodes or interface_of(h) != interface_of(h2):
        raise _Exit(UNDEFINED, {"status": "undefined", "detail": "footprints need equal node sets and interfaces"})
    _emit(args, {"status": "pass", "footprint": sorted(footprint(h, h2))})
    return OK


def cmd_laws(args) -> int:
    d = BUILTIN[args.domain]
    suites = ("monoid", "separation", "congruence") if args.suite == "all" else (args.suite,)
    rep = Report(f"law suites ({d.name})")
    for s in suites:
        if s == "monoid":
            r = laws.check_monoid_laws(d, args.seed, args.cases)
        elif s == "separation":
            r = laws.check_separation_algebra_laws(d, args.seed, args.cases)
        else:
            r = laws.congruence_suite(d, args.seed, args.cases)
        rep.extend(r, f"{s}: ")
        rep.data[s] = r.data
    return _report(args, rep.stop())


def cmd_pip(args) -> int:
    state = pip.decode_state(load_json(args.state)) if args.state else None
    if args.scenario:
        if args.scenario == "figure1":
            ops, state = pip.FIGURE1_SCENARIO, state or pip.figure1_state()
        else:
            ops = pip.decode_scenario(load_json(args.scenario))
            if state is None:
                raise InputError("--scenario needs --state (or use --scenario figure1)")
        _, trace, rep = pip.run_scenario(state, ops, seed=args.seed)
    else:
        trace, rep = pip.pip_run(args.seed, args.processes, args.resources, args.steps, state)
    if args.trace:
        Path(args.trace).write_text(dumps(trace) + "\n")
    return _report(args, rep)


def cmd_harris(args) -> int:
    if args.threads < 1:
        raise InputError("--threads must be at least 1")
    heap = harris.figure3_heap() if args.start == "figure3" else None
    if args.check_only:
        rep = harris.harris_check(heap or harris.initial_heap())
        h = harris.harris_flow_graph(heap or harris.initial_heap())
        rep.data["flow"] = {n: list(v) for n, v in sorted(h.flow.items())}
        return _report(args, rep)
    trace, rep = harris.run_simulation(args.seed, args.threads, args.ops, args.keys, heap=heap)
    if args.trace:
        Path(args.trace).write_text(dumps(trace) + "\n")
    if not args.history:
        rep.data.pop("history", None)
    return _report(args, rep)


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flowframe", description="Flow graphs, flow interfaces and invariant-checked models.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("solve", cmd_solve, "solve the flow equation for a graph file")
    sp.add_argument("file")
    sp.add_argument("--strategy", choices=STRATEGIES, default="auto")
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--bound", type=int, default=4, help="largest natural tried by the oracle")
    sp.add_argument("--oracle-cap", type=int, default=1_000_000, help="search states before the oracle gives up")

    sp = add("check", cmd_check, "validate a candidate flow and print its inflow")
    sp.add_argument("file")
    sp = add("interface", cmd_interface, "print the interface of a flow graph")
    sp.add_argument("file")
    sp = add("compose", cmd_compose, "compose two flow graph files")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = add("iface-compose", cmd_iface_compose, "compose two interface files")
    sp.add_argument("first")
    sp.add_argument("second")

    sp = add("extend", cmd_extend, "check an extension or replace a region")
    sp.add_argument("--base", required=True)
    sp.add_argument("--new", required=True)
    sp.add_argument("--region", help="comma-separated nodes of --base replaced by --new")
    sp.add_argument("--mode", choices=("equal", "contextual", "subflow"), default="contextual")

    sp = add("ea", cmd_ea, "check effective acyclicity")
    sp.add_argument("file")
    sp.add_argument("--method", choices=("auto", "cycles", "components"), default="auto")
    sp.add_argument("--brute-max-len", type=int)

    sp = add("footprint", cmd_footprint, "nodes whose singleton flow graph changed")
    sp.add_argument("before")
    sp.add_argument("after")

    sp = add("laws", cmd_laws, "run the randomized law suites")
    sp.add_argument("--domain", choices=sorted(BUILTIN), default="path_count")
    sp.add_argument("--suite", choices=("all", "monoid", "separation", "congruence"), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=1000)

    sp = add("pip", cmd_pip, "run the priority inheritance model")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--processes", type=int, default=5)
    sp.add_argument("--resources", type=int, default=3)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--scenario", help="scenario file, or 'figure1'")
    sp.add_argument("--state", help="PIP state file")
    sp.add_argument("--trace", help="write the per-step trace here")

    sp = add("harris", cmd_harris, "run the Harris list simulator")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--threads", type=int, default=3)
    sp.add_argument("--ops", type=int, default=200, help="operations per thread")
    sp.add_argument("--keys", type=int, default=32)
    sp.add_argument("--start", choices=("empty", "figure3"), default="empty")
    sp.add_argument("--check-only", action="store_true", help="check the start heap without running threads")
    sp.add_argument("--history", action="store_true", help="include the key-set history in the report")
    sp.add_argument("--trace", help="write the per-step trace here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _Exit as exc:
        _emit(args, exc.payload)
        return exc.code
    except (InputError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(args, {"status": "error", "detail": str(exc)})
        return BAD_INPUT
    except ResourceLimit as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        _emit(args, {"status": "resource_limit", "detail": str(exc)})
        return RESOURCE
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        _emit(args, {"status": "fail", "detail": str(exc)})
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
