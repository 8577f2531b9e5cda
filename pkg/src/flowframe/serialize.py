"""JSON wire formats for domains, values, edge functions, graphs and interfaces."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .domain import (
    BUILTIN,
    AddMinWith,
    FlowDomain,
    Identity,
    MaxWith,
    PathFilter,
    ScaleVec,
    Zero,
    ZERO,
    IDENTITY,
    make_product_domain,
)
from .errors import InputError
from .graph import Graph
from .interface import FlowInterface
from .multiset import Multiset

# -- domains ----------------------------------------------------------------


def encode_domain(d: FlowDomain):
    if d.kind == "product":
        return {"kind": "product", "factors": [encode_domain(f) for f in d.factors]}
    return {"kind": d.kind}


def decode_domain(j) -> FlowDomain:
    if isinstance(j, str):
        j = {"kind": j}
    if not isinstance(j, dict) or "kind" not in j:
        raise InputError(f"bad domain description {j!r}")
    _only(j, {"kind", "factors"}, "domain")
    kind = j["kind"]
    if kind == "product":
        factors = j.get("factors", [{"kind": "path_count"}, {"kind": "path_count"}])
        if len(factors) != 2:
            raise InputError("a product domain needs exactly two factors")
        return make_product_domain(decode_domain(factors[0]), decode_domain(factors[1]))
    if kind not in BUILTIN:
        raise InputError(f"unknown domain kind {kind!r}")
    return BUILTIN[kind]


# -- values -----------------------------------------------------------------


def _cost_key(x) -> str:
    return "inf" if x == math.inf else str(x)


def encode_value(d: FlowDomain, v):
    d.check_value(v)
    if d.kind == "path_count":
        return v
    if d.kind == "product":
        return list(v)
    if d.kind in ("pip", "shortest_path"):
        return {_cost_key(k): c for k, c in v.items()}
    return [{"set": sorted(s), "count": c} for s, c in v.items()]


def _nat(x, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise InputError(f"{what} must be a natural number, got {x!r}")
    return x


def decode_value(d: FlowDomain, j):
    k = d.kind
    if k == "path_count":
        return _nat(j, "path count")
    if k == "product":
        if not isinstance(j, list) or len(j) != d.arity:
            raise InputError(f"expected a list of {d.arity} naturals, got {j!r}")
        return tuple(_nat(x, "vector component") for x in j)
    if k in ("pip", "shortest_path"):
        if not isinstance(j, dict):
            raise InputError(f"expected an {{elem: count}} object, got {j!r}")
        counts = {}
        for key, c in j.items():
            if key == "inf" and k == "shortest_path":
                elem = math.inf
            else:
                try:
                    elem = int(key)
                except ValueError:
                    raise InputError(f"bad multiset element {key!r}") from None
                _nat(elem, "multiset element")
            counts[elem] = _nat(c, "multiset count")
        return Multiset(counts)
    if not isinstance(j, list):
        raise InputError(f"expected a list of {{set, count}} entries, got {j!r}")
    counts = {}
    for item in j:
        if not isinstance(item, dict):
            raise InputError(f"bad node-set entry {item!r}")
        _only(item, {"set", "count"}, "node-set entry")
        s = frozenset(item.get("set", []))
        if not all(isinstance(x, str) for x in s):
            raise InputError("node-set members must be strings")
        counts[s] = counts.get(s, 0) + _nat(item.get("count", 1), "multiset count")
    return Multiset(counts)


# -- edge functions ---------------------------------------------------------


def encode_edge(e):
    if isinstance(e, Zero):
        return {"kind": "zero"}
    if isinstance(e, Identity):
        return {"kind": "identity"}
    if isinstance(e, ScaleVec):
        return {"scale": list(e.coeffs)}
    if isinstance(e, MaxWith):
        return {"max_with": e.p}
    if isinstance(e, AddMinWith):
        return {"add_min_with": "inf" if e.n == math.inf else e.n}
    if isinstance(e, PathFilter):
        ns = sorted(e.nodes)
        return {"path_filter": ns[0] if len(ns) == 1 else ns}
    raise InputError(f"cannot encode {e!r}")


def decode_edge(d: FlowDomain, j):
    if not isinstance(j, dict) or len(j) != 1:
        raise InputError(f"edge function must be a one-key object, got {j!r}")
    (key, val), = j.items()
    if key == "kind":
        if val == "zero":
            return ZERO
        if val == "identity":
            return IDENTITY
        raise InputError(f"unknown edge kind {val!r}")
    if key == "scale":
        if not isinstance(val, list):
            raise InputError("scale needs a list of coefficients")
        e = ScaleVec(tuple(_nat(c, "coefficient") for c in val))
    elif key == "max_with":
        e = MaxWith(_nat(val, "priority"))
    elif key == "add_min_with":
        e = AddMinWith(math.inf if val == "inf" else _nat(val, "cost"))
    elif key == "path_filter":
        e = PathFilter(frozenset([val] if isinstance(val, str) else val))
    else:
        raise InputError(f"unknown edge function key {key!r}")
    return d.normalize(e)


# -- graphs -----------------------------------------------------------------


def _only(j: dict, allowed: set, what: str):
    extra = set(j) - allowed
    if extra:
        raise InputError(f"unknown keys in {what}: {sorted(extra)}")


@dataclass(frozen=True)
class GraphFile:
    graph: Graph
    inflow: dict
    flow: dict | None


def decode_graph(j) -> GraphFile:
    if not isinstance(j, dict):
        raise InputError("graph file must hold a JSON object")
    _only(j, {"domain", "nodes", "inflow", "edges", "flow"}, "graph file")
    for key in ("domain", "nodes"):
        if key not in j:
            raise InputError(f"graph file lacks {key!r}")
    d = decode_domain(j["domain"])
    nodes = j["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(n, str) for n in nodes):
        raise InputError("nodes must be a list of strings")
    if len(set(nodes)) != len(nodes):
        raise InputError("duplicate node ids")
    edges = {}
    for item in j.get("edges", []):
        if not isinstance(item, dict):
            raise InputError(f"bad edge entry {item!r}")
        _only(item, {"from", "to", "fn"}, "edge")
        try:
            key = (item["from"], item["to"])
        except KeyError as exc:
            raise InputError(f"edge lacks {exc.args[0]!r}") from None
        if key in edges:
            raise InputError(f"duplicate edge {key}")
        edges[key] = decode_edge(d, item.get("fn", {"kind": "identity"}))
    g = Graph(d, nodes, edges)
    inflow = _decode_map(d, j.get("inflow", {}), "inflow")
    flow = _decode_map(d, j["flow"], "flow") if "flow" in j else None
    return GraphFile(g, inflow, flow)


def _decode_map(d: FlowDomain, j, what: str) -> dict:
    if not isinstance(j, dict):
        raise InputError(f"{what} must be an object")
    return {n: decode_value(d, v) for n, v in j.items()}


def encode_flow_map(d: FlowDomain, m) -> dict:
    return {n: encode_value(d, m[n]) for n in sorted(m)}


def encode_graph(g: Graph, inflow=None, flow=None) -> dict:
    d = g.domain
    j = {
        "domain": encode_domain(d),
        "nodes": sorted(g.nodes),
        "inflow": encode_flow_map(d, {n: v for n, v in (inflow or {}).items() if v != d.zero}),
        "edges": [{"from": a, "to": b, "fn": encode_edge(e)} for (a, b), e in sorted(g.edges.items())],
    }
    if flow is not None:
        j["flow"] = encode_flow_map(d, flow)
    return j


def encode_interface(i: FlowInterface) -> dict:
    d = i.domain
    return {
        "domain": sorted(i.nodes),
        "in": encode_flow_map(d, i.inflow),
        "out": encode_flow_map(d, i.outflow),
        "flow_domain": encode_domain(d),
    }


def decode_interface(j) -> FlowInterface:
    if not isinstance(j, dict):
        raise InputError("interface file must hold a JSON object")
    _only(j, {"domain", "in", "out", "flow_domain"}, "interface file")
    d = decode_domain(j.get("flow_domain", {"kind": "path_count"}))
    nodes = j.get("domain", [])
    if not isinstance(nodes, list) or not all(isinstance(n, str) for n in nodes):
        raise InputError("interface domain must be a list of node ids")
    return FlowInterface(d, nodes, _decode_map(d, j.get("in", {}), "in"), _decode_map(d, j.get("out", {}), "out"))


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
