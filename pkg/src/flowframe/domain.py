"""Flow values, edge functions and the built-in flow domains.

A flow domain bundles a commutative cancellative monoid of flow values with
a family of edge functions. Values are plain Python data:

* ``path_count``    -> ``int``
* ``product``       -> ``tuple`` of ints (components of ScaleVec-capable factors)
* ``pip``           -> :class:`Multiset` of ints
* ``shortest_path`` -> :class:`Multiset` of ints and ``INF``
* ``inverse_reach`` -> :class:`Multiset` of ``frozenset`` of node ids

Edge functions are small immutable descriptors evaluated by
:meth:`FlowDomain.apply`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import CapabilityError, InputError, ResourceLimit
from .multiset import EMPTY, INF, Multiset

# -- edge functions -------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    def __repr__(self) -> str:
        return "Zero"


@dataclass(frozen=True)
class Identity:
    def __repr__(self) -> str:
        return "Identity"


@dataclass(frozen=True)
class ScaleVec:
    """Componentwise multiplication by a vector of naturals."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs or any(not _is_nat(c) for c in coeffs):
            raise InputError(f"ScaleVec needs a non-empty tuple of naturals, got {self.coeffs!r}")
        object.__setattr__(self, "coeffs", coeffs)

    def __repr__(self) -> str:
        return f"ScaleVec{self.coeffs}"


@dataclass(frozen=True)
class MaxWith:
    """``M -> {max(M ∪ {p})}`` (priority propagation)."""

    p: int

    def __post_init__(self):
        if not _is_nat(self.p):
            raise InputError(f"MaxWith needs a natural, got {self.p!r}")


@dataclass(frozen=True)
class AddMinWith:
    """``S -> {n + min(S)}`` over costs; ``INF`` saturates."""

    n: Union[int, float]

    def __post_init__(self):
        if not _is_cost(self.n):
            raise InputError(f"AddMinWith needs a cost, got {self.n!r}")


@dataclass(frozen=True)
class PathFilter:
    """Inverse-reachability edge: adjoin ``nodes`` to every set disjoint from them.

    A single-node filter is the edge function of that source node;
    compositions of filters over disjoint node sets stay in the family.
    """

    nodes: frozenset

    def __post_init__(self):
        nodes = self.nodes
        if isinstance(nodes, str):
            nodes = frozenset([nodes])
        nodes = frozenset(nodes)
        if not nodes:
            raise InputError("PathFilter needs at least one node")
        object.__setattr__(self, "nodes", nodes)

    def __repr__(self) -> str:
        return f"PathFilter({','.join(sorted(self.nodes))})"


ZERO = Zero()
IDENTITY = Identity()
EdgeFunction = Union[Zero, Identity, ScaleVec, MaxWith, AddMinWith, PathFilter]


def _is_nat(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 0


def _is_cost(x) -> bool:
    return _is_nat(x) or x == INF


# -- domains --------------------------------------------------------------

KINDS = ("path_count", "pip", "shortest_path", "inverse_reach", "product")


@dataclass(frozen=True)
class FlowDomain:
    """Descriptor of a built-in flow domain.

    ``arity`` is the number of natural components for ScaleVec-capable
    domains (1 for ``path_count``); ``factors`` records the components of a
    product.
    """

    kind: str
    arity: int = 1
    factors: tuple = field(default=(), compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown flow domain kind {self.kind!r}")

    # capability flags
    @property
    def scalevec(self) -> bool:
        """Edge family is the ScaleVec closure (closed under compose and add)."""
        return self.kind in ("path_count", "product")

    @property
    def endomorphic(self) -> bool:
        return self.kind in ("path_count", "product", "inverse_reach")

    @property
    def nilpotent_degree(self) -> int | None:
        return 2 if self.kind == "inverse_reach" else None

    @property
    def reduced(self) -> bool:
        return self.kind in ("path_count", "product")

    @property
    def downset_enumerable(self) -> bool:
        return self.kind == "path_count"

    @property
    def positive(self) -> bool:
        return True

    @property
    def name(self) -> str:
        if self.kind == "product":
            return "product(" + ", ".join(f.name for f in self.factors) + ")"
        return self.kind

    def __repr__(self) -> str:
        return f"FlowDomain({self.name})"

    # -- values -----------------------------------------------------------

    @property
    def zero(self):
        if self.kind == "path_count":
            return 0
        if self.kind == "product":
            return (0,) * self.arity
        return EMPTY

    def is_value(self, v) -> bool:
        k = self.kind
        if k == "path_count":
            return _is_nat(v)
        if k == "product":
            return isinstance(v, tuple) and len(v) == self.arity and all(map(_is_nat, v))
        if not isinstance(v, Multiset):
            return False
        if k == "pip":
            return all(_is_nat(x) for x in v.distinct())
        if k == "shortest_path":
            return all(_is_cost(x) for x in v.distinct())
        return all(isinstance(x, frozenset) and all(isinstance(y, str) for y in x) for x in v.distinct())

    def check_value(self, v):
        if not self.is_value(v):
            raise InputError(f"{v!r} is not a value of {self.name}")
        return v

    def add(self, a, b):
        """Monoid sum ``a + b``."""
        self.check_value(a)
        self.check_value(b)
        return self._add(a, b)

    def _add(self, a, b):
        if self.kind == "path_count":
            return a + b
        if self.kind == "product":
            return tuple(x + y for x, y in zip(a, b))
        return a + b

    def sum(self, values: Iterable):
        total = self.zero
        for v in values:
            total = self._add(total, v)
        return total

    def subtract(self, a, b):
        """The unique ``c`` with ``b + c == a``, or None when no such ``c`` exists."""
        self.check_value(a)
        self.check_value(b)
        return self._subtract(a, b)

    def _subtract(self, a, b):
        if self.kind == "path_count":
            return a - b if a >= b else None
        if self.kind == "product":
            if any(x < y for x, y in zip(a, b)):
                return None
            return tuple(x - y for x, y in zip(a, b))
        return a.difference(b)

    def leq(self, a, b) -> bool:
        return self._subtract(b, a) is not None

    def is_zero(self, v) -> bool:
        return v == self.zero

    def downset(self, m, limit: int = 4096) -> list:
        """All values ``x`` with ``x <= m``; raises ResourceLimit past ``limit``."""
        self.check_value(m)
        if self.kind == "path_count":
            size = m + 1
        elif self.kind == "product":
            size = math.prod(c + 1 for c in m)
        else:
            size = math.prod(c + 1 for _, c in m.items())
        if size > limit:
            raise ResourceLimit(f"downset of {m!r} has {size} elements (limit {limit})")
        if self.kind == "path_count":
            return list(range(m + 1))
        if self.kind == "product":
            return [tuple(t) for t in itertools.product(*(range(c + 1) for c in m))]
        keys = [k for k, _ in m.items()]
        ranges = [range(c + 1) for _, c in m.items()]
        return [Multiset(dict(zip(keys, cs))) for cs in itertools.product(*ranges)]

    # -- edge functions ---------------------------------------------------

    def normalize(self, e: EdgeFunction) -> EdgeFunction:
        """Check ``e`` belongs to this domain's family and return its canonical form."""
        if isinstance(e, (Zero, Identity)):
            return e
        if isinstance(e, ScaleVec):
            if not self.scalevec:
                raise InputError(f"{e!r} is not an edge function of {self.name}")
            if len(e.coeffs) != self.arity:
                raise InputError(f"{e!r} has arity {len(e.coeffs)}, domain needs {self.arity}")
            if all(c == 0 for c in e.coeffs):
                return ZERO
            if all(c == 1 for c in e.coeffs):
                return IDENTITY
            return e
        expected = {MaxWith: "pip", AddMinWith: "shortest_path", PathFilter: "inverse_reach"}
        if expected.get(type(e)) != self.kind:
            raise InputError(f"{e!r} is not an edge function of {self.name}")
        return e

    def _coeffs(self, e) -> tuple:
        if isinstance(e, Zero):
            return (0,) * self.arity
        if isinstance(e, Identity):
            return (1,) * self.arity
        return e.coeffs

    def apply(self, e: EdgeFunction, m):
        """Evaluate ``m ▷ e``."""
        self.check_value(m)
        e = self.normalize(e)
        return self._apply(e, m)

    def _apply(self, e, m):
        if isinstance(e, Zero):
            return self.zero
        if isinstance(e, Identity):
            return m
        if isinstance(e, ScaleVec):
            if self.kind == "path_count":
                return m * e.coeffs[0]
            return tuple(x * c for x, c in zip(m, e.coeffs))
        if isinstance(e, MaxWith):
            top = m.max()
            return Multiset([e.p if top is None else max(top, e.p)])
        if isinstance(e, AddMinWith):
            if not m:
                raise InputError("AddMinWith applied to the empty multiset")
            return Multiset([e.n + m.min()])
        # PathFilter
        out = {}
        for s, c in m.items():
            if not (s & e.nodes):
                out[s | e.nodes] = c
        return Multiset(out)

    def is_zero_fn(self, e) -> bool:
        return isinstance(self.normalize(e), Zero)

    def compose(self, e1: EdgeFunction, e2: EdgeFunction) -> EdgeFunction:
        """Symbolic ``e1 ∘ e2``: apply ``e2`` first, then ``e1``."""
        e1, e2 = self.normalize(e1), self.normalize(e2)
        if isinstance(e1, Zero):
            return ZERO
        if isinstance(e1, Identity):
            return e2
        if isinstance(e2, Identity):
            return e1
        if isinstance(e2, Zero):
            if self.endomorphic:
                return ZERO
            raise CapabilityError(f"{e1!r} ∘ Zero is not representable (non-endomorphic)")
        if isinstance(e1, ScaleVec) and isinstance(e2, ScaleVec):
            return self.normalize(ScaleVec(tuple(a * b for a, b in zip(e1.coeffs, e2.coeffs))))
        if isinstance(e1, PathFilter) and isinstance(e2, PathFilter):
            if e1.nodes & e2.nodes:
                return ZERO
            return PathFilter(e1.nodes | e2.nodes)
        raise CapabilityError(f"composition of {e1!r} and {e2!r} is not closed in {self.name}")

    def edge_add(self, e1: EdgeFunction, e2: EdgeFunction) -> EdgeFunction:
        """Symbolic pointwise sum ``m -> e1(m) + e2(m)``."""
        e1, e2 = self.normalize(e1), self.normalize(e2)
        if isinstance(e1, Zero) and self.endomorphic:
            return e2
        if isinstance(e2, Zero) and self.endomorphic:
            return e1
        if self.scalevec:
            a, b = self._coeffs(e1), self._coeffs(e2)
            return self.normalize(ScaleVec(tuple(x + y for x, y in zip(a, b))))
        raise CapabilityError(f"sum of {e1!r} and {e2!r} is not closed in {self.name}")

    def pair_edge(self, e1: EdgeFunction, e2: EdgeFunction) -> EdgeFunction:
        """Edge function of a product domain built from one edge per factor."""
        if self.kind != "product":
            raise CapabilityError(f"{self.name} is not a product domain")
        d1, d2 = self.factors
        c = d1._coeffs(d1.normalize(e1)) + d2._coeffs(d2.normalize(e2))
        return self.normalize(ScaleVec(c))


PATH_COUNT = FlowDomain("path_count")
PIP = FlowDomain("pip")
SHORTEST_PATH = FlowDomain("shortest_path")
INVERSE_REACH = FlowDomain("inverse_reach")


def make_product_domain(d1: FlowDomain, d2: FlowDomain) -> FlowDomain:
    """Product of two ScaleVec-capable domains (values are concatenated tuples)."""
    for d in (d1, d2):
        if not d.scalevec:
            raise CapabilityError(f"product needs ScaleVec edge families; {d.name} has none")
    return FlowDomain("product", arity=d1.arity + d2.arity, factors=(d1, d2))


HARRIS = make_product_domain(PATH_COUNT, PATH_COUNT)
#: the two non-trivial Harris edge functions
NEXT_ONLY = ScaleVec((1, 0))
FNEXT_ONLY = ScaleVec((0, 1))

BUILTIN = {
    "path_count": PATH_COUNT,
    "pip": PIP,
    "shortest_path": SHORTEST_PATH,
    "inverse_reach": INVERSE_REACH,
    "product": HARRIS,
}
