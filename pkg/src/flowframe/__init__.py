"""Flow graphs over flow domains, their interfaces, and invariant-checked models."""

from .domain import (
    BUILTIN,
    HARRIS,
    IDENTITY,
    INVERSE_REACH,
    PATH_COUNT,
    PIP,
    SHORTEST_PATH,
    ZERO,
    AddMinWith,
    FlowDomain,
    Identity,
    MaxWith,
    PathFilter,
    ScaleVec,
    Zero,
    make_product_domain,
)
from .errors import (
    CapabilityError,
    FlowError,
    InputError,
    ModelError,
    MultipleSolutions,
    NoInflow,
    NoSolution,
    NotConverged,
    ReplacementError,
    ResourceLimit,
)
from .extension import (
    capacity,
    check_effectively_acyclic,
    contextual_extension,
    footprint,
    replace,
    subflow_preserving,
)
from .graph import (
    FlowGraph,
    Graph,
    check_flow_eqn,
    compose_flow_graphs,
    infer_inflow,
    restrict,
    solve_flow,
    solve_flow_graph,
    validate_flow_graph,
)
from .interface import FlowInterface, interface_compose, interface_equal, interface_of
from .multiset import Multiset

__version__ = "0.1.0"
