"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FlowError(Exception):
    """Base class for all errors raised by flowframe."""


class InputError(FlowError, ValueError):
    """Malformed input: wrong domain, unknown node, bad file contents."""


class CapabilityError(FlowError):
    """An operation needs a property the flow domain (or edge family) lacks."""


class ResourceLimit(FlowError):
    """A bounded search exceeded its configured budget."""


class ModelError(FlowError):
    """An executable model (PIP, Harris) reached an illegal state."""


class ScenarioError(ModelError):
    """A model operation was invoked with its precondition violated."""


class NoInflow(FlowError):
    """A candidate flow admits no inflow; ``node`` is the first witness."""

    def __init__(self, node, detail: str = ""):
        self.node = node
        msg = f"no inflow at node {node!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NoSolution(FlowError):
    """The flow equation has no solution for the given graph and inflow."""


class NotConverged(FlowError):
    """Fixpoint iteration hit its bound without stabilising."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"no fixpoint after {iterations} iterations")


class MultipleSolutions(FlowError):
    """More than one flow satisfies the flow equation (within the search bound)."""

    def __init__(self, solutions):
        self.solutions = list(solutions)
        super().__init__(f"{len(self.solutions)} solutions found")


class ReplacementError(FlowError):
    """A side condition of region replacement does not hold."""


class InterfaceMismatch(ReplacementError):
    """The new region's interface differs from the old one."""


class NotContextualExtension(ReplacementError):
    """The new region's interface does not contextually extend the old one."""


class FreshNodeReceivesFlow(ReplacementError):
    """The context sends flow to a node the new region allocates."""


class NotSubflowPreserving(ReplacementError):
    """The new region changes routed flow between some source and sink."""


class NotEffectivelyAcyclic(ReplacementError):
    """One of the parts taking part in the replacement is not effectively acyclic."""


class CompositionUndefined(ReplacementError):
    """The new region does not compose with the context."""
