import random

import pytest
from hypothesis import given, settings, strategies as st

from flowframe.domain import (
    HARRIS,
    IDENTITY,
    INVERSE_REACH,
    PATH_COUNT,
    PIP,
    SHORTEST_PATH,
    ZERO,
    AddMinWith,
    PathFilter,
    ScaleVec,
)
from flowframe.errors import CapabilityError, InputError, MultipleSolutions, NoInflow, NoSolution, NotConverged
from flowframe.figures import fig4a, fig4b
from flowframe.generators import random_flow_graph, random_graph, random_inflow
from flowframe.graph import (
    FlowGraph,
    Graph,
    check_flow_eqn,
    compose_flow_graphs,
    compute_outflow,
    infer_inflow,
    kleene_iterations,
    restrict,
    singleton,
    solve_flow,
    solve_flow_graph,
    validate_flow_graph,
)
from flowframe.multiset import INF, Multiset
from flowframe.oracle import ValueBound, enumerate_flows, path_sum_flow


def chain(k=3, fns=None):
    nodes = [f"c{i}" for i in range(k)]
    fns = fns or [IDENTITY] * (k - 1)
    return Graph(PATH_COUNT, nodes, {(a, b): e for a, b, e in zip(nodes, nodes[1:], fns)})


def test_zero_edges_are_dropped():
    g = Graph(PATH_COUNT, ["a", "b"], {("a", "b"): ZERO})
    assert g.edges == {} and g.edge("a", "b") is ZERO


def test_graph_rejects_edges_from_outside():
    with pytest.raises(InputError):
        Graph(PATH_COUNT, ["a"], {("z", "a"): IDENTITY})


def test_graph_rejects_foreign_edge_functions():
    with pytest.raises(InputError):
        Graph(PIP, ["a", "b"], {("a", "b"): ScaleVec((2,))})


def test_chain_flow_and_equation():
    g = chain(3, [ScaleVec((2,)), ScaleVec((3,))])
    flow = solve_flow(g, {"c0": 1})
    assert flow == {"c0": 1, "c1": 2, "c2": 6}
    assert check_flow_eqn(g, {"c0": 1}, flow).holds
    bad = check_flow_eqn(g, {"c0": 1}, {**flow, "c2": 5})
    assert not bad.holds and set(bad.residuals) == {"c2"}


def test_inflow_is_inferred_uniquely():
    g = chain(3)
    assert infer_inflow(g, {"c0": 2, "c1": 3, "c2": 3}) == {"c0": 2, "c1": 1, "c2": 0}


def test_no_inflow_names_first_failing_node():
    g = chain(3)
    with pytest.raises(NoInflow) as exc:
        validate_flow_graph(g, {"c0": 2, "c1": 1, "c2": 5})
    assert exc.value.node == "c1"


def test_inflow_and_flow_must_stay_inside():
    with pytest.raises(InputError):
        solve_flow(chain(2), {"zz": 1})


def test_perturbed_inflows_are_rejected():
    rng = random.Random(8)
    for _ in range(50):
        h = random_flow_graph(HARRIS, rng, max_nodes=5, min_nodes=1)
        n = rng.choice(sorted(h.nodes))
        bumped = {**h.inflow, n: HARRIS.add(h.inflow[n], (1, 0))}
        assert check_flow_eqn(h.graph, h.inflow, h.flow).holds
        assert not check_flow_eqn(h.graph, bumped, h.flow).holds
        assert infer_inflow(h.graph, h.flow) == dict(h.inflow)


def test_kleene_results_satisfy_the_equation():
    rng = random.Random(12)
    for d in (PATH_COUNT, HARRIS, PIP, SHORTEST_PATH, INVERSE_REACH):
        for _ in range(20):
            g = random_graph(d, rng, rng.randint(1, 5), acyclic=rng.random() < 0.5)
            inflow = random_inflow(d, rng, g.nodes)
            try:
                flow = solve_flow(g, inflow, "kleene", max_iters=40)
            except NotConverged:
                continue
            assert check_flow_eqn(g, inflow, flow).holds


def test_outflow_is_sparse():
    g = Graph(PATH_COUNT, ["a"], {("a", "x"): IDENTITY, ("a", "y"): ScaleVec((2,))})
    h = validate_flow_graph(g, {"a": 3})
    assert compute_outflow(h) == {"x": 3, "y": 6}
    assert compute_outflow(validate_flow_graph(g, {"a": 0})) == {}


def test_strategies_agree_on_a_dag():
    rng = random.Random(4)
    for _ in range(30):
        g = random_graph(PATH_COUNT, rng, 5)
        inflow = random_inflow(PATH_COUNT, rng, g.nodes)
        flows = [solve_flow(g, inflow, s) for s in ("topo", "capacity", "kleene")]
        cap = max(path_sum_flow(g, inflow).values(), default=0)
        flows.append(solve_flow(g, inflow, "oracle", bound=ValueBound(max_nat=cap)))
        assert all(f == flows[0] for f in flows)


def test_topo_refuses_cycles():
    g, inflow = fig4b()
    with pytest.raises(CapabilityError):
        solve_flow(g, inflow, "topo")


def test_no_solution_for_self_feeding_cycle():
    g, inflow = fig4a()
    for s in ("auto", "capacity"):
        with pytest.raises(NoSolution):
            solve_flow(g, inflow, s)
    with pytest.raises(NotConverged):
        solve_flow(g, inflow, "kleene", max_iters=20)
    assert enumerate_flows(g, inflow, ValueBound(max_nat=3)) == []


def test_closed_cycle_has_many_solutions():
    g, inflow = fig4b()
    with pytest.raises(MultipleSolutions) as exc:
        solve_flow(g, inflow, "oracle", bound=ValueBound(max_nat=2))
    assert len(exc.value.solutions) == 3
    # the sum-of-paths solution is the least one
    assert solve_flow(g, inflow, "capacity") == {"b1": 1, "b2": 0, "b3": 0}


def test_kleene_reports_iteration_count():
    flow, it = kleene_iterations(chain(4), {"c0": 1})
    assert flow == {f"c{i}": 1 for i in range(4)} and it == 4


def test_inverse_reach_cycle_converges():
    g = Graph(INVERSE_REACH, ["a", "b"], {("a", "b"): PathFilter("a"), ("b", "a"): PathFilter("b")})
    inflow = {"a": Multiset([frozenset()]), "b": Multiset()}
    flow = solve_flow(g, inflow)
    # the walk a -> b -> a is cut by the filter on b's edge after one lap
    assert flow["b"] == Multiset([frozenset({"a"})])
    assert flow["a"] == Multiset([frozenset(), frozenset({"a", "b"})])
    assert flow == path_sum_flow(g, inflow)


def test_shortest_path_solution():
    g = Graph(SHORTEST_PATH, ["s", "t"], {("s", "t"): AddMinWith(4)})
    flow = solve_flow(g, {"s": Multiset([0, 2]), "t": Multiset([INF])})
    assert flow["t"] == Multiset([INF, 4])


def test_compose_and_restrict_round_trip():
    rng = random.Random(11)
    for _ in range(40):
        h = random_flow_graph(PATH_COUNT, rng, max_nodes=6, min_nodes=2)
        nodes = sorted(h.nodes)
        a = frozenset(nodes[: len(nodes) // 2])
        h1, h2 = restrict(h, a), restrict(h, h.nodes - a)
        assert compose_flow_graphs(h1, h2) == h


def test_compose_undefined_on_overlap_and_bad_flows():
    h = solve_flow_graph(chain(2), {"c0": 1})
    assert compose_flow_graphs(h, h) is None
    g = Graph(PATH_COUNT, ["p"], {("p", "q"): IDENTITY})
    lonely = validate_flow_graph(Graph(PATH_COUNT, ["q"]), {"q": 0})
    assert compose_flow_graphs(validate_flow_graph(g, {"p": 2}), lonely) is None


def test_restrict_rejects_foreign_nodes():
    h = solve_flow_graph(chain(2), {"c0": 1})
    with pytest.raises(InputError):
        restrict(h, {"nope"})
    assert singleton(h, "c1").inflow == {"c1": 1}


def test_flow_graph_equality_ignores_construction_path():
    g = chain(2)
    assert solve_flow_graph(g, {"c0": 1}) == validate_flow_graph(g, {"c0": 1, "c1": 1})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([PATH_COUNT, HARRIS, PIP, SHORTEST_PATH, INVERSE_REACH]))
def test_solved_flows_match_walk_sums(seed, d):
    rng = random.Random(seed)
    g = random_graph(d, rng, rng.randint(0, 6))
    inflow = random_inflow(d, rng, g.nodes)
    if d.kind in ("pip", "shortest_path"):
        # edge functions there are not endomorphisms; check the equation instead
        assert check_flow_eqn(g, inflow, solve_flow(g, inflow)).holds
    else:
        assert solve_flow(g, inflow) == path_sum_flow(g, inflow)


def test_flow_graph_fields_are_read_only():
    h = solve_flow_graph(chain(2), {"c0": 1})
    with pytest.raises(TypeError):
        h.flow["c0"] = 3
    assert isinstance(h, FlowGraph)
