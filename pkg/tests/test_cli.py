import json

import pytest

from flowframe import harris, pip
from flowframe.cli import main
from flowframe.domain import IDENTITY, PATH_COUNT
from flowframe.figures import FIG4C_REGION, fig4a, fig4b, fig4c_left, fig4c_right
from flowframe.graph import Graph, restrict
from flowframe.interface import FlowInterface
from flowframe.serialize import dumps, encode_graph, encode_interface


def _flow_file(h):
    return encode_graph(h.graph, h.inflow, h.flow)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    s = pip.figure1_state()
    content = {
        "chain": encode_graph(Graph(PATH_COUNT, ["a", "b", "c"], {("a", "b"): IDENTITY, ("b", "c"): IDENTITY}),
                              {"a": 1}),
        "fig4a": encode_graph(*fig4a()),
        "fig4b": encode_graph(*fig4b()),
        "left": _flow_file(fig4c_left()),
        "right": _flow_file(fig4c_right()),
        "region": _flow_file(restrict(fig4c_right(), FIG4C_REGION)),
        "fig1": _flow_file(pip.pip_flow_graph(s)),
        "fig1_after": _flow_file(pip.pip_flow_graph(pip.acquire(s, "p1", "r1"))),
        "fig1_state": pip.encode_state(s),
        "scenario": pip.FIGURE1_SCENARIO,
        "fig3": _flow_file(harris.harris_flow_graph(harris.figure3_heap())),
        "ix": encode_interface(FlowInterface(PATH_COUNT, ["x"], {"x": 1}, {"y": 1})),
        "iy": encode_interface(FlowInterface(PATH_COUNT, ["y"], {"y": 1}, {"z": 1})),
        "iy_bad": encode_interface(FlowInterface(PATH_COUNT, ["y"], {"y": 0}, {})),
    }
    paths = {}
    for k, v in content.items():
        p = d / f"{k}.json"
        p.write_text(dumps(v))
        paths[k] = str(p)
    p = d / "broken.json"
    p.write_text("{ not json")
    paths["broken"] = str(p)
    return paths


def run(capsys, *argv):
    code = main([argv[0], "--format", "json", *argv[1:]])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_solve_chain(files, capsys):
    code, out = run(capsys, "solve", files["chain"])
    assert code == 0 and out["flow"] == {"a": 1, "b": 1, "c": 1}


def test_solve_no_solution(files, capsys):
    code, out = run(capsys, "solve", files["fig4a"])
    assert code == 2 and out["status"] == "no_solution"


def test_solve_oracle_multiple(files, capsys):
    code, out = run(capsys, "solve", files["fig4b"], "--strategy", "oracle", "--bound", "3")
    assert code == 2 and out["status"] == "multiple_solutions" and out["count"] == 4


def test_solve_not_converged(files, capsys):
    code, out = run(capsys, "solve", files["fig4a"], "--strategy", "kleene", "--max-iters", "10")
    assert code == 2 and out["status"] == "not_converged"


def test_solve_oracle_cap(files, capsys):
    code, out = run(capsys, "solve", files["chain"], "--strategy", "oracle", "--oracle-cap", "3")
    assert code == 4 and out["status"] == "resource_limit"


def test_topo_on_cycle_is_bad_input(files, capsys):
    code, _ = run(capsys, "solve", files["fig4b"], "--strategy", "topo")
    assert code == 3


def test_check_and_interface(files, capsys):
    code, out = run(capsys, "check", files["fig1"])
    assert code == 0
    code, out = run(capsys, "interface", files["region"])
    i = out["interface"]
    assert code == 0 and i["in"] == {"n3": 1, "n4": 1} and i["out"] == {"n2": 1, "n5": 1}


def test_check_needs_a_flow(files, capsys):
    code, _ = run(capsys, "check", files["chain"])
    assert code == 3


def test_interface_composition(files, capsys):
    code, out = run(capsys, "iface-compose", files["ix"], files["iy"])
    assert code == 0
    code, out = run(capsys, "iface-compose", files["ix"], files["iy_bad"])
    assert code == 2


def test_graph_composition_overlap(files, capsys):
    code, _ = run(capsys, "compose", files["left"], files["right"])
    assert code == 2


def test_extend(files, capsys):
    base = ["extend", "--base", files["left"], "--new", files["region"], "--region", "n3,n4"]
    code, _ = run(capsys, *base, "--mode", "contextual")
    assert code == 0
    code, out = run(capsys, *base, "--mode", "subflow")
    assert code == 1 and "NotSubflowPreserving" in json.dumps(out)


def test_ea(files, capsys):
    code, _ = run(capsys, "ea", files["fig3"], "--brute-max-len", "22")
    assert code == 0
    code, _ = run(capsys, "ea", files["right"])
    assert code == 1


def test_footprint(files, capsys):
    code, out = run(capsys, "footprint", files["fig1"], files["fig1_after"])
    assert code == 0 and out["footprint"] == ["p1", "p2", "p3", "r1", "r2", "r3"]
    code, _ = run(capsys, "footprint", files["fig1"], files["chain"])
    assert code == 2


def test_laws(capsys):
    code, out = run(capsys, "laws", "--domain", "pip", "--suite", "separation", "--cases", "50")
    assert code == 0 and out["status"] == "pass"


def test_pip_figure1(files, capsys):
    code, out = run(capsys, "pip", "--scenario", "figure1")
    assert code == 0
    assert all(out["data"]["final_curr_prio"][n] == 3 for n in ("p1", "p2", "p3", "r1", "r2", "r3"))
    code, _ = run(capsys, "pip", "--scenario", files["scenario"], "--state", files["fig1_state"])
    assert code == 0


def test_pip_random_with_trace(tmp_path, capsys):
    t = tmp_path / "trace.json"
    code, _ = run(capsys, "pip", "--seed", "2", "--steps", "40", "--trace", str(t))
    assert code == 0 and len(json.loads(t.read_text())) == 40


def test_harris(capsys):
    code, out = run(capsys, "harris", "--seed", "3", "--threads", "2", "--ops", "30")
    assert code == 0
    code, out = run(capsys, "harris", "--start", "figure3", "--check-only")
    assert code == 0 and out["status"] == "pass"


def test_bad_inputs(files, capsys):
    assert run(capsys, "solve", "/nonexistent.json")[0] == 3
    assert run(capsys, "solve", files["broken"])[0] == 3
    assert run(capsys, "interface", files["ix"])[0] == 3


def test_json_output_is_deterministic(files, capsys):
    for argv in (["harris", "--seed", "4", "--threads", "2", "--ops", "20"],
                 ["laws", "--domain", "product", "--cases", "40"],
                 ["solve", files["fig4b"], "--strategy", "oracle", "--bound", "2"]):
        main([argv[0], "--format", "json", *argv[1:]])
        first = capsys.readouterr().out
        main([argv[0], "--format", "json", *argv[1:]])
        assert capsys.readouterr().out == first


def test_text_output(files, capsys):
    assert main(["ea", files["right"]]) == 1
    out = capsys.readouterr().out
    assert "[fail]" in out
