"""Regenerate the JSON inputs under demos/data used by the CLI walkthrough."""

from pathlib import Path

from flowframe import harris, pip
from flowframe.domain import IDENTITY, PATH_COUNT
from flowframe.figures import FIG4C_REGION, fig4a, fig4b, fig4c_left, fig4c_right
from flowframe.graph import Graph, restrict
from flowframe.interface import FlowInterface
from flowframe.serialize import dumps, encode_graph, encode_interface

OUT = Path(__file__).parent / "data"


def write(name, obj):
    (OUT / name).write_text(dumps(obj) + "\n")
    print("wrote", OUT / name)


def flow_file(h):
    return encode_graph(h.graph, h.inflow, h.flow)


def main():
    OUT.mkdir(exist_ok=True)
    chain = Graph(PATH_COUNT, ["a", "b", "c"], {("a", "b"): IDENTITY, ("b", "c"): IDENTITY})
    write("chain.json", encode_graph(chain, {"a": 1}))

    s = pip.figure1_state()
    write("fig1_state.json", pip.encode_state(s))
    write("fig1_scenario.json", pip.FIGURE1_SCENARIO)
    write("fig1_pip.json", flow_file(pip.pip_flow_graph(s)))
    after = pip.acquire(s, "p1", "r1")
    write("fig1_after_acquire.json", flow_file(pip.pip_flow_graph(after)))

    for name, (g, inflow) in (("fig4a.json", fig4a()), ("fig4b.json", fig4b())):
        write(name, encode_graph(g, inflow))
    left, right = fig4c_left(), fig4c_right()
    write("fig4c_left.json", flow_file(left))
    write("fig4c_right.json", flow_file(right))
    write("fig4c_region_right.json", flow_file(restrict(right, FIG4C_REGION)))

    write("harris_fig3.json", flow_file(harris.harris_flow_graph(harris.figure3_heap())))

    i1 = FlowInterface(PATH_COUNT, ["x"], {"x": 1}, {"y": 1})
    i2 = FlowInterface(PATH_COUNT, ["y"], {"y": 1}, {"z": 1})
    write("iface_x.json", encode_interface(i1))
    write("iface_y.json", encode_interface(i2))
    write("iface_y_conflict.json", encode_interface(FlowInterface(PATH_COUNT, ["y"], {"y": 0}, {})))


if __name__ == "__main__":
    main()
