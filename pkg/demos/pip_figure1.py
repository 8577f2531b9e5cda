"""Priority inheritance on the eleven-node example.

Run: python3 demos/pip_figure1.py
"""

from flowframe.extension import footprint
from flowframe.interface import interface_of
from flowframe.pip import acquire, figure1_state, pip_check, pip_flow_graph, remove_edge


def show(s, title):
    print(title)
    for n in sorted(s.nodes):
        v = s[n]
        print(f"  {n:3} next={str(v.next):5} def={v.def_prio} prios={sorted(v.prios.elements())} curr={v.curr_prio}")


s = figure1_state()
show(s, "initial state")
h = pip_flow_graph(s)
print(pip_check(s).summary())
print("global interface:", interface_of(h))

# p1 (priority 3) now waits for r1, which p2 holds
s2 = acquire(s, "p1", "r1")
show(s2, "\nafter acquire(p1, r1)")
print(pip_check(s2, interface_of(h)).summary())
print("footprint:", sorted(footprint(h, pip_flow_graph(s2))))

# dropping p2's wait edge also changes what r2 passes on to p3
s3 = remove_edge(s, "p2")
print("\nfootprint of removing p2 -> r2:", sorted(footprint(h, pip_flow_graph(s3))))
print("p3 prios before/after:", sorted(s["p3"].prios.elements()), sorted(s3["p3"].prios.elements()))
