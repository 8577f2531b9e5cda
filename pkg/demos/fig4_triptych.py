"""Three small path-counting graphs: no flow, many flows, and a swap that breaks acyclicity.

Run: python3 demos/fig4_triptych.py
"""

from flowframe.errors import NoSolution
from flowframe.extension import check_effectively_acyclic, contextual_extension, replace, subflow_violation
from flowframe.figures import FIG4C_REGION, fig4a, fig4b, fig4c_left, fig4c_right
from flowframe.graph import restrict, solve_flow
from flowframe.interface import interface_of
from flowframe.oracle import ValueBound, enumerate_flows

g, inflow = fig4a()
try:
    solve_flow(g, inflow)
except NoSolution as exc:
    print("(a) solver:", exc)
print("(a) oracle solutions up to 3:", enumerate_flows(g, inflow, ValueBound(max_nat=3)))

g, inflow = fig4b()
for sol in enumerate_flows(g, inflow, ValueBound(max_nat=3)):
    print("(b) solution:", sol)

left, right = fig4c_left(), fig4c_right()
old, new = restrict(left, FIG4C_REGION), restrict(right, FIG4C_REGION)
print("(c) region interface before:", interface_of(old))
print("(c) region interface after: ", interface_of(new))
print("(c) contextual extension:", contextual_extension(interface_of(old), interface_of(new)))
print("(c) subflow check:", subflow_violation(old, new))
swapped = replace(left, FIG4C_REGION, new, "contextual").result
ea = check_effectively_acyclic(swapped)
print("(c) swapped graph effectively acyclic:", ea.effectively_acyclic, "witness", ea.witness)
