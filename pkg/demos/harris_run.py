"""Harris list: check the shared-node heap, then run a seeded interleaving.

Run: python3 demos/harris_run.py [seed]
"""

import sys
from collections import Counter

from flowframe.harris import figure3_heap, harris_check, harris_flow_graph, run_simulation

heap = figure3_heap()
h = harris_flow_graph(heap)
for n in sorted(h.nodes, key=lambda n: heap[n].key):
    v = heap[n]
    print(f"  {n:5} marked={v.marked!s:5} next={str(v.next):5} fnext={str(v.fnext):5} flow={h.flow[n]}")
print(harris_check(heap).summary())

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 7
trace, rep = run_simulation(seed=seed, threads=3, ops=200)
print(rep.summary())
print("actions:", rep.data["actions"])
print("final keys:", rep.data["final_keys"])
print("first shared steps:")
for t in trace[:8]:
    print(f"  step {t['step']:4} thread {t['thread']} {t['action']:7} {t['touched']} via {t['access']}")
print("per-thread shared steps:", dict(Counter(t["thread"] for t in trace)))
