"""Run the algebraic law suites over every built-in domain.

Run: python3 demos/laws_tour.py
"""

from flowframe.domain import BUILTIN
from flowframe.laws import check_monoid_laws, check_separation_algebra_laws, congruence_suite

for name in sorted(BUILTIN):
    d = BUILTIN[name]
    for rep in (check_monoid_laws(d, cases=500), check_separation_algebra_laws(d, cases=500),
                congruence_suite(d, cases=200)):
        print(f"{rep.summary():70} {rep.timing:.2f}s")
