import pytest

from flowframe.domain import BUILTIN, PATH_COUNT
from flowframe.laws import MonoidOps, check_monoid_laws, check_separation_algebra_laws, congruence_suite


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_monoids(name):
    rep = check_monoid_laws(BUILTIN[name], seed=3, cases=300)
    assert rep.ok, rep.failures


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_separation_algebra_small(name):
    rep = check_separation_algebra_laws(BUILTIN[name], seed=5, cases=200)
    assert rep.ok, rep.failures
    assert rep.data["fully_defined"] > 0


@pytest.mark.parametrize("name", ["path_count", "product", "inverse_reach"])
def test_congruence_small(name):
    rep = congruence_suite(BUILTIN[name], seed=2, cases=80, max_nodes=6)
    assert rep.ok, rep.failures


def test_law_checker_catches_a_broken_monoid():
    # max is commutative and associative but not cancellative
    ops = MonoidOps(0, max, lambda a, b: a if a >= b else None, lambda rng: rng.randint(0, 3))
    rep = check_monoid_laws(ops, seed=0, cases=200)
    assert not rep.ok
    assert {e.name for e in rep.failures} >= {"cancellativity"}


def test_reports_are_deterministic():
    a = check_separation_algebra_laws(PATH_COUNT, seed=9, cases=50).to_dict()
    b = check_separation_algebra_laws(PATH_COUNT, seed=9, cases=50).to_dict()
    assert a == b
