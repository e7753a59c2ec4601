import pytest

from intervalc.compiler import compile_model
from intervalc.errors import SearchSpaceTooLarge
from intervalc.families import bundled, classical_model, scheduling_model
from intervalc.flat import (
    Domain,
    FlatModel,
    FlatObjective,
    FVar,
    Intension,
    NoOverlap,
    Status,
    check,
    f_cmp,
)
from intervalc.solver import SearchBudget, enumerate_all, solve


def _instance(name):
    return next(i for i in bundled() if i.name == name)


def _brute_optimum(flat):
    sols = enumerate_all(flat, cap=10**12)
    return min(a[flat.objective.var] for a in sols) if sols else None


def test_jobshop_2x2_optimum_matches_enumeration():
    flat = classical_model(_instance("jobshop-2x2"))
    sol = solve(flat)
    assert sol.status is Status.OPTIMUM
    assert check(flat, sol.assignment)
    assert sol.objective_value == _brute_optimum(flat) == 5


def test_jobshop_2x2_scheduling_form_agrees():
    flat = compile_model(scheduling_model(_instance("jobshop-2x2")))
    sol = solve(flat)
    assert sol.status is Status.OPTIMUM and sol.objective_value == 5
    ivs = sol.decoded["intervals"]
    assert max(v["end"] for v in ivs.values()) == 5


def test_unsat_pair():
    f = FlatModel()
    f.add_var("s", Domain.range(0, 10))
    f.post(Intension(f_cmp("ge", FVar("s"), 5)))
    f.post(Intension(f_cmp("le", FVar("s"), 3)))
    sol = solve(f)
    assert sol.status is Status.UNSAT and sol.assignment is None
    assert enumerate_all(f, 100) == []


def test_csp_gives_sat():
    f = FlatModel()
    f.add_var("s", Domain.range(0, 10))
    f.post(Intension(f_cmp("ge", FVar("s"), 5)))
    sol = solve(f)
    assert sol.status is Status.SAT and sol.assignment == {"s": 5}


@pytest.mark.parametrize("nodes", [0, 1, 3])
def test_budget_never_claims_optimum(nodes):
    flat = compile_model(scheduling_model(_instance("jobshop-3x3")))
    sol = solve(flat, SearchBudget(max_nodes=nodes))
    assert sol.status in (Status.TIMEOUT, Status.SAT)
    if sol.status is Status.SAT:
        assert check(flat, sol.assignment)


def test_zero_nodes_is_timeout():
    flat = classical_model(_instance("jobshop-2x2"))
    assert solve(flat, SearchBudget(max_nodes=0)).status is Status.TIMEOUT


def test_zero_millis_is_timeout():
    flat = classical_model(_instance("jobshop-3x3"))
    assert solve(flat, SearchBudget(max_millis=0)).status is Status.TIMEOUT


def test_maximize():
    f = FlatModel()
    f.add_var("x", Domain.range(0, 9))
    f.add_var("y", Domain.range(0, 9))
    f.post(Intension(f_cmp("le", FVar("x"), f_cmp("eq", FVar("y"), 3))))
    f.post(Intension(f_cmp("lt", FVar("y"), 7)))
    f.objective = FlatObjective("maximize", "y")
    sol = solve(f)
    assert sol.status is Status.OPTIMUM and sol.objective_value == 6


def test_enumerate_single_boolean():
    f = FlatModel()
    f.add_var("d", Domain.range(0, 1), True)
    assert enumerate_all(f, 2) == [{"d": 0}, {"d": 1}]


def test_enumerate_two_unit_tasks():
    f = FlatModel()
    f.add_var("a", Domain.range(0, 1))
    f.add_var("b", Domain.range(0, 1))
    f.post(NoOverlap(("a", "b"), (1, 1)))
    assert enumerate_all(f, 4) == [{"a": 0, "b": 1}, {"a": 1, "b": 0}]


def test_enumerate_cap():
    f = FlatModel()
    for v in "abc":
        f.add_var(v, Domain.range(0, 9))
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_all(f, 999)


def test_solve_is_deterministic():
    flat = compile_model(scheduling_model(_instance("flexible-jobshop-setup")))
    a, b = solve(flat), solve(flat)
    assert a.assignment == b.assignment and a.nodes == b.nodes
