"""Compiled models against the semantic oracle, kind by kind.

For each registered constraint and expression kind a few small random models
are compiled, every flat solution is enumerated and decoded, and the decoded
set must equal the set of interval assignments the oracle accepts.
"""

import random

import pytest
from randmodels import ALL_BUILDERS, random_disjunctive_model, random_model

from intervalc import oracle
from intervalc.compiler import compile_model, decode, solution_key
from intervalc.errors import ModelError
from intervalc.expr import makespan
from intervalc.flat import Status, check
from intervalc.solver import enumerate_all, solve

SLOW = {"same_sequence": 1}


def test_registry_size():
    from randmodels import CONSTRAINT_BUILDERS, EXPRESSION_BUILDERS

    assert len(CONSTRAINT_BUILDERS) == 53
    assert len(EXPRESSION_BUILDERS) == 27


@pytest.mark.parametrize("kind", sorted(ALL_BUILDERS))
def test_compiled_solutions_equal_oracle(kind):
    for seed in range(SLOW.get(kind, 3)):
        try:
            m = random_model(random.Random(seed), kind)
        except ModelError:
            continue
        flat = compile_model(m)
        got = {solution_key(decode(flat, a)) for a in enumerate_all(flat, cap=10**40)}
        assert got == oracle.solutions(m), f"{kind} seed {seed}"


@pytest.mark.parametrize("seed", range(20))
def test_optimum_preserved(seed):
    m, _ = random_disjunctive_model(random.Random(seed))
    m.minimize(makespan(m.intervals))
    flat = compile_model(m)
    sol = solve(flat)
    want = oracle.optimum(m)
    if want is None:
        assert sol.status is Status.UNSAT
    else:
        assert sol.status is Status.OPTIMUM and check(flat, sol.assignment)
        assert sol.objective_value == want
