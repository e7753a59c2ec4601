import json

import pytest

from intervalc import oracle
from intervalc.compiler import compile_model
from intervalc.errors import ParseError
from intervalc.families import (
    FAMILIES,
    bundled,
    classical_model,
    horizon,
    parse_instance,
    scheduling_model,
)
from intervalc.flat import NoOverlap, Status
from intervalc.solver import solve

ALL = bundled()


def test_bundle_covers_every_family():
    assert len(ALL) >= 12
    assert {i.family for i in ALL} == set(FAMILIES)
    assert len({i.name for i in ALL}) == len(ALL)


@pytest.mark.parametrize("text, msg", [
    ("{", "invalid JSON"),
    ("[]", "JSON object"),
    ('{"schema": 2, "family": "jobshop"}', "schema"),
    ('{"schema": 1, "family": "openshop"}', "family"),
    ('{"schema": 1, "family": "jobshop", "durations": [[1, 2], [3]], "machines": [[0, 1], [1]]}',
     "rectangular"),
    ('{"schema": 1, "family": "flowshop", "durations": [[1, -2]]}', ">= 0"),
])
def test_bad_instances(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_instance(text)


def test_horizon_is_total_work_at_least():
    inst = parse_instance(json.dumps({"schema": 1, "family": "flowshop",
                                      "durations": [[1, 2], [3, 1]]}))
    assert horizon(inst) >= 7


def test_small_jobshop_matches_semantic_oracle():
    inst = parse_instance(json.dumps({"schema": 1, "family": "jobshop",
                                      "durations": [[1, 1], [2, 1]],
                                      "machines": [[0, 1], [1, 0]]}))
    m = scheduling_model(inst)
    sol = solve(compile_model(m))
    assert sol.status is Status.OPTIMUM
    assert sol.objective_value == oracle.optimum(m)


def test_classical_shop_has_one_no_overlap_per_machine():
    inst = next(i for i in ALL if i.name == "jobshop-3x3")
    flat = classical_model(inst)
    assert sum(isinstance(c, NoOverlap) for c in flat.constraints) == 3


@pytest.mark.parametrize("inst", ALL, ids=lambda i: i.name)
def test_formulations_agree(inst):
    s = solve(compile_model(scheduling_model(inst)))
    c = solve(classical_model(inst))
    assert s.status is c.status is Status.OPTIMUM
    assert s.objective_value == c.objective_value
