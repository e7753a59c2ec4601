import re
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from intervalc import constraints as C
from intervalc.compiler import compile_model
from intervalc.errors import ModelError, NoSolution
from intervalc.families import bundled, scheduling_model
from intervalc.flat import Solution, Status
from intervalc.gantt import PALETTE, Timeline, render
from intervalc.model import Model
from intervalc.solver import solve

GOLDEN = Path(__file__).parent / "golden" / "rcpsp-toy.svg"
NS = "{http://www.w3.org/2000/svg}"


def _decoded(**spans):
    ivs = {}
    for k, v in spans.items():
        if v is None:
            ivs[k] = {"present": False, "start": 0, "end": 0, "size": 0, "length": 0}
        else:
            ivs[k] = {"present": True, "start": v[0], "end": v[1], "size": v[1] - v[0],
                      "length": v[1] - v[0]}
    return Solution(Status.SAT, {}, None, {"intervals": ivs, "sequences": {}, "ints": {},
                                            "states": {}})


def _task_rects(svg):
    root = ET.fromstring(svg)
    return [r for r in root.iter(f"{NS}rect") if r.find(f"{NS}title") is not None]


def test_single_interval_maps_proportionally():
    m = Model(horizon=10)
    m.interval("a", start=(0, 8), size=3)
    rects = _task_rects(render(_decoded(a=(2, 5)), m))
    assert len(rects) == 1
    assert float(rects[0].get("x")) == 200 and float(rects[0].get("width")) == 300


def test_absent_interval_has_no_rect():
    m = Model(horizon=10)
    m.interval("a", start=(0, 8), size=3)
    m.interval("b", start=(0, 8), size=3, optional=True)
    svg = render(_decoded(a=(2, 5), b=None), m)
    assert [r.find(f"{NS}title").text for r in _task_rects(svg)] == ["a [2,5)"]


def test_rects_round_trip_to_start_and_length():
    inst = next(i for i in bundled() if i.name == "jobshop-3x3")
    m = scheduling_model(inst)
    sol = solve(compile_model(m))
    for r in _task_rects(render(sol, m)):
        name = r.find(f"{NS}title").text.split()[0]
        v = sol.decoded["intervals"][name]
        assert float(r.get("x")) * m.horizon / 1000 == pytest.approx(v["start"], abs=0.01)
        assert float(r.get("width")) * m.horizon / 1000 == pytest.approx(v["length"], abs=0.01)
        assert r.get("fill") == PALETTE[m.interval_by_id(name).index % len(PALETTE)]


def test_profile_stays_under_capacity_line():
    inst = next(i for i in bundled() if i.name == "rcpsp-6x2")
    m = scheduling_model(inst)
    svg = render(solve(compile_model(m)), m)
    root = ET.fromstring(svg)
    for g in root.iter(f"{NS}g"):
        poly = g.find(f"{NS}polyline")
        if poly is None:
            continue
        cap_y = float(g.find(f"{NS}line[@stroke='#d62728']").get("y1"))
        ys = [float(p.split(",")[1]) for p in poly.get("points").split()]
        assert min(ys) >= cap_y  # svg y grows downward


def test_sequence_panel_marks_gaps():
    m = Model(horizon=10)
    a = m.interval("a", start=(0, 8), size=2)
    b = m.interval("b", start=(0, 8), size=2)
    m.sequence("s", [a, b])
    sol = _decoded(a=(1, 3), b=(5, 7))
    sol.decoded["sequences"]["s"] = ["a", "b"]
    svg = render(sol, m)
    assert 'stroke-dasharray="3,2"' in svg
    assert re.search(r'<line x1="300" y1="\d+" x2="500"', svg)


def test_no_solution():
    m = Model(horizon=4)
    for st in (Status.UNSAT, Status.TIMEOUT):
        with pytest.raises(NoSolution):
            render(Solution(st), m)


def test_custom_layout_and_validation():
    m = Model(horizon=10)
    m.interval("a", start=(0, 8), size=3)
    m.interval("b", start=(0, 8), size=3)
    tl = Timeline(10).panel("only-b", "intervals", ["b"])
    svg = render(_decoded(a=(0, 3), b=(4, 7)), m, tl)
    assert 'height="60"' in svg and "b [4,7)" in svg and "a [0,3)" not in svg
    with pytest.raises(ModelError):
        tl.panel("only-b", "intervals", ["a"])
    with pytest.raises(ModelError):
        tl.panel("x", "histogram")


def test_default_layout_panels():
    m = Model(horizon=6)
    a = m.interval("a", start=(0, 4), size=2)
    b = m.interval("b", start=(0, 4), size=2)
    c = m.interval("c", start=(0, 4), size=2)
    m.sequence("s", [a, b])
    m.add(C.seq_cumulative([a, c], [1, 1], 1))
    assert [(p.name, p.kind) for p in Timeline.default(m).panels] == [
        ("s", "sequence"), ("intervals", "intervals"), ("cumul0", "cumulative")]


def test_rcpsp_toy_matches_golden():
    inst = next(i for i in bundled() if i.name == "rcpsp-toy")
    m = scheduling_model(inst)
    first = render(solve(compile_model(m)), m)
    second = render(solve(compile_model(scheduling_model(inst))), scheduling_model(inst))
    assert first == second == GOLDEN.read_text(encoding="utf-8")
