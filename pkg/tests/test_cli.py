import json
import subprocess
import sys

import pytest

from intervalc.cli import main
from intervalc.families import bundled_paths
from intervalc.xcsp3 import parse

PATHS = {p.stem: p for p in bundled_paths()}

UNSAT = """<instance format="XCSP3" type="CSP">
  <variables>
    <var id="s"> 0..10 </var>
  </variables>
  <constraints>
    <intension> ge(s,5) </intension>
    <intension> le(s,3) </intension>
  </constraints>
</instance>
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_jobshop_has_no_overlap_per_machine(capsys, tmp_path):
    out = tmp_path / "js.xml"
    code, stdout, _ = run(capsys, "build", "jobshop", PATHS["jobshop-2x2"], "--out", out)
    assert code == 0
    doc = out.read_text()
    assert doc.count("<noOverlap>") == 2
    assert json.loads(stdout)["constraints"] == len(parse(doc).constraints)


def test_build_rcpsp_toy_has_one_cumulative(capsys, tmp_path):
    out = tmp_path / "toy.xml"
    assert run(capsys, "build", "rcpsp", PATHS["rcpsp-toy"], "--out", out)[0] == 0
    assert out.read_text().count("<cumulative>") == 1


def test_build_classical(capsys, tmp_path):
    out = tmp_path / "c.xml"
    assert run(capsys, "build", "flowshop", PATHS["flowshop-2x2"], "--classical", "--out", out)[0] == 0
    assert "<noOverlap>" in out.read_text()


def test_build_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    code, _, err = run(capsys, "build", "jobshop", bad, "--out", tmp_path / "x.xml")
    assert code == 1 and "ParseError" in err


def test_build_wrong_family(capsys, tmp_path):
    code, _, err = run(capsys, "build", "rcpsp", PATHS["jobshop-2x2"], "--out", tmp_path / "x.xml")
    assert code == 1 and "not rcpsp" in err


def test_solve_instance_optimum(capsys, tmp_path):
    sol = tmp_path / "sol.json"
    code, stdout, _ = run(capsys, "solve", PATHS["jobshop-2x2"], "--out", sol)
    rep = json.loads(stdout)
    assert code == 0 and rep["status"] == "OPTIMUM" and rep["objective"] == 5
    assert "millis" not in rep
    assert json.loads(sol.read_text())["decoded"]["intervals"]["j0_o0"]["present"]


def test_solve_xml_round_trip(capsys, tmp_path):
    xml = tmp_path / "js.xml"
    run(capsys, "build", "jobshop", PATHS["jobshop-2x2"], "--out", xml)
    code, stdout, _ = run(capsys, "solve", xml)
    assert code == 0 and json.loads(stdout)["objective"] == 5


def test_solve_unsat_exit_20(capsys, tmp_path):
    xml = tmp_path / "u.xml"
    xml.write_text(UNSAT)
    code, stdout, _ = run(capsys, "solve", xml)
    assert code == 20 and json.loads(stdout)["status"] == "UNSAT"


def test_solve_zero_budget_exit_30(capsys):
    code, stdout, _ = run(capsys, "solve", PATHS["jobshop-3x3"], "--budget-nodes", 0)
    assert code == 30 and json.loads(stdout)["status"] == "TIMEOUT"


def test_solve_malformed_xml(capsys, tmp_path):
    xml = tmp_path / "m.xml"
    xml.write_text("<instance format='XCSP3'><variables>")
    code, _, err = run(capsys, "solve", xml)
    assert code == 1 and "MalformedDocument" in err


def test_solve_timing_flag(capsys):
    _, stdout, _ = run(capsys, "solve", PATHS["jobshop-2x2"], "--timing")
    assert isinstance(json.loads(stdout)["millis"], int)


def test_compare_reports_equality(capsys):
    code, stdout, _ = run(capsys, "compare", "jobshop", PATHS["jobshop-2x2"])
    rep = json.loads(stdout)
    assert code == 0
    assert rep["both_optimum"] and rep["objective_equal"]
    assert rep["scheduling"]["objective"] == rep["classical"]["objective"] == 5
    c = rep["classical"]
    want = round((rep["scheduling"]["vars"] - c["vars"]) / c["vars"] * 100, 1)
    assert rep["var_augmentation_pct"] == want


def test_compare_unknown_family_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compare", "openshop", str(PATHS["jobshop-2x2"])])
    assert exc.value.code == 2


def test_compare_with_strategy(capsys):
    code, stdout, _ = run(capsys, "compare", "flexible-jobshop", PATHS["flexible-jobshop-2x2"],
                          "--strategy", "pairwise")
    assert code == 0 and json.loads(stdout)["objective_equal"]


def test_render(capsys, tmp_path):
    sol, svg = tmp_path / "sol.json", tmp_path / "g.svg"
    run(capsys, "solve", PATHS["rcpsp-toy"], "--out", sol)
    assert run(capsys, "render", sol, PATHS["rcpsp-toy"], svg)[0] == 0
    assert svg.read_text().startswith("<?xml")


def test_render_without_solution(capsys, tmp_path):
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps({"status": "TIMEOUT"}))
    code, _, err = run(capsys, "render", sol, PATHS["rcpsp-toy"], tmp_path / "g.svg")
    assert code == 1 and "NoSolution" in err


def test_outputs_are_byte_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.xml", tmp_path / "b.xml"
    run(capsys, "build", "flexible-jobshop", PATHS["flexible-jobshop-setup"], "--out", a)
    run(capsys, "build", "flexible-jobshop", PATHS["flexible-jobshop-setup"], "--out", b)
    assert a.read_bytes() == b.read_bytes()
    r1 = run(capsys, "compare", "rcpsp", PATHS["rcpsp-toy"])[1]
    r2 = run(capsys, "compare", "rcpsp", PATHS["rcpsp-toy"])[1]
    assert r1 == r2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "intervalc.cli", "compare", "rcpsp",
                           str(PATHS["rcpsp-toy"])], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["objective_equal"] is True
