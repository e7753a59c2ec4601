import pytest

from intervalc import constraints as C
from intervalc.compiler import compile_model
from intervalc.errors import MalformedDocument, UnknownElement
from intervalc.families import bundled, classical_model, scheduling_model
from intervalc.flat import (
    Cumulative,
    Domain,
    ElementCtr,
    Extension,
    FlatModel,
    FlatObjective,
    FVar,
    Intension,
    NoOverlap,
    check,
    f_add,
    f_cmp,
)
from intervalc.model import Model
from intervalc.solver import enumerate_all
from intervalc.xcsp3 import emit, expr_text, parse, parse_expr


def test_single_var_document():
    f = FlatModel()
    f.add_var("s", Domain.range(0, 10))
    doc = emit(f)
    assert '<var id="s"> 0..10 </var>' in doc
    assert doc.startswith('<instance format="XCSP3" type="CSP">')
    assert "<constraints>" not in doc and "<objectives>" not in doc


def test_objective_block_only_with_objective():
    f = FlatModel()
    f.add_var("m", Domain.range(0, 3))
    f.objective = FlatObjective("minimize", "m")
    doc = emit(f)
    assert 'type="COP"' in doc
    assert "<minimize> m </minimize>" in doc


def test_gapped_domain_text():
    f = FlatModel()
    f.add_var("x", Domain.of_values([0, 1, 2, 5, 8, 9]))
    assert "> 0..2 5 8..9 <" in emit(f)


def test_rcpsp_toy_has_one_cumulative():
    inst = next(i for i in bundled() if i.name == "rcpsp-toy")
    doc = emit(compile_model(scheduling_model(inst)))
    assert doc.count("<cumulative>") == 1
    assert "<condition> (le,3) </condition>" in doc


def test_hand_written_minimal_instance():
    doc = """<instance format="XCSP3" type="CSP">
  <variables>
    <var id="x"> 0..4 </var>
  </variables>
  <constraints>
    <intension> gt(x,2) </intension>
  </constraints>
</instance>
"""
    f = parse(doc)
    assert f.counts() == {"vars": 1, "constraints": 1}
    assert [x for x in range(5) if check(f, {"x": x})] == [3, 4]
    assert emit(f) == doc


def test_undeclared_variable():
    doc = ('<instance format="XCSP3" type="CSP"><variables><var id="x"> 0..1 </var></variables>'
           '<constraints><intension> eq(x,y) </intension></constraints></instance>')
    with pytest.raises(MalformedDocument):
        parse(doc)


@pytest.mark.parametrize("doc", [
    "<instance",
    '<instance format="XCSP2"/>',
    '<instance format="XCSP3"><variables><var id="x"> 0..a </var></variables></instance>',
    '<instance format="XCSP3"><variables><var id="x"> 0..1 </var></variables>'
    '<constraints><intension> foo(x) </intension></constraints></instance>',
])
def test_malformed(doc):
    with pytest.raises(MalformedDocument):
        parse(doc)


def test_unknown_element():
    doc = ('<instance format="XCSP3" type="CSP"><variables><var id="x"> 0..1 </var></variables>'
           '<constraints><allDifferent> x </allDifferent></constraints></instance>')
    with pytest.raises(UnknownElement):
        parse(doc)


def test_expression_round_trip():
    e = f_cmp("le", f_add(FVar("x"), 2), FVar("y"))
    assert expr_text(e) == "le(add(x,2),y)"
    assert parse_expr("le(add(x,2),y)") == e
    assert parse_expr(" le( add( x , -2 ) , y ) ") == f_cmp("le", f_add(FVar("x"), -2), FVar("y"))


def test_every_constraint_kind_round_trips():
    f = FlatModel()
    for v in "abcdi":
        f.add_var(v, Domain.range(0, 3))
    f.add_var("p", Domain.range(0, 1), True)
    f.post(Intension(f_cmp("ne", FVar("a"), FVar("b"))))
    f.post(Extension(("a", "b"), ((0, 1), (2, 3))))
    f.post(Extension(("c",), ((1,), (2,)), False))
    f.post(NoOverlap(("a", "b"), (1, "c")))
    f.post(Cumulative(("a", "b", "c"), (1, 1, 2), ("p", 1, 1), 2))
    f.post(ElementCtr((3, 1, 0, 2), ("i",), "d"))
    f.post(ElementCtr(((0, 1), (2, 3)), ("p", "p"), "d"))
    doc = emit(f)
    g = parse(doc)
    assert emit(g) == doc
    assert enumerate_all(f, 10**6) == enumerate_all(g, 10**6)


def test_emission_keeps_constraint_order():
    m = Model(horizon=6)
    a = m.interval("a", start=(0, 4), size=2)
    b = m.interval("b", start=(0, 4), size=2)
    m.add(C.end_before_start(b, a), C.release_date(b, 1))
    flat = compile_model(m)
    doc = emit(flat)
    assert doc.index("ge(a_s,b_e)") < doc.index("ge(b_s,1)")


@pytest.mark.parametrize("inst", bundled(), ids=lambda i: i.name)
def test_bundled_re_emission_is_byte_identical(inst):
    for flat in (compile_model(scheduling_model(inst)), classical_model(inst)):
        doc = emit(flat)
        assert emit(parse(doc)) == doc
