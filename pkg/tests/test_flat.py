import pytest

from intervalc.errors import PartialAssignment
from intervalc.flat import (
    Cumulative,
    Domain,
    ElementCtr,
    Extension,
    FlatModel,
    FVar,
    Intension,
    NoOverlap,
    check,
    evaluate,
    f_add,
    f_and,
    f_cmp,
    f_mul,
    f_or,
    holds,
    op,
)


def test_domain_ranges_merge_and_text():
    d = Domain.of_values([0, 1, 2, 3, 7, 9, 10])
    assert d.ranges == ((0, 3), (7, 7), (9, 10))
    assert d.to_text() == "0..3 7 9..10"
    assert Domain.parse(d.to_text()) == d
    assert len(d) == 7 and 8 not in d and 9 in d
    assert (d.lb, d.ub) == (0, 10)


def test_domain_rejects_empty_and_garbage():
    with pytest.raises(ValueError):
        Domain([])
    with pytest.raises(ValueError):
        Domain.parse("3..x")


def test_empty_model_empty_assignment():
    assert check(FlatModel(), {})


def test_partial_assignment_raises():
    f = FlatModel()
    f.add_var("x", Domain.range(0, 3))
    with pytest.raises(PartialAssignment):
        check(f, {})


def test_out_of_domain_value_fails():
    f = FlatModel()
    f.add_var("x", Domain.of_values([1, 3]))
    assert check(f, {"x": 3})
    assert not check(f, {"x": 2})


def test_no_overlap_detects_overlap():
    c = NoOverlap(("a", "b"), (3, 3))
    assert not holds(c, {"a": 0, "b": 2})
    assert holds(c, {"a": 0, "b": 3})
    assert holds(c, {"a": 3, "b": 0})


def test_no_overlap_ignores_zero_length():
    assert holds(NoOverlap(("a", "b"), (0, 3)), {"a": 1, "b": 0})


def test_cumulative_unit_capacity_with_presence_heights():
    c = Cumulative(("a", "b"), (2, 2), ("pa", "pb"), 1)
    assert not holds(c, {"a": 0, "b": 1, "pa": 1, "pb": 1})
    assert holds(c, {"a": 0, "b": 1, "pa": 1, "pb": 0})
    assert holds(c, {"a": 0, "b": 2, "pa": 1, "pb": 1})


def test_no_overlap_matches_pairwise_disjunctions():
    import itertools

    lens = (2, 1, 3)
    names = ("a", "b", "c")
    c = NoOverlap(names, lens)
    for starts in itertools.product(range(5), repeat=3):
        asn = dict(zip(names, starts))
        pairwise = all(starts[i] + lens[i] <= starts[j] or starts[j] + lens[j] <= starts[i]
                       for i in range(3) for j in range(i + 1, 3))
        assert holds(c, asn) == pairwise


def test_extension_positive_and_negative():
    rows = ((0, 1), (1, 0))
    assert holds(Extension(("x", "y"), rows), {"x": 1, "y": 0})
    assert not holds(Extension(("x", "y"), rows), {"x": 1, "y": 1})
    assert holds(Extension(("x", "y"), rows, False), {"x": 1, "y": 1})


def test_element_1d_and_2d():
    assert holds(ElementCtr((4, 7, 9), ("i",), "v"), {"i": 1, "v": 7})
    assert not holds(ElementCtr((4, 7, 9), ("i",), "v"), {"i": 1, "v": 4})
    assert not holds(ElementCtr((4, 7, 9), ("i",), "v"), {"i": 3, "v": 4})
    m = ((1, 2), (3, 4))
    assert holds(ElementCtr(m, ("r", "c"), "v"), {"r": 1, "c": 0, "v": 3})


def test_evaluate_truncating_division_and_booleans():
    assert evaluate(op("div", -7, 2), {}) == -3
    assert evaluate(op("abs", -4), {}) == 4
    e = f_or(f_cmp("le", FVar("x"), 2), f_and(f_cmp("eq", FVar("y"), 1), f_cmp("gt", FVar("x"), 5)))
    assert evaluate(e, {"x": 6, "y": 1}) == 1
    assert evaluate(e, {"x": 4, "y": 1}) == 0


def test_folding_builders_simplify_constants():
    assert f_add(1, 2).value == 3
    assert f_mul(FVar("x"), 0).value == 0
    assert f_mul(FVar("x"), 1) == FVar("x")
    assert f_or(FVar("b"), 1).value == 1
    assert f_and(FVar("b"), 0).value == 0


def test_intension_check():
    f = FlatModel()
    f.add_var("x", Domain.range(0, 5))
    f.post(Intension(f_cmp("ge", FVar("x"), 3)))
    assert [x for x in range(6) if check(f, {"x": x})] == [3, 4, 5]
    assert f.counts() == {"vars": 1, "constraints": 1}
    assert f.search_space() == 6
