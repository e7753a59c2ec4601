import pytest

from intervalc import constraints as C
from intervalc import oracle
from intervalc.compiler import (
    CompileOptions,
    Compiler,
    compile_model,
    decode,
    guard,
    solution_key,
)
from intervalc.errors import (
    IndexDomainExceedsTable,
    NoFeasibleTuple,
    StrategyUnsupported,
    TupleExplosion,
)
from intervalc.expr import (
    ElementArray,
    ElementMatrix,
    count_present,
    element,
    element2d,
    end_of,
    makespan,
    pulse,
    start_of,
    step_at_end,
)
from intervalc.flat import (
    Cumulative,
    ElementCtr,
    Extension,
    FVar,
    Intension,
    NoOverlap,
    evaluate,
    f_cmp,
)
from intervalc.model import Model
from intervalc.solver import enumerate_all, solve
from intervalc.xcsp3 import emit, expr_text

FIG1 = [(0, 100), (10, 50)]


def kinds(flat):
    return [type(c).__name__ for c in flat.constraints]


def decoded_set(flat):
    return {solution_key(decode(flat, a)) for a in enumerate_all(flat, cap=10**9)}


# --- lower_interval ------------------------------------------------------

def test_lower_mandatory_interval():
    m = Model(horizon=15)
    m.interval("a", start=(0, 10), size=5)
    flat = compile_model(m)
    lo = flat.layout["intervals"]["a"]
    assert (lo["p"], lo["l"], lo["sz"]) == (1, 5, 5)
    assert flat.vars["a_s"].domain.to_text() == "0..10"
    assert flat.vars["a_e"].domain.to_text() == "5..15"
    assert expr_text(flat.constraints[0].expr) == "eq(a_e,add(a_s,5))"


def test_lower_optional_interval_adds_presence():
    m = Model(horizon=15)
    m.interval("a", start=(0, 10), size=5, optional=True)
    flat = compile_model(m)
    assert flat.layout["intervals"]["a"]["p"] == "a_p"
    assert flat.vars["a_p"].boolean


def test_lower_bounded_interval_carries_narrowed_size():
    m = Model(horizon=15)
    m.interval("a", start=(0, 4), end=(10, 12), size=(0, 99))
    flat = compile_model(m)
    assert flat.vars["a_sz"].domain.to_text() == "6..12"


# --- guards ----------------------------------------------------------------

def test_guard_without_presences_is_phi():
    phi = f_cmp("ge", FVar("sb"), FVar("ea"))
    assert guard([], phi).expr == phi
    assert guard([1, 1], phi).expr == phi


def test_guard_absent_interval_satisfies_anything():
    g = guard(["pa"], f_cmp("ge", FVar("sb"), FVar("ea")))
    assert evaluate(g.expr, {"pa": 0, "sb": 0, "ea": 9}) == 1
    assert evaluate(g.expr, {"pa": 1, "sb": 0, "ea": 9}) == 0


def test_guard_two_present_phi_false_is_violated():
    g = guard(["pa", "pb"], f_cmp("ge", FVar("sb"), FVar("ea")))
    assert evaluate(g.expr, {"pa": 1, "pb": 1, "sb": 0, "ea": 9}) == 0
    assert evaluate(g.expr, {"pa": 1, "pb": 0, "sb": 0, "ea": 9}) == 1


# --- SeqNoOverlap strategies ------------------------------------------------

def _seq_model(n, optional, strategy_trans=None, size=2):
    m = Model(horizon=8)
    ivs = [m.interval(f"t{i}", start=(0, 6), size=size, optional=optional) for i in range(n)]
    seq = m.sequence("s", ivs)
    m.add(C.seq_no_overlap(seq, strategy_trans))
    return m


def test_three_mandatory_give_one_no_overlap():
    assert kinds(compile_model(_seq_model(3, False))).count("NoOverlap") == 1


def test_three_optional_pairwise_give_three_guarded_disjunctions():
    flat = compile_model(_seq_model(3, True), CompileOptions("pairwise"))
    guarded = [c for c in flat.constraints
               if isinstance(c, Intension) and expr_text(c.expr).startswith("or(eq(t")]
    assert len(guarded) == 3


def test_two_optional_unary_cumulative_gives_variable_heights():
    flat = compile_model(_seq_model(2, True), CompileOptions("unary_cumulative"))
    cums = [c for c in flat.constraints if isinstance(c, Cumulative)]
    assert len(cums) == 1
    assert cums[0].heights == ("t0_p", "t1_p") and cums[0].cap == 1


def test_unary_cumulative_rejects_transitions():
    m = _seq_model(2, True, [[0, 1], [1, 0]])
    with pytest.raises(StrategyUnsupported):
        compile_model(m, CompileOptions("unary_cumulative"))


def test_strategies_agree_on_small_model():
    sets = {s: decoded_set(compile_model(_seq_model(3, True), CompileOptions(s)))
            for s in ("pairwise", "unary_cumulative")}
    assert sets["pairwise"] == sets["unary_cumulative"]
    assert sets["pairwise"] == oracle.solutions(_seq_model(3, True))


def test_unknown_strategy():
    with pytest.raises(ValueError):
        CompileOptions("theta_tree")


# --- cumulatives --------------------------------------------------------------

def test_fixed_pulses_emit_global():
    m = Model(horizon=6)
    ivs = [m.interval(f"t{i}", start=(0, 4), size=2) for i in range(3)]
    m.add(C.seq_cumulative(ivs, [1, 2, 1], 2))
    flat = compile_model(m)
    assert kinds(flat).count("Cumulative") == 1
    assert decoded_set(flat) == oracle.solutions(m)


def test_step_at_end_profile_is_decomposed():
    m = Model(horizon=5)
    a = m.interval("a", start=(0, 3), size=2)
    b = m.interval("b", start=(0, 3), size=1)
    m.add(C.cumul_range(pulse(a, 2) + step_at_end(b, 1), 0, 2))
    flat = compile_model(m)
    assert "Cumulative" not in kinds(flat)
    assert decoded_set(flat) == oracle.solutions(m)


def test_empty_cumul_emits_nothing():
    m = Model(horizon=5)
    m.interval("a", start=(0, 3), size=2)
    before = len(compile_model(m).constraints)
    m.add(C.cumul_range(pulse(m.intervals[0], 0), 0, 3))
    assert len(compile_model(m).constraints) == before


# --- intensity ------------------------------------------------------------------

def _scaled(start=(0, 10), size=10, steps=FIG1, gran=100, horizon=40, **kw):
    m = Model(horizon=horizon)
    iv = m.interval("a", start=start, size=size, intensity=steps, granularity=gran, **kw)
    return m, iv


def test_fig1_tuples_in_table():
    m, iv = _scaled()
    table = Compiler(m).intensity_table(iv)
    assert {(0, 10, 10), (5, 10, 15), (10, 10, 20)} <= set(table)
    got = {t for t in table if t[0] in (0, 5, 10)}
    assert got == {(0, 10, 10), (5, 10, 15), (10, 10, 20)}


def test_full_intensity_table_is_identity():
    m, iv = _scaled(start=(0, 4), size=3, steps=[(0, 100)])
    assert Compiler(m).intensity_table(iv) == [(s, 3, 3) for s in range(5)]


def test_half_intensity_doubles_length():
    m, iv = _scaled(start=(0, 4), size=3, steps=[(0, 50)])
    assert {t[2] for t in Compiler(m).intensity_table(iv)} == {6}


def test_intensity_extension_projects_constant_columns():
    m, _ = _scaled(start=(0, 10))
    flat = compile_model(m)
    ext = [c for c in flat.constraints if isinstance(c, Extension)]
    assert len(ext) == 1 and ext[0].vars == ("a_s", "a_l")
    assert (5, 15) in ext[0].tuples


def test_tuple_explosion():
    m, _ = _scaled(start=(0, 30), size=(1, 10), horizon=60)
    with pytest.raises(TupleExplosion):
        compile_model(m, CompileOptions(max_extension_tuples=5))


def test_no_feasible_tuple_for_mandatory():
    m, _ = _scaled(start=(0, 2), size=10, horizon=40)
    with pytest.raises(NoFeasibleTuple):
        compile_model(m, CompileOptions(horizon_override=8))


# --- elements ---------------------------------------------------------------------

def test_element_fixed_index_folds():
    m = Model(horizon=5)
    x = m.int_var("x", 0, 20)
    m.add(x == element(ElementArray([4, 7, 9]), 1))
    flat = compile_model(m)
    assert not any(isinstance(c, ElementCtr) for c in flat.constraints)
    assert {a["x"] for a in enumerate_all(flat, 100)} == {7}


def test_element_variable_index_emits_element():
    m = Model(horizon=5)
    i = m.int_var("i", 0, 2)
    x = m.int_var("x", 0, 20)
    m.add(x == element(ElementArray([4, 7, 9]), i))
    flat = compile_model(m)
    assert "ElementCtr" in kinds(flat)
    assert {(a["i"], a["x"]) for a in enumerate_all(flat, 10**4)} == {(0, 4), (1, 7), (2, 9)}


def test_matrix_index_beyond_table():
    m = Model(horizon=5)
    r = m.int_var("r", 0, 1)
    c = m.int_var("c", 0, 3)
    x = m.int_var("x", 0, 20)
    m.add(x == element2d(ElementMatrix([[1, 2, 3], [4, 5, 6]]), r, c))
    with pytest.raises(IndexDomainExceedsTable):
        compile_model(m)


def test_matrix_boundary_column():
    m = Model(horizon=5)
    c = m.int_var("c", 3, 3)
    x = m.int_var("x", -5, 20)
    m.add(x == element2d(ElementMatrix([[1, 2, 3], [4, 5, 6]], boundary_value=-1), 0, c))
    assert {a["x"] for a in enumerate_all(compile_model(m), 10**4)} == {-1}


# --- expressions and models ----------------------------------------------------------

def test_precedence_with_delay_is_one_intension():
    m = Model(horizon=10)
    a = m.interval("a", start=(0, 5), size=2)
    b = m.interval("b", start=(0, 5), size=2)
    m.add(start_of(b) >= end_of(a) + 2)
    flat = compile_model(m)
    assert expr_text(flat.constraints[-1].expr) == "ge(b_s,add(a_e,2))"


def test_makespan_objective_optimum():
    m = Model(horizon=10)
    a = m.interval("a", start=(0, 5), size=2)
    b = m.interval("b", start=(0, 5), size=3)
    m.add(C.end_before_start(a, b))
    m.minimize(makespan([a, b]))
    flat = compile_model(m)
    assert flat.objective.var == "obj"
    assert solve(flat).objective_value == 5 == oracle.optimum(m)


def test_count_present_is_sum():
    m = Model(horizon=4)
    ivs = [m.interval(n, start=(0, 2), size=1, optional=True) for n in "abc"]
    m.add(count_present(ivs) == 2)
    flat = compile_model(m)
    assert "add(a_p,b_p,c_p)" in emit(flat)
    assert decoded_set(flat) == oracle.solutions(m)


def test_empty_model():
    flat = compile_model(Model())
    assert flat.counts() == {"vars": 0, "constraints": 0}
    assert flat.objective is None


def test_compile_is_deterministic():
    def build():
        m = _seq_model(3, True, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        m.minimize(makespan(m.intervals))
        return emit(compile_model(m))

    assert build() == build()


def test_horizon_override_sets_state_grid():
    m = Model(horizon=20)
    a = m.interval("a", start=(0, 4), size=2)
    f = m.state_function("f", (0, 2))
    m.add(C.always_equal(f, a, 1))
    flat = compile_model(m, CompileOptions(horizon_override=6))
    assert len(flat.layout["states"]["f"]["vars"]) == 7


def test_no_overlap_direct_matches_pairwise_when_mandatory():
    m = _seq_model(3, False)
    assert decoded_set(compile_model(m)) == decoded_set(compile_model(m, CompileOptions("pairwise")))
    assert isinstance(compile_model(m).constraints[-1], NoOverlap)
