import pytest

from intervalc.errors import BadIntensity, DuplicateInterval, EmptyDomain, LengthMismatch
from intervalc.expr import (
    Assignment,
    IntervalValue,
    eval_scalar,
    span_length,
    start_of,
)
from intervalc.model import (
    IntDomain,
    IntensityProfile,
    Model,
    intensity_tuples,
    new_interval,
    new_sequence,
)

FIG1 = [(0, 100), (10, 50)]


def test_int_domain_fixed_and_empty():
    assert IntDomain.of(5) == IntDomain(5, 5)
    assert IntDomain.of(5).fixed
    with pytest.raises(EmptyDomain):
        IntDomain(3, 2)


def test_end_domain_follows_start_plus_size():
    iv = new_interval("a", start=(0, 20), size=5)
    assert (iv.end.lb, iv.end.ub) == (5, 25)
    assert iv.length == iv.size == IntDomain(5, 5)


def test_bounded_variant_narrows_size():
    iv = new_interval("a", start=(0, 4), end=(10, 12), size=(0, 99))
    pairs = {e - s for s in range(0, 5) for e in range(10, 13)}
    assert (iv.size.lb, iv.size.ub) == (min(pairs), max(pairs)) == (6, 12)


def test_narrowing_is_idempotent():
    iv = new_interval("a", start=(0, 4), end=(10, 12), size=(0, 99))
    again = new_interval("a", start=(iv.start.lb, iv.start.ub), end=(iv.end.lb, iv.end.ub),
                         size=(iv.size.lb, iv.size.ub))
    assert (again.start, again.end, again.size) == (iv.start, iv.end, iv.size)


def test_inconsistent_domains_raise():
    with pytest.raises(EmptyDomain):
        new_interval("a", start=(0, 2), end=(10, 12), size=3)


def test_fig1_intensity_tuples():
    iv = new_interval("a", start=(0, 40), size=10, intensity=FIG1, horizon=60)
    tuples = intensity_tuples(iv.intensity, [0, 5, 10], [10], 60)
    assert (0, 10, 10) in tuples and (5, 10, 15) in tuples and (10, 10, 20) in tuples


@pytest.mark.parametrize("steps,gran", [
    ([(1, 50)], 100),           # does not start at 0
    ([(0, 150)], 100),          # above granularity
    ([(0, 50), (0, 60)], 100),  # not increasing
    ([(0, 50)], 0),             # granularity
])
def test_bad_intensity(steps, gran):
    with pytest.raises(BadIntensity):
        IntensityProfile(tuple(steps), gran)


def test_constant_full_intensity_means_length_equals_size():
    prof = IntensityProfile(((0, 100),), 100)
    assert intensity_tuples(prof, range(5), [3], 20) == [(s, 3, 3) for s in range(5)]


def test_half_intensity_doubles_length():
    prof = IntensityProfile(((0, 50),), 100)
    assert {t[2] for t in intensity_tuples(prof, range(5), [3], 20)} == {6}


def test_eq1_holds_for_every_admitted_tuple():
    prof = IntensityProfile(((0, 100), (3, 25), (7, 0), (9, 75)), 100)
    for s, z, ln in intensity_tuples(prof, range(12), range(0, 4), 30):
        assert sum(prof.value(t) for t in range(s, s + ln)) == z * prof.granularity


def test_sequence_types():
    a = new_interval("a", size=1)
    b = new_interval("b", size=1)
    c = new_interval("c", size=1)
    assert new_sequence("s", [a, b, c]).types == (0, 1, 2)
    assert new_sequence("s", [a, b], [3, 3]).types == (3, 3)
    with pytest.raises(DuplicateInterval):
        new_sequence("s", [a, a])
    with pytest.raises(LengthMismatch):
        new_sequence("s", [a, b], [1])


def test_eval_accessor_present_and_absent():
    m = Model()
    a = m.interval("a", start=(0, 10), size=2, optional=True)
    present = Assignment({"a": IntervalValue(True, 4, 6, 2, 2)})
    absent = Assignment({"a": IntervalValue(False)})
    assert eval_scalar(start_of(a, -1), present) == 4
    assert eval_scalar(start_of(a, -1), absent) == -1


def test_eval_span_length():
    m = Model()
    a = m.interval("a", start=(0, 10), size=(0, 10))
    b = m.interval("b", start=(0, 10), size=(0, 10))
    asn = Assignment({"a": IntervalValue(True, 2, 5, 3, 3), "b": IntervalValue(True, 7, 9, 2, 2)})
    assert eval_scalar(span_length([a, b]), asn) == 7


def test_default_horizon_is_largest_bound():
    m = Model()
    m.interval("a", start=(0, 10), size=3)
    assert m.horizon == 13
