"""Declarative constraint records.

Every record knows the objects it references and carries its defining
formula as the executable predicate :meth:`Constraint.holds`, evaluated
directly on an :class:`~intervalc.expr.Assignment`.  The compiler lowers
records without going through ``holds``, so the two stay independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    BadBounds,
    BadCardinality,
    BadK,
    BadMin,
    BadPeriod,
    BadTransitionMatrix,
    BadWindow,
    EmptyChildren,
    LengthMismatch,
    ModelError,
    NoCommonIntervals,
    NotInSequence,
    StateOutOfDomain,
)
from .expr import (
    Assignment,
    BoolExpr,
    CumulExpr,
    ElementMatrix,
    IntervalValue,
    eval_bool,
    profile_at,
    referenced_objects,
    sequence_order,
)
from .model import IntervalVar, SequenceVar, StateFunction


class Constraint:
    """Base record.  ``kind`` is the public constraint name."""

    kind: str
    __hash__ = object.__hash__

    def references(self) -> Iterator:
        return iter(self.intervals())

    def intervals(self) -> list[IntervalVar]:
        return []

    def guard(self) -> list[IntervalVar]:
        """Optional intervals whose absence switches the record off."""
        return [iv for iv in self.intervals() if iv.optional]

    def holds(self, asn: Assignment, horizon: int = 0) -> bool:
        raise NotImplementedError


def _v(asn: Assignment, iv: IntervalVar) -> IntervalValue:
    return asn.intervals[iv.id]


def _unique(ivs) -> list[IntervalVar]:
    seen: dict[int, IntervalVar] = {}
    for iv in ivs:
        seen.setdefault(id(iv), iv)
    return list(seen.values())


# --- precedence ----------------------------------------------------------

# kind -> (constrained interval, attr, op, reference interval, attr): X op Y + delay
PRECEDENCE_FORMS = {
    "start_at_start": ("b", "start", "eq", "a", "start"),
    "start_at_end": ("b", "start", "eq", "a", "end"),
    "end_at_start": ("a", "end", "eq", "b", "start"),
    "end_at_end": ("b", "end", "eq", "a", "end"),
    "start_before_start": ("b", "start", "ge", "a", "start"),
    "start_before_end": ("b", "end", "ge", "a", "start"),
    "end_before_start": ("b", "start", "ge", "a", "end"),
    "end_before_end": ("b", "end", "ge", "a", "end"),
}


@dataclass(eq=False)
class Precedence(Constraint):
    kind: str
    a: IntervalVar
    b: IntervalVar
    delay: int = 0

    def __post_init__(self):
        if self.kind not in PRECEDENCE_FORMS:
            raise ModelError(f"unknown precedence {self.kind!r}")

    def intervals(self):
        return _unique([self.a, self.b])

    def sides(self):
        """((interval, attr), op, (interval, attr)) meaning X op Y + delay."""
        xn, xa, op, yn, ya = PRECEDENCE_FORMS[self.kind]
        return (getattr(self, xn), xa), op, (getattr(self, yn), ya)

    def holds(self, asn, horizon=0):
        va, vb = _v(asn, self.a), _v(asn, self.b)
        if not (va.present and vb.present):
            return True
        (x, xa), op, (y, ya) = self.sides()
        lhs = _v(asn, x).attr(xa)
        rhs = _v(asn, y).attr(ya) + self.delay
        return lhs == rhs if op == "eq" else lhs >= rhs


def precedence(kind: str, a, b, delay: int = 0) -> Precedence:
    return Precedence(kind, a, b, int(delay))


def _prec(kind):
    def make(a, b, delay: int = 0) -> Precedence:
        return Precedence(kind, a, b, int(delay))

    make.__name__ = kind
    return make


start_at_start = _prec("start_at_start")
start_at_end = _prec("start_at_end")
end_at_start = _prec("end_at_start")
end_at_end = _prec("end_at_end")
start_before_start = _prec("start_before_start")
start_before_end = _prec("start_before_end")
end_before_start = _prec("end_before_start")
end_before_end = _prec("end_before_end")


# --- grouping ------------------------------------------------------------


def _children(ivs) -> tuple[IntervalVar, ...]:
    ivs = tuple(ivs)
    if not ivs:
        raise EmptyChildren("child list is empty")
    return ivs


@dataclass(eq=False)
class Span(Constraint):
    main: IntervalVar
    subs: tuple[IntervalVar, ...]
    kind = "span"

    def intervals(self):
        return _unique((self.main,) + self.subs)

    def guard(self):
        return []

    def holds(self, asn, horizon=0):
        vm = _v(asn, self.main)
        present = [_v(asn, x) for x in self.subs if _v(asn, x).present]
        if vm.present != bool(present):
            return False
        if not vm.present:
            return True
        return vm.start == min(v.start for v in present) and vm.end == max(v.end for v in present)


def span(main, subs) -> Span:
    return Span(main, _children(subs))


@dataclass(eq=False)
class Alternative(Constraint):
    main: IntervalVar
    alts: tuple[IntervalVar, ...]
    cardinality: int = 1
    kind = "alternative"

    def intervals(self):
        return _unique((self.main,) + self.alts)

    def guard(self):
        return []

    def holds(self, asn, horizon=0):
        vm = _v(asn, self.main)
        present = [_v(asn, x) for x in self.alts if _v(asn, x).present]
        if not vm.present:
            return not present
        if len(present) != self.cardinality:
            return False
        return all(v.start == vm.start and v.end == vm.end for v in present)


def alternative(main, alts, cardinality: int = 1) -> Alternative:
    alts = _children(alts)
    if cardinality < 1 or cardinality > len(alts):
        raise BadCardinality(f"cardinality {cardinality} with {len(alts)} alternatives")
    return Alternative(main, alts, int(cardinality))


@dataclass(eq=False)
class Synchronize(Constraint):
    main: IntervalVar
    ivs: tuple[IntervalVar, ...]
    kind = "synchronize"

    def intervals(self):
        return _unique((self.main,) + self.ivs)

    def holds(self, asn, horizon=0):
        vm = _v(asn, self.main)
        if not vm.present:
            return True
        for x in self.ivs:
            v = _v(asn, x)
            if v.present and (v.start != vm.start or v.end != vm.end):
                return False
        return True


def synchronize(main, ivs) -> Synchronize:
    return Synchronize(main, _children(ivs))


# --- sequences -----------------------------------------------------------


def _transition_matrix(transitions, n_types: int) -> tuple[tuple[int, ...], ...] | None:
    if transitions is None:
        return None
    data = transitions.data if isinstance(transitions, ElementMatrix) else transitions
    rows = tuple(tuple(int(v) for v in r) for r in data)
    side = len(rows)
    if any(len(r) != side for r in rows):
        raise BadTransitionMatrix("transition matrix must be square")
    if side < n_types:
        raise BadTransitionMatrix(f"transition matrix side {side} < {n_types} types")
    if any(v < 0 for r in rows for v in r):
        raise BadTransitionMatrix("transition times must be non-negative")
    return rows


def _pairwise_ok(vals, types, d, is_direct, order=None) -> bool:
    n = len(vals)
    for i in range(n):
        vi = vals[i]
        if not vi.present:
            continue
        for j in range(i + 1, n):
            vj = vals[j]
            if not vj.present:
                continue
            dij = d[types[i]][types[j]] if d is not None and not is_direct else 0
            dji = d[types[j]][types[i]] if d is not None and not is_direct else 0
            if not (vi.end + dij <= vj.start or vj.end + dji <= vi.start):
                return False
    if d is not None and is_direct:
        for i, j in zip(order, order[1:]):
            if vals[i].end + d[types[i]][types[j]] > vals[j].start:
                return False
    return True


@dataclass(eq=False)
class SeqNoOverlap(Constraint):
    seq: SequenceVar
    transitions: tuple[tuple[int, ...], ...] | None = None
    is_direct: bool = False
    kind = "seq_no_overlap"

    def references(self):
        yield self.seq
        yield from self.seq.intervals

    def intervals(self):
        return list(self.seq.intervals)

    def holds(self, asn, horizon=0):
        vals = [_v(asn, x) for x in self.seq.intervals]
        order = sequence_order(self.seq, asn) if self.is_direct else None
        return _pairwise_ok(vals, self.seq.types, self.transitions, self.is_direct, order)


def seq_no_overlap(seq: SequenceVar, transitions=None, is_direct: bool = False) -> SeqNoOverlap:
    n_types = max(seq.types) + 1
    return SeqNoOverlap(seq, _transition_matrix(transitions, n_types), bool(is_direct))



@dataclass(eq=False)
class SequenceOrder(Constraint):
    kind: str
    seq: SequenceVar
    a: IntervalVar
    b: IntervalVar | None = None

    def references(self):
        yield self.seq
        yield from self.seq.intervals

    def intervals(self):
        return list(self.seq.intervals)

    def guard(self):
        own = [self.a] if self.b is None else [self.a, self.b]
        return [iv for iv in own if iv.optional]

    def holds(self, asn, horizon=0):
        va = _v(asn, self.a)
        if not va.present:
            return True
        others = [_v(asn, x) for x in self.seq.intervals
                  if x is not self.a and x is not self.b and _v(asn, x).present]
        if self.kind == "first":
            return all(va.start <= v.start for v in others)
        if self.kind == "last":
            return all(va.end >= v.end for v in others)
        vb = _v(asn, self.b)
        if not vb.present:
            return True
        if self.kind == "before":
            return va.end <= vb.start
        if va.end > vb.start:
            return False
        return not any(va.end <= v.start and v.end <= vb.start for v in others)


def _sequence_order(kind, seq, a, b=None) -> SequenceOrder:
    if a not in seq or (b is not None and b not in seq):
        raise NotInSequence(f"{kind}: interval not in sequence {seq.id}")
    if b is not None and a is b:
        raise ModelError(f"{kind}: a and b must differ")
    return SequenceOrder(kind, seq, a, b)


def first(seq, a) -> SequenceOrder:
    return _sequence_order("first", seq, a)


def last(seq, a) -> SequenceOrder:
    return _sequence_order("last", seq, a)


def before(seq, a, b) -> SequenceOrder:
    return _sequence_order("before", seq, a, b)


def previous(seq, a, b) -> SequenceOrder:
    return _sequence_order("previous", seq, a, b)


@dataclass(eq=False)
class SameSequence(Constraint):
    kind: str
    seq1: SequenceVar
    seq2: SequenceVar

    def references(self):
        yield self.seq1
        yield self.seq2
        yield from self.intervals()

    def intervals(self):
        return _unique(self.seq1.intervals + self.seq2.intervals)

    def common(self) -> list[IntervalVar]:
        return [x for x in self.seq1.intervals if x in self.seq2]

    def guard(self):
        return []

    def holds(self, asn, horizon=0):
        o1 = sequence_order(self.seq1, asn)
        o2 = sequence_order(self.seq2, asn)
        rank1 = {self.seq1.intervals[p].id: r for r, p in enumerate(o1)}
        rank2 = {self.seq2.intervals[p].id: r for r, p in enumerate(o2)}
        common = [x.id for x in self.common() if x.id in rank1]
        if self.kind == "same_sequence":
            return all(rank1[x] == rank2[x] for x in common)
        return all((rank1[x] < rank1[y]) == (rank2[x] < rank2[y])
                   for i, x in enumerate(common) for y in common[i + 1:])


def _same(kind, seq1, seq2) -> SameSequence:
    rec = SameSequence(kind, seq1, seq2)
    if not rec.common():
        raise NoCommonIntervals(f"{seq1.id} and {seq2.id} share no interval")
    return rec


def same_sequence(seq1, seq2) -> SameSequence:
    return _same("same_sequence", seq1, seq2)


def same_common_subsequence(seq1, seq2) -> SameSequence:
    return _same("same_common_subsequence", seq1, seq2)


# --- cumulative functions ------------------------------------------------


@dataclass(eq=False)
class CumulBound(Constraint):
    """lo <= cumul(t) <= hi for every t of the window.

    ``window`` is None (whole horizon), a fixed (start, end) range or an
    interval whose [start, end) extent is used while it is present.
    """

    kind: str
    cumul: CumulExpr
    window: IntervalVar | tuple[int, int] | None
    lo: int
    hi: int

    def intervals(self):
        ivs = self.cumul.intervals()
        if isinstance(self.window, IntervalVar):
            ivs = ivs + [self.window]
        return _unique(ivs)

    def guard(self):
        if isinstance(self.window, IntervalVar) and self.window.optional:
            return [self.window]
        return []

    def time_points(self, asn, horizon) -> range:
        if self.window is None:
            return range(0, horizon)
        if isinstance(self.window, IntervalVar):
            v = _v(asn, self.window)
            if not v.present:
                return range(0)
            return range(max(0, v.start), min(horizon, v.end))
        a, b = self.window
        return range(max(0, a), min(horizon, b))

    def holds(self, asn, horizon=0):
        for t in self.time_points(asn, horizon):
            if not self.lo <= profile_at(self.cumul, t, asn) <= self.hi:
                return False
        return True


def _cumul_bound(kind, cumul, window, lo, hi) -> CumulBound:
    if lo > hi:
        raise BadBounds(f"{kind}: lo {lo} > hi {hi}")
    if isinstance(window, (tuple, list)):
        window = (int(window[0]), int(window[1]))
        if window[0] > window[1]:
            raise BadBounds(f"{kind}: empty window {window}")
    return CumulBound(kind, cumul, window, int(lo), int(hi))


def cumul_range(cumul: CumulExpr, lo: int, hi: int) -> CumulBound:
    return _cumul_bound("cumul_range", cumul, None, lo, hi)


def always_in(target, window, lo: int, hi: int):
    """Cumulative form ``always_in(cumul, window, lo, hi)`` or state form
    ``always_in(func, interval, lo, hi)``."""
    if isinstance(target, StateFunction):
        return state_always_in(target, window, lo, hi)
    return _cumul_bound("always_in", target, window, lo, hi)


def seq_cumulative(intervals, heights, capacity: int) -> CumulBound:
    """All-in-one capacity constraint: sum of pulses bounded by ``capacity``."""
    from .expr import pulse

    cumul = CumulExpr()
    for iv, h in zip(intervals, heights, strict=True):
        cumul = cumul + pulse(iv, h)
    return cumul_range(cumul, 0, capacity)


# --- state functions -----------------------------------------------------

STATE_KINDS = ("always_equal", "always_in", "always_constant", "always_no_state",
               "requires_state", "sets_state")


@dataclass(eq=False)
class StateConstraint(Constraint):
    kind: str
    func: StateFunction
    interval: IntervalVar
    args: tuple[int, ...] = ()

    def references(self):
        yield self.func
        yield self.interval

    def intervals(self):
        return [self.interval]

    def holds(self, asn, horizon=0):
        v = _v(asn, self.interval)
        if not v.present:
            return True
        tl = asn.states.get(self.func.id, {})
        span_ = range(v.start, v.end)
        if self.kind in ("always_equal", "requires_state"):
            return all(tl.get(t) == self.args[0] for t in span_)
        if self.kind == "always_in":
            lo, hi = self.args
            return all(tl.get(t) is not None and lo <= tl[t] <= hi for t in span_)
        if self.kind == "always_constant":
            return all(tl.get(t) == tl.get(t + 1) for t in range(v.start, v.end - 1))
        if self.kind == "always_no_state":
            return all(tl.get(t) is None for t in span_)
        before_, after_ = self.args
        return tl.get(v.start) == before_ and tl.get(v.end) == after_


def _state(kind, func, interval, *args) -> StateConstraint:
    for a in args:
        if a not in func.state_domain:
            raise StateOutOfDomain(f"{kind}: state {a} outside {func.id}'s domain")
    if kind == "always_in" and args[0] > args[1]:
        raise BadBounds("always_in: min > max")
    return StateConstraint(kind, func, interval, tuple(int(a) for a in args))


def always_equal(func, interval, value: int) -> StateConstraint:
    return _state("always_equal", func, interval, value)


def state_always_in(func, interval, lo: int, hi: int) -> StateConstraint:
    return _state("always_in", func, interval, lo, hi)


def always_constant(func, interval) -> StateConstraint:
    return _state("always_constant", func, interval)


def always_no_state(func, interval) -> StateConstraint:
    return _state("always_no_state", func, interval)


def requires_state(interval, func, state: int) -> StateConstraint:
    return _state("requires_state", func, interval, state)


def sets_state(interval, func, before: int, after: int) -> StateConstraint:
    return _state("sets_state", func, interval, before, after)


# --- forbidden time ------------------------------------------------------


@dataclass(eq=False)
class Forbid(Constraint):
    kind: str  # forbid_start | forbid_end | forbid_extent
    interval: IntervalVar
    periods: tuple[tuple[int, int], ...]

    def intervals(self):
        return [self.interval]

    def holds(self, asn, horizon=0):
        v = _v(asn, self.interval)
        if not v.present:
            return True
        for a, b in self.periods:
            if self.kind == "forbid_start" and a <= v.start < b:
                return False
            if self.kind == "forbid_end" and a < v.end <= b:
                return False
            if self.kind == "forbid_extent" and v.start < b and a < v.end:
                return False
        return True


def _forbid(kind, interval, periods) -> Forbid:
    ps = tuple((int(a), int(b)) for a, b in periods)
    for a, b in ps:
        if a >= b:
            raise BadPeriod(f"{kind}: period ({a}, {b}) is empty")
    return Forbid(kind, interval, ps)


def forbid_start(interval, periods) -> Forbid:
    return _forbid("forbid_start", interval, periods)


def forbid_end(interval, periods) -> Forbid:
    return _forbid("forbid_end", interval, periods)


def forbid_extent(interval, periods) -> Forbid:
    return _forbid("forbid_extent", interval, periods)


# --- presence ------------------------------------------------------------

PRESENCE_KINDS = ("presence_implies", "presence_or", "presence_xor", "all_present_or_all_absent",
                  "presence_or_all", "at_least_k_present", "at_most_k_present",
                  "exactly_k_present")


@dataclass(eq=False)
class PresenceConstraint(Constraint):
    kind: str
    ivs: tuple[IntervalVar, ...]
    k: int = 0

    def intervals(self):
        return _unique(self.ivs)

    def guard(self):
        return []

    def holds(self, asn, horizon=0):
        p = [_v(asn, x).present for x in self.ivs]
        n = sum(p)
        kind = self.kind
        if kind == "presence_implies":
            return (not p[0]) or p[1]
        if kind == "presence_or":
            return p[0] or p[1]
        if kind == "presence_xor":
            return p[0] != p[1]
        if kind == "all_present_or_all_absent":
            return n in (0, len(p))
        if kind == "presence_or_all":
            return n >= 1
        if kind == "at_least_k_present":
            return n >= self.k
        if kind == "at_most_k_present":
            return n <= self.k
        return n == self.k


def presence_implies(a, b):
    return PresenceConstraint("presence_implies", (a, b))


def presence_or(a, b):
    return PresenceConstraint("presence_or", (a, b))


def presence_xor(a, b):
    return PresenceConstraint("presence_xor", (a, b))


def all_present_or_all_absent(intervals):
    return PresenceConstraint("all_present_or_all_absent", _children(intervals))


def presence_or_all(*intervals):
    if len(intervals) == 1 and isinstance(intervals[0], (list, tuple)):
        intervals = tuple(intervals[0])
    return PresenceConstraint("presence_or_all", _children(intervals))


def _k(kind, intervals, k):
    ivs = _children(intervals)
    if not 0 <= k <= len(ivs):
        raise BadK(f"{kind}: k={k} outside [0, {len(ivs)}]")
    return PresenceConstraint(kind, ivs, int(k))


def at_least_k_present(intervals, k: int):
    return _k("at_least_k_present", intervals, k)


def at_most_k_present(intervals, k: int):
    return _k("at_most_k_present", intervals, k)


def exactly_k_present(intervals, k: int):
    return _k("exactly_k_present", intervals, k)


@dataclass(eq=False)
class IfPresentThen(Constraint):
    interval: IntervalVar
    inner: Constraint
    kind = "if_present_then"

    def references(self):
        yield self.interval
        yield from self.inner.references()

    def intervals(self):
        return _unique([self.interval] + self.inner.intervals())

    def guard(self):
        return [self.interval] if self.interval.optional else []

    def holds(self, asn, horizon=0):
        if not _v(asn, self.interval).present:
            return True
        return self.inner.holds(asn, horizon)


def if_present_then(interval, ctr) -> IfPresentThen:
    if isinstance(ctr, BoolExpr):
        ctr = ExprConstraint(ctr)
    if not isinstance(ctr, Constraint):
        raise ModelError("if_present_then takes exactly one constraint record")
    return IfPresentThen(interval, ctr)


# --- overlap and disjunctive --------------------------------------------


@dataclass(eq=False)
class OverlapConstraint(Constraint):
    kind: str
    ivs: tuple[IntervalVar, ...]
    min_overlap: int = 0
    transitions: tuple[tuple[int, ...], ...] | None = None
    types: tuple[int, ...] | None = None

    def intervals(self):
        return _unique(self.ivs)

    def holds(self, asn, horizon=0):
        vals = [_v(asn, x) for x in self.ivs]
        if self.kind in ("must_overlap", "overlap_at_least"):
            va, vb = vals
            if not (va.present and vb.present):
                return True
            if self.kind == "must_overlap":
                return va.start < vb.end and vb.start < va.end
            return min(va.end, vb.end) - max(va.start, vb.start) >= self.min_overlap
        types = self.types or tuple(range(len(self.ivs)))
        return _pairwise_ok(vals, types, self.transitions, False)


def must_overlap(a, b):
    return OverlapConstraint("must_overlap", (a, b))


def overlap_at_least(a, b, min: int):
    if min < 1:
        raise BadMin(f"overlap_at_least needs min >= 1, got {min}")
    return OverlapConstraint("overlap_at_least", (a, b), int(min))


def no_overlap_pairwise(intervals):
    return OverlapConstraint("no_overlap_pairwise", _children(intervals))


def disjunctive(intervals, transition_times=None, types: Sequence[int] | None = None):
    ivs = _children(intervals)
    types = tuple(range(len(ivs))) if types is None else tuple(int(t) for t in types)
    if len(types) != len(ivs):
        raise LengthMismatch("disjunctive: one type per interval")
    matrix = _transition_matrix(transition_times, max(types) + 1)
    return OverlapConstraint("disjunctive", ivs, 0, matrix, types)


# --- chains and bounds ---------------------------------------------------


@dataclass(eq=False)
class Chain(Constraint):
    ivs: tuple[IntervalVar, ...]
    delays: tuple[int, ...]
    strict: bool = False

    @property
    def kind(self):
        return "strict_chain" if self.strict else "chain"

    def intervals(self):
        return _unique(self.ivs)

    def holds(self, asn, horizon=0):
        for (x, y), d in zip(zip(self.ivs, self.ivs[1:]), self.delays):
            vx, vy = _v(asn, x), _v(asn, y)
            if not (vx.present and vy.present):
                continue
            if self.strict and vx.end + d != vy.start:
                return False
            if not self.strict and vx.end + d > vy.start:
                return False
        return True


def _chain(intervals, delays, strict) -> Chain:
    ivs = _children(intervals)
    delays = tuple(int(d) for d in delays) if delays is not None else (0,) * (len(ivs) - 1)
    if len(delays) != len(ivs) - 1:
        raise LengthMismatch(f"{len(delays)} delays for {len(ivs)} intervals")
    return Chain(ivs, delays, strict)


def chain(intervals, delays=None) -> Chain:
    return _chain(intervals, delays, False)


def strict_chain(intervals, delays=None) -> Chain:
    return _chain(intervals, delays, True)


@dataclass(eq=False)
class Bounds(Constraint):
    kind: str  # release_date | deadline | time_window
    interval: IntervalVar
    t1: int
    t2: int | None = None

    def intervals(self):
        return [self.interval]

    def holds(self, asn, horizon=0):
        v = _v(asn, self.interval)
        if not v.present:
            return True
        if self.kind == "release_date":
            return v.start >= self.t1
        if self.kind == "deadline":
            return v.end <= self.t1
        return v.start >= self.t1 and v.end <= self.t2


def release_date(interval, time: int) -> Bounds:
    return Bounds("release_date", interval, int(time))


def deadline(interval, time: int) -> Bounds:
    return Bounds("deadline", interval, int(time))


def time_window(interval, earliest: int, latest: int) -> Bounds:
    if earliest > latest:
        raise BadWindow(f"time_window: {earliest} > {latest}")
    return Bounds("time_window", interval, int(earliest), int(latest))


# --- raw expressions -----------------------------------------------------


@dataclass(eq=False)
class ExprConstraint(Constraint):
    """A Boolean expression over accessors and int vars, posted as-is."""

    expr: BoolExpr
    kind = "expr"

    def references(self):
        return iter(_unique_objects(referenced_objects(self.expr)))

    def intervals(self):
        return [o for o in _unique_objects(referenced_objects(self.expr))
                if isinstance(o, IntervalVar)]

    def guard(self):
        return []

    def holds(self, asn, horizon=0):
        return eval_bool(self.expr, asn)


def _unique_objects(objs) -> list:
    seen: dict[int, object] = {}
    for o in objs:
        seen.setdefault(id(o), o)
    return list(seen.values())


def interval_well_formed(iv: IntervalVar, v: IntervalValue) -> bool:
    """Whether ``v`` respects the interval's own domains and size/length coupling."""
    if not v.present:
        return iv.optional
    if v.start not in iv.start or v.end not in iv.end or v.size not in iv.size:
        return False
    if v.length not in iv.length or v.end != v.start + v.length:
        return False
    if iv.intensity is None:
        return v.length == v.size
    if v.size == 0:
        return v.length == 0
    total = sum(iv.intensity.value(t) for t in range(v.start, v.start + v.length))
    return total == v.size * iv.intensity.granularity


def model_holds(model, asn: Assignment) -> bool:
    """Semantic acceptance of a total assignment by a whole model."""
    for iv in model.intervals:
        if not interval_well_formed(iv, asn.intervals[iv.id]):
            return False
        if iv.size_var is not None and asn.intervals[iv.id].present and \
                asn.intervals[iv.id].size != asn.ints[iv.size_var.id]:
            return False
    for x in model.int_vars:
        if not x.lb <= asn.ints[x.id] <= x.ub:
            return False
    h = model.horizon
    return all(c.holds(asn, h) for c in model.constraints)
