"""Expression trees over interval attributes, plus their direct evaluator.

Scalar and Boolean nodes overload the Python operators, so
``start_of(b) >= end_of(a) + 2`` builds a comparison node rather than a
bool.  ``eval_scalar``/``eval_bool`` evaluate a tree against an
:class:`Assignment` of interval attributes; the compiler never calls them,
which keeps them usable as an independent oracle for compiled models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from .errors import DivisionByZero, IndexOutOfTable, ModelError

if TYPE_CHECKING:
    from .model import IntervalVar, SequenceVar

ACCESSOR_KINDS = ("start", "end", "size", "length", "presence")
NEXT_KINDS = ("next_arg", "start_of_next", "end_of_next", "size_of_next", "length_of_next")
PREV_KINDS = ("prev_arg", "start_of_prev", "end_of_prev", "size_of_prev", "length_of_prev")
SEQ_KINDS = NEXT_KINDS + PREV_KINDS
AGGREGATE_KINDS = ("count_present", "earliest_start", "latest_end", "span_length", "makespan")
ARITH_OPS = ("add", "sub", "mul", "div", "abs", "min", "max")
CMP_OPS = ("lt", "le", "eq", "ne", "ge", "gt")


def trunc_div(a: int, b: int) -> int:
    """Integer division rounding toward zero (the XCSP3 ``div`` convention)."""
    if b == 0:
        raise DivisionByZero("integer division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def as_expr(value) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    if isinstance(value, bool):
        return Const(int(value))
    if isinstance(value, int):
        return Const(value)
    if isinstance(value, BoolExpr):
        return BoolAsInt(value)
    raise TypeError(f"cannot use {value!r} as an integer expression")


def as_bool(value) -> BoolExpr:
    if isinstance(value, BoolExpr):
        return value
    if isinstance(value, bool):
        return BoolConst(value)
    raise TypeError(f"cannot use {value!r} as a Boolean expression")


class ScalarExpr:
    """Base class of integer-valued expression nodes."""

    __slots__ = ()
    __hash__ = object.__hash__

    def children(self) -> tuple:
        return ()

    def __add__(self, other):
        return Arith("add", (self, as_expr(other)))

    def __radd__(self, other):
        return Arith("add", (as_expr(other), self))

    def __sub__(self, other):
        return Arith("sub", (self, as_expr(other)))

    def __rsub__(self, other):
        return Arith("sub", (as_expr(other), self))

    def __mul__(self, other):
        return Arith("mul", (self, as_expr(other)))

    def __rmul__(self, other):
        return Arith("mul", (as_expr(other), self))

    def __floordiv__(self, other):
        other = as_expr(other)
        if isinstance(other, Const) and other.value == 0:
            raise DivisionByZero("constant divisor 0")
        return Arith("div", (self, other))

    def __rfloordiv__(self, other):
        if isinstance(self, Const) and self.value == 0:
            raise DivisionByZero("constant divisor 0")
        return Arith("div", (as_expr(other), self))

    def __neg__(self):
        return Arith("sub", (Const(0), self))

    def __abs__(self):
        return Arith("abs", (self,))

    def __lt__(self, other):
        return Cmp("lt", self, as_expr(other))

    def __le__(self, other):
        return Cmp("le", self, as_expr(other))

    def __gt__(self, other):
        return Cmp("gt", self, as_expr(other))

    def __ge__(self, other):
        return Cmp("ge", self, as_expr(other))

    def __eq__(self, other):  # type: ignore[override]
        return Cmp("eq", self, as_expr(other))

    def __ne__(self, other):  # type: ignore[override]
        return Cmp("ne", self, as_expr(other))

    def __bool__(self):
        raise TypeError("expressions have no truth value; post them as constraints")


class Const(ScalarExpr):
    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = int(value)

    def __repr__(self):
        return f"Const({self.value})"


class IntVar(ScalarExpr):
    """Plain integer decision variable, usable beside interval accessors."""

    __slots__ = ("id", "lb", "ub")

    def __init__(self, id: str, lb: int, ub: int):
        if lb > ub:
            from .errors import EmptyDomain

            raise EmptyDomain(f"int var {id}: {lb} > {ub}")
        self.id = id
        self.lb = int(lb)
        self.ub = int(ub)

    def __repr__(self):
        return f"IntVar({self.id!r}, {self.lb}, {self.ub})"


class Accessor(ScalarExpr):
    __slots__ = ("kind", "interval", "absent_value")

    def __init__(self, kind: str, interval: IntervalVar, absent_value: int = 0):
        if kind not in ACCESSOR_KINDS:
            raise ValueError(f"unknown accessor {kind!r}")
        self.kind = kind
        self.interval = interval
        self.absent_value = int(absent_value)

    def __repr__(self):
        return f"{self.kind}_of({self.interval.id})"


class SeqAccessor(ScalarExpr):
    __slots__ = ("kind", "seq", "interval", "boundary_value", "absent_value")

    def __init__(self, kind, seq, interval, boundary_value, absent_value):
        if kind not in SEQ_KINDS:
            raise ValueError(f"unknown sequence accessor {kind!r}")
        self.kind = kind
        self.seq = seq
        self.interval = interval
        self.boundary_value = int(boundary_value)
        self.absent_value = int(absent_value)

    def __repr__(self):
        return f"{self.kind}({self.seq.id}, {self.interval.id})"


class Arith(ScalarExpr):
    __slots__ = ("op", "args")

    def __init__(self, op: str, args: Sequence[ScalarExpr]):
        if op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {op!r}")
        if op == "div" and isinstance(args[1], Const) and args[1].value == 0:
            raise DivisionByZero("constant divisor 0")
        self.op = op
        self.args = tuple(args)

    def children(self):
        return self.args

    def __repr__(self):
        return f"{self.op}({', '.join(map(repr, self.args))})"


class Element(ScalarExpr):
    __slots__ = ("array", "index")

    def __init__(self, array: ElementArray, index: ScalarExpr):
        self.array = array
        self.index = as_expr(index)

    def children(self):
        return (self.index,)


class Element2D(ScalarExpr):
    __slots__ = ("matrix", "row", "col")

    def __init__(self, matrix: ElementMatrix, row: ScalarExpr, col: ScalarExpr):
        self.matrix = matrix
        self.row = as_expr(row)
        self.col = as_expr(col)

    def children(self):
        return (self.row, self.col)


class Aggregate(ScalarExpr):
    """count_present / earliest_start / latest_end / span_length / makespan.

    ``empty_value`` is returned when no listed interval is present.
    """

    __slots__ = ("kind", "intervals", "empty_value")

    def __init__(self, kind: str, intervals: Sequence[IntervalVar], empty_value: int = 0):
        if kind not in AGGREGATE_KINDS:
            raise ValueError(f"unknown aggregate {kind!r}")
        if not intervals:
            raise ModelError(f"{kind} needs at least one interval")
        self.kind = kind
        self.intervals = tuple(intervals)
        self.empty_value = int(empty_value)


class CumulHeight(ScalarExpr):
    """Profile value of a cumulative expression at the start or end of an interval."""

    __slots__ = ("kind", "interval", "cumul", "absent_value")

    def __init__(self, kind: str, interval: IntervalVar, cumul: CumulExpr, absent_value: int = 0):
        if kind not in ("height_at_start", "height_at_end"):
            raise ValueError(f"unknown height expression {kind!r}")
        self.kind = kind
        self.interval = interval
        self.cumul = cumul
        self.absent_value = int(absent_value)


class BoolAsInt(ScalarExpr):
    """A Boolean expression used as a 0/1 integer."""

    __slots__ = ("expr",)

    def __init__(self, expr: BoolExpr):
        self.expr = expr

    def children(self):
        return (self.expr,)


# --- Boolean nodes -------------------------------------------------------


class BoolExpr:
    __slots__ = ()
    __hash__ = object.__hash__

    def children(self) -> tuple:
        return ()

    def __and__(self, other):
        return And((self, as_bool(other)))

    def __rand__(self, other):
        return And((as_bool(other), self))

    def __or__(self, other):
        return Or((self, as_bool(other)))

    def __ror__(self, other):
        return Or((as_bool(other), self))

    def __xor__(self, other):
        return Xor((self, as_bool(other)))

    def __invert__(self):
        return Not(self)

    def __bool__(self):
        raise TypeError("expressions have no truth value; post them as constraints")


class BoolConst(BoolExpr):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)


class Cmp(BoolExpr):
    __slots__ = ("op", "lhs", "rhs")

    def __init__(self, op: str, lhs: ScalarExpr, rhs: ScalarExpr):
        if op not in CMP_OPS:
            raise ValueError(f"unknown comparison {op!r}")
        self.op = op
        self.lhs = as_expr(lhs)
        self.rhs = as_expr(rhs)

    def children(self):
        return (self.lhs, self.rhs)

    def __repr__(self):
        return f"{self.op}({self.lhs!r}, {self.rhs!r})"


class And(BoolExpr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[BoolExpr]):
        self.args = tuple(as_bool(a) for a in args)

    def children(self):
        return self.args


class Or(BoolExpr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[BoolExpr]):
        self.args = tuple(as_bool(a) for a in args)

    def children(self):
        return self.args


class Xor(BoolExpr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[BoolExpr]):
        self.args = tuple(as_bool(a) for a in args)

    def children(self):
        return self.args


class Not(BoolExpr):
    __slots__ = ("arg",)

    def __init__(self, arg: BoolExpr):
        self.arg = as_bool(arg)

    def children(self):
        return (self.arg,)


class PresenceLit(BoolExpr):
    __slots__ = ("interval",)

    def __init__(self, interval: IntervalVar):
        self.interval = interval


# --- element tables ------------------------------------------------------


class ElementArray:
    """Constant 1-D table indexable by an expression.

    Index ``len(data)`` is the boundary sentinel and ``len(data) + 1`` the
    absent sentinel; each is only valid when its value was supplied.
    """

    def __init__(self, data: Sequence[int], boundary_value: int | None = None,
                 absent_value: int | None = None):
        self.data = tuple(int(v) for v in data)
        if not self.data:
            raise ModelError("ElementArray needs at least one entry")
        self.boundary_value = boundary_value
        self.absent_value = absent_value

    def __len__(self):
        return len(self.data)

    def __getitem__(self, index) -> Element:
        return Element(self, as_expr(index))

    def extended(self) -> tuple[int, ...]:
        """Data with the sentinel slots appended, as far as they are defined."""
        out = list(self.data)
        if self.boundary_value is not None or self.absent_value is not None:
            out.append(self.boundary_value if self.boundary_value is not None
                       else self.absent_value)
        if self.absent_value is not None:
            out.append(self.absent_value)
        return tuple(out)

    def valid_indices(self) -> list[int]:
        idx = list(range(len(self.data)))
        if self.boundary_value is not None:
            idx.append(len(self.data))
        if self.absent_value is not None:
            idx.append(len(self.data) + 1)
        return idx

    def lookup(self, i: int) -> int:
        n = len(self.data)
        if 0 <= i < n:
            return self.data[i]
        if i == n and self.boundary_value is not None:
            return self.boundary_value
        if i == n + 1 and self.absent_value is not None:
            return self.absent_value
        raise IndexOutOfTable(f"index {i} outside array of length {n}")


class ElementMatrix:
    """Constant rectangular table; rows and columns share the sentinel rules
    of :class:`ElementArray` (absent wins over boundary)."""

    def __init__(self, data: Sequence[Sequence[int]], boundary_value: int | None = None,
                 absent_value: int | None = None):
        rows = [tuple(int(v) for v in row) for row in data]
        if not rows or not rows[0]:
            raise ModelError("ElementMatrix needs at least one cell")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ModelError("ElementMatrix rows must all have the same length")
        self.data = tuple(rows)
        self.boundary_value = boundary_value
        self.absent_value = absent_value

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.data), len(self.data[0])

    def __getitem__(self, key) -> Element2D:
        row, col = key
        return Element2D(self, as_expr(row), as_expr(col))

    def _axis_indices(self, n: int) -> list[int]:
        idx = list(range(n))
        if self.boundary_value is not None:
            idx.append(n)
        if self.absent_value is not None:
            idx.append(n + 1)
        return idx

    def valid_rows(self) -> list[int]:
        return self._axis_indices(self.shape[0])

    def valid_cols(self) -> list[int]:
        return self._axis_indices(self.shape[1])

    def lookup(self, i: int, j: int) -> int:
        nr, nc = self.shape
        if i not in self.valid_rows() or j not in self.valid_cols():
            raise IndexOutOfTable(f"index ({i}, {j}) outside {nr}x{nc} matrix")
        if i == nr + 1 or j == nc + 1:
            return self.absent_value  # type: ignore[return-value]
        if i == nr or j == nc:
            return self.boundary_value  # type: ignore[return-value]
        return self.data[i][j]


def element(array, index) -> Element:
    if not isinstance(array, ElementArray):
        array = ElementArray(array)
    return Element(array, as_expr(index))


def element2d(matrix, row, col) -> Element2D:
    if not isinstance(matrix, ElementMatrix):
        matrix = ElementMatrix(matrix)
    return Element2D(matrix, as_expr(row), as_expr(col))


# --- cumulative functions ------------------------------------------------


@dataclass(frozen=True)
class Pulse:
    interval: IntervalVar
    height: int


@dataclass(frozen=True)
class StepAt:
    time: int
    height: int


@dataclass(frozen=True)
class StepAtStart:
    interval: IntervalVar
    height: int


@dataclass(frozen=True)
class StepAtEnd:
    interval: IntervalVar
    height: int


CumulTerm = Pulse | StepAt | StepAtStart | StepAtEnd


class CumulExpr:
    """Sum of pulse and step terms; ``cumul <= cap`` posts a capacity bound."""

    __hash__ = object.__hash__

    def __init__(self, terms: Iterable[CumulTerm] = ()):
        self.terms: tuple[CumulTerm, ...] = tuple(terms)
        for t in self.terms:
            if isinstance(t, Pulse) and t.height < 0:
                raise ModelError("pulse heights must be non-negative")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, CumulExpr):
            return NotImplemented
        return CumulExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        out = []
        for t in self.terms:
            if isinstance(t, Pulse):
                raise ModelError("cannot negate a pulse")
            out.append(type(t)(*(_fields(t)[:-1]), -t.height))
        return CumulExpr(out)

    def __sub__(self, other):
        return self + (-other)

    def min_possible(self) -> int:
        return sum(min(0, t.height) for t in self.terms if not isinstance(t, Pulse))

    def max_possible(self) -> int:
        return sum(max(0, t.height) for t in self.terms)

    def intervals(self) -> list[IntervalVar]:
        seen: dict[int, IntervalVar] = {}
        for t in self.terms:
            iv = getattr(t, "interval", None)
            if iv is not None:
                seen.setdefault(id(iv), iv)
        return list(seen.values())

    def __le__(self, cap):
        from .constraints import cumul_range

        return cumul_range(self, self.min_possible(), int(cap))

    def __ge__(self, floor):
        from .constraints import cumul_range

        return cumul_range(self, int(floor), max(int(floor), self.max_possible()))

    def within(self, lo: int, hi: int):
        from .constraints import cumul_range

        return cumul_range(self, lo, hi)


def _fields(t) -> tuple:
    return tuple(getattr(t, f) for f in t.__dataclass_fields__)


def pulse(interval: IntervalVar, height: int) -> CumulExpr:
    return CumulExpr([Pulse(interval, int(height))])


def step_at(time: int, height: int) -> CumulExpr:
    return CumulExpr([StepAt(int(time), int(height))])


def step_at_start(interval: IntervalVar, height: int) -> CumulExpr:
    return CumulExpr([StepAtStart(interval, int(height))])


def step_at_end(interval: IntervalVar, height: int) -> CumulExpr:
    return CumulExpr([StepAtEnd(interval, int(height))])


# --- accessor factories --------------------------------------------------


def start_of(interval, absent_value: int = 0) -> Accessor:
    return Accessor("start", interval, absent_value)


def end_of(interval, absent_value: int = 0) -> Accessor:
    return Accessor("end", interval, absent_value)


def size_of(interval, absent_value: int = 0) -> Accessor:
    return Accessor("size", interval, absent_value)


def length_of(interval, absent_value: int = 0) -> Accessor:
    return Accessor("length", interval, absent_value)


def presence_of(interval) -> Accessor:
    return Accessor("presence", interval, 0)


def overlap_length(a, b) -> ScalarExpr:
    """max(0, min(e(a), e(b)) - max(s(a), s(b))); 0 when either is absent."""
    both = And((PresenceLit(a), PresenceLit(b)))
    raw = Arith("max", (Const(0), Arith("sub", (
        Arith("min", (end_of(a), end_of(b))),
        Arith("max", (start_of(a), start_of(b)))))))
    return Arith("mul", (BoolAsInt(both), raw))


def expr_min(*args) -> Arith:
    return Arith("min", tuple(as_expr(a) for a in args))


def expr_max(*args) -> Arith:
    return Arith("max", tuple(as_expr(a) for a in args))


def _seq_defaults(kind: str, seq) -> tuple[int, int]:
    if kind in ("next_arg", "prev_arg"):
        top = max(seq.types) + 1
        return top, top + 1
    return 0, 0


def _seq_factory(kind):
    def make(seq, interval, boundary_value=None, absent_value=None):
        bv, av = _seq_defaults(kind, seq)
        return SeqAccessor(kind, seq, interval,
                           bv if boundary_value is None else boundary_value,
                           av if absent_value is None else absent_value)

    make.__name__ = kind
    return make


next_arg = _seq_factory("next_arg")
start_of_next = _seq_factory("start_of_next")
end_of_next = _seq_factory("end_of_next")
size_of_next = _seq_factory("size_of_next")
length_of_next = _seq_factory("length_of_next")
prev_arg = _seq_factory("prev_arg")
start_of_prev = _seq_factory("start_of_prev")
end_of_prev = _seq_factory("end_of_prev")
size_of_prev = _seq_factory("size_of_prev")
length_of_prev = _seq_factory("length_of_prev")


def count_present(intervals) -> Aggregate:
    return Aggregate("count_present", list(intervals))


def earliest_start(intervals, empty_value: int = 0) -> Aggregate:
    return Aggregate("earliest_start", list(intervals), empty_value)


def latest_end(intervals, empty_value: int = 0) -> Aggregate:
    return Aggregate("latest_end", list(intervals), empty_value)


def span_length(intervals, empty_value: int = 0) -> Aggregate:
    return Aggregate("span_length", list(intervals), empty_value)


def makespan(intervals, empty_value: int = 0) -> Aggregate:
    return Aggregate("makespan", list(intervals), empty_value)


def height_at_start(interval, cumul: CumulExpr, absent_value: int = 0) -> CumulHeight:
    return CumulHeight("height_at_start", interval, cumul, absent_value)


def height_at_end(interval, cumul: CumulExpr, absent_value: int = 0) -> CumulHeight:
    return CumulHeight("height_at_end", interval, cumul, absent_value)


# --- assignments and evaluation -----------------------------------------


@dataclass(frozen=True)
class IntervalValue:
    present: bool
    start: int = 0
    end: int = 0
    size: int = 0
    length: int = 0

    def attr(self, kind: str) -> int:
        if kind == "presence":
            return int(self.present)
        return getattr(self, kind)


@dataclass
class Assignment:
    """Total assignment of interval attributes, int vars and state timelines.

    The order of a sequence is induced by the values: present members sorted
    by (start, end, position in the sequence).
    """

    intervals: dict[str, IntervalValue]
    ints: dict[str, int] = field(default_factory=dict)
    states: dict[str, dict[int, int | None]] = field(default_factory=dict)

    def __getitem__(self, interval) -> IntervalValue:
        return self.intervals[interval.id]


def sequence_order(seq: SequenceVar, asn: Assignment) -> list[int]:
    """Positions (in ``seq.intervals``) of present members, in sequence order."""
    keyed = []
    for pos, iv in enumerate(seq.intervals):
        v = asn.intervals[iv.id]
        if v.present:
            keyed.append((v.start, v.end, pos))
    keyed.sort()
    return [k[2] for k in keyed]


def profile_at(cumul: CumulExpr, t: int, asn: Assignment) -> int:
    total = 0
    for term in cumul.terms:
        if isinstance(term, Pulse):
            v = asn.intervals[term.interval.id]
            if v.present and v.start <= t < v.end:
                total += term.height
        elif isinstance(term, StepAt):
            if term.time <= t:
                total += term.height
        else:
            v = asn.intervals[term.interval.id]
            when = v.start if isinstance(term, StepAtStart) else v.end
            if v.present and when <= t:
                total += term.height
    return total


def _seq_value(node: SeqAccessor, asn: Assignment) -> int:
    seq = node.seq
    pos = seq.position(node.interval)
    me = asn.intervals[node.interval.id]
    if not me.present:
        return node.absent_value
    order = sequence_order(seq, asn)
    rank = order.index(pos)
    forward = node.kind in NEXT_KINDS
    other_rank = rank + 1 if forward else rank - 1
    if not 0 <= other_rank < len(order):
        return node.boundary_value
    other_pos = order[other_rank]
    if node.kind in ("next_arg", "prev_arg"):
        return seq.types[other_pos]
    attr = node.kind.split("_of_")[0]
    return asn.intervals[seq.intervals[other_pos].id].attr(attr)


def eval_scalar(expr, asn: Assignment) -> int:
    """Evaluate a scalar expression tree directly against ``asn``."""
    expr = as_expr(expr)
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, IntVar):
        return asn.ints[expr.id]
    if isinstance(expr, Accessor):
        v = asn.intervals[expr.interval.id]
        if expr.kind == "presence":
            return int(v.present)
        return v.attr(expr.kind) if v.present else expr.absent_value
    if isinstance(expr, SeqAccessor):
        return _seq_value(expr, asn)
    if isinstance(expr, Arith):
        vals = [eval_scalar(a, asn) for a in expr.args]
        op = expr.op
        if op == "add":
            return sum(vals)
        if op == "sub":
            return vals[0] - vals[1]
        if op == "mul":
            out = 1
            for x in vals:
                out *= x
            return out
        if op == "div":
            return trunc_div(vals[0], vals[1])
        if op == "abs":
            return abs(vals[0])
        if op == "min":
            return min(vals)
        return max(vals)
    if isinstance(expr, Element):
        return expr.array.lookup(eval_scalar(expr.index, asn))
    if isinstance(expr, Element2D):
        return expr.matrix.lookup(eval_scalar(expr.row, asn), eval_scalar(expr.col, asn))
    if isinstance(expr, Aggregate):
        vals = [asn.intervals[iv.id] for iv in expr.intervals]
        present = [v for v in vals if v.present]
        if expr.kind == "count_present":
            return len(present)
        if not present:
            return expr.empty_value
        if expr.kind == "earliest_start":
            return min(v.start for v in present)
        if expr.kind in ("latest_end", "makespan"):
            return max(v.end for v in present)
        return max(v.end for v in present) - min(v.start for v in present)
    if isinstance(expr, CumulHeight):
        v = asn.intervals[expr.interval.id]
        if not v.present:
            return expr.absent_value
        t = v.start if expr.kind == "height_at_start" else v.end
        return profile_at(expr.cumul, t, asn)
    if isinstance(expr, BoolAsInt):
        return int(eval_bool(expr.expr, asn))
    raise TypeError(f"not a scalar expression: {expr!r}")


_CMP = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "ge": lambda a, b: a >= b,
    "gt": lambda a, b: a > b,
}


def eval_bool(expr: BoolExpr, asn: Assignment) -> bool:
    if isinstance(expr, BoolConst):
        return expr.value
    if isinstance(expr, Cmp):
        return _CMP[expr.op](eval_scalar(expr.lhs, asn), eval_scalar(expr.rhs, asn))
    if isinstance(expr, And):
        return all(eval_bool(a, asn) for a in expr.args)
    if isinstance(expr, Or):
        return any(eval_bool(a, asn) for a in expr.args)
    if isinstance(expr, Xor):
        return sum(eval_bool(a, asn) for a in expr.args) % 2 == 1
    if isinstance(expr, Not):
        return not eval_bool(expr.arg, asn)
    if isinstance(expr, PresenceLit):
        return asn.intervals[expr.interval.id].present
    raise TypeError(f"not a Boolean expression: {expr!r}")


def walk(node) -> Iterator:
    """Pre-order traversal over scalar and Boolean nodes."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, (Element,)):
            stack.append(n.index)
        elif isinstance(n, Element2D):
            stack.extend((n.col, n.row))
        else:
            stack.extend(reversed(n.children()))


def referenced_objects(node) -> Iterator:
    """Yield every interval, sequence and int var a tree mentions."""
    for n in walk(node):
        if isinstance(n, IntVar):
            yield n
        elif isinstance(n, (Accessor, PresenceLit)):
            yield n.interval
        elif isinstance(n, SeqAccessor):
            yield n.seq
            yield n.interval
        elif isinstance(n, Aggregate):
            yield from n.intervals
        elif isinstance(n, CumulHeight):
            yield n.interval
            yield from n.cumul.intervals()
