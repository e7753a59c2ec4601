"""Flat integer-CSP target: variables, the classical XCSP3 constraint
fragment, models, solutions and the direct checker."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import PartialAssignment
from .expr import trunc_div


class Domain:
    """Finite integer set stored as sorted, disjoint, non-adjacent ranges."""

    __slots__ = ("ranges",)

    def __init__(self, ranges: Iterable[tuple[int, int]]):
        merged: list[list[int]] = []
        for lo, hi in sorted((int(a), int(b)) for a, b in ranges):
            if lo > hi:
                continue
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        if not merged:
            raise ValueError("empty domain")
        self.ranges = tuple((a, b) for a, b in merged)

    @classmethod
    def range(cls, lo: int, hi: int) -> Domain:
        return cls([(lo, hi)])

    @classmethod
    def of_values(cls, values: Iterable[int]) -> Domain:
        return cls([(v, v) for v in values])

    @property
    def lb(self) -> int:
        return self.ranges[0][0]

    @property
    def ub(self) -> int:
        return self.ranges[-1][1]

    def __len__(self) -> int:
        return sum(b - a + 1 for a, b in self.ranges)

    def __iter__(self):
        for a, b in self.ranges:
            yield from range(a, b + 1)

    def values(self) -> list[int]:
        return list(self)

    def __contains__(self, v: int) -> bool:
        return any(a <= v <= b for a, b in self.ranges)

    def __eq__(self, other):
        return isinstance(other, Domain) and self.ranges == other.ranges

    def __hash__(self):
        return hash(self.ranges)

    def __repr__(self):
        return f"Domain({self.to_text()})"

    def to_text(self) -> str:
        parts = []
        for a, b in self.ranges:
            parts.append(str(a) if a == b else f"{a}..{b}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> Domain:
        out = []
        for tok in text.split():
            if ".." in tok:
                a, b = tok.split("..")
                out.append((int(a), int(b)))
            else:
                out.append((int(tok), int(tok)))
        return cls(out)


@dataclass(frozen=True)
class FlatVar:
    id: str
    domain: Domain
    boolean: bool = False


# --- intension expressions ----------------------------------------------


@dataclass(frozen=True, slots=True)
class FVar:
    name: str


@dataclass(frozen=True, slots=True)
class FConst:
    value: int


@dataclass(frozen=True, slots=True)
class FOp:
    op: str
    args: tuple


FExpr = Union[FVar, FConst, FOp]

OPS = ("eq", "ne", "lt", "le", "gt", "ge", "add", "sub", "mul", "div", "abs", "min", "max",
       "and", "or", "xor", "not")
BOOL_OPS = {"eq", "ne", "lt", "le", "gt", "ge", "and", "or", "xor", "not"}


def op(name: str, *args) -> FOp:
    if name not in OPS:
        raise ValueError(f"unknown operator {name!r}")
    return FOp(name, tuple(_lift(a) for a in args))


def _lift(a) -> FExpr:
    if isinstance(a, (FVar, FConst, FOp)):
        return a
    if isinstance(a, bool):
        return FConst(int(a))
    if isinstance(a, int):
        return FConst(a)
    if isinstance(a, str):
        return FVar(a)
    raise TypeError(f"cannot lift {a!r} into a flat expression")


def evaluate(e: FExpr, asn: Mapping[str, int]) -> int:
    if isinstance(e, FConst):
        return e.value
    if isinstance(e, FVar):
        return asn[e.name]
    vals = [evaluate(a, asn) for a in e.args]
    o = e.op
    if o == "add":
        return sum(vals)
    if o == "sub":
        return vals[0] - vals[1]
    if o == "mul":
        out = 1
        for v in vals:
            out *= v
        return out
    if o == "div":
        return trunc_div(vals[0], vals[1])
    if o == "abs":
        return abs(vals[0])
    if o == "min":
        return min(vals)
    if o == "max":
        return max(vals)
    if o == "eq":
        return int(all(v == vals[0] for v in vals[1:]))
    if o == "ne":
        return int(vals[0] != vals[1])
    if o == "lt":
        return int(vals[0] < vals[1])
    if o == "le":
        return int(vals[0] <= vals[1])
    if o == "gt":
        return int(vals[0] > vals[1])
    if o == "ge":
        return int(vals[0] >= vals[1])
    if o == "and":
        return int(all(vals))
    if o == "or":
        return int(any(vals))
    if o == "xor":
        return sum(1 for v in vals if v) % 2
    if o == "not":
        return int(not vals[0])
    raise ValueError(f"unknown operator {o!r}")


def expr_vars(e: FExpr, out: dict | None = None) -> list[str]:
    """Variable names in first-occurrence order."""
    if out is None:
        out = {}
    if isinstance(e, FVar):
        out.setdefault(e.name, None)
    elif isinstance(e, FOp):
        for a in e.args:
            expr_vars(a, out)
    return list(out)


# --- constraints ---------------------------------------------------------

Term = Union[str, int]  # variable name or constant


def term_value(t: Term, asn: Mapping[str, int]) -> int:
    return asn[t] if isinstance(t, str) else t


@dataclass(frozen=True)
class Intension:
    expr: FExpr

    def scope(self) -> list[str]:
        return expr_vars(self.expr)


@dataclass(frozen=True)
class Extension:
    vars: tuple[str, ...]
    tuples: tuple[tuple[int, ...], ...]
    positive: bool = True

    def scope(self) -> list[str]:
        return list(dict.fromkeys(self.vars))


@dataclass(frozen=True)
class NoOverlap:
    origins: tuple[Term, ...]
    lengths: tuple[Term, ...]

    def scope(self) -> list[str]:
        return list(dict.fromkeys(t for t in self.origins + self.lengths if isinstance(t, str)))


@dataclass(frozen=True)
class Cumulative:
    origins: tuple[Term, ...]
    lengths: tuple[Term, ...]
    heights: tuple[Term, ...]
    cap: int

    def scope(self) -> list[str]:
        ts = self.origins + self.lengths + self.heights
        return list(dict.fromkeys(t for t in ts if isinstance(t, str)))


@dataclass(frozen=True)
class ElementCtr:
    """value = table[i] (1-D) or table[i][j] (2-D, ``index`` has two terms)."""

    table: tuple
    index: tuple[Term, ...]
    value: Term

    @property
    def two_d(self) -> bool:
        return len(self.index) == 2

    def scope(self) -> list[str]:
        return list(dict.fromkeys(t for t in self.index + (self.value,) if isinstance(t, str)))

    def lookup(self, idx: tuple[int, ...]) -> int | None:
        row = self.table
        for i in idx:
            if not 0 <= i < len(row):
                return None
            row = row[i]
        return row


FlatConstraint = Union[Intension, Extension, NoOverlap, Cumulative, ElementCtr]


def holds(c: FlatConstraint, asn: Mapping[str, int]) -> bool:
    if isinstance(c, Intension):
        return bool(evaluate(c.expr, asn))
    if isinstance(c, Extension):
        tup = tuple(asn[v] for v in c.vars)
        return (tup in set(c.tuples)) == c.positive
    if isinstance(c, NoOverlap):
        # zero-length tasks are ignored, as with XCSP3's default zeroIgnored
        tasks = [(term_value(o, asn), term_value(l, asn)) for o, l in zip(c.origins, c.lengths)]
        tasks = [t for t in tasks if t[1] > 0]
        for i, (oi, li) in enumerate(tasks):
            for oj, lj in tasks[i + 1:]:
                if not (oi + li <= oj or oj + lj <= oi):
                    return False
        return True
    if isinstance(c, Cumulative):
        events: dict[int, int] = {}
        for o, l, h in zip(c.origins, c.lengths, c.heights):
            o, l, h = term_value(o, asn), term_value(l, asn), term_value(h, asn)
            if l <= 0 or h == 0:
                continue
            events[o] = events.get(o, 0) + h
            events[o + l] = events.get(o + l, 0) - h
        level = 0
        for t in sorted(events):
            level += events[t]
            if level > c.cap:
                return False
        return True
    if isinstance(c, ElementCtr):
        idx = tuple(term_value(t, asn) for t in c.index)
        got = c.lookup(idx)
        return got is not None and got == term_value(c.value, asn)
    raise TypeError(f"unknown flat constraint {c!r}")


@dataclass(frozen=True)
class FlatObjective:
    sense: str  # "minimize" | "maximize"
    var: str


@dataclass
class FlatModel:
    """Ordered variables, ordered constraints and an optional objective.

    ``layout`` records how scheduling objects map onto flat variables; it is
    decoding metadata only and is not part of the emitted document.
    """

    vars: dict[str, FlatVar] = field(default_factory=dict)
    constraints: list[FlatConstraint] = field(default_factory=list)
    objective: FlatObjective | None = None
    layout: dict = field(default_factory=dict)

    def add_var(self, name: str, domain: Domain, boolean: bool = False) -> str:
        if name in self.vars:
            raise ValueError(f"flat variable {name!r} declared twice")
        # the tag follows the domain: a {0,1} variable is Boolean
        is01 = domain.ranges == ((0, 1),)
        if boolean and (domain.lb < 0 or domain.ub > 1):
            raise ValueError(f"Boolean variable {name!r} needs a domain within 0..1")
        self.vars[name] = FlatVar(name, domain, is01)
        return name

    def post(self, c: FlatConstraint) -> None:
        self.constraints.append(c)

    def counts(self) -> dict[str, int]:
        return {"vars": len(self.vars), "constraints": len(self.constraints)}

    def search_space(self) -> int:
        n = 1
        for v in self.vars.values():
            n *= len(v.domain)
        return n


class Status(str, enum.Enum):
    OPTIMUM = "OPTIMUM"
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


@dataclass
class Solution:
    status: Status
    assignment: dict[str, int] | None = None
    objective_value: int | None = None
    decoded: dict | None = None
    nodes: int = 0
    millis: int = 0

    @property
    def has_assignment(self) -> bool:
        return self.assignment is not None


def check(model: FlatModel, asn: Mapping[str, int]) -> bool:
    """True iff ``asn`` is total, within domains and satisfies every constraint."""
    missing = [v for v in model.vars if v not in asn]
    if missing:
        raise PartialAssignment(f"unassigned variables: {', '.join(missing[:5])}")
    for name, var in model.vars.items():
        if asn[name] not in var.domain:
            return False
    return all(holds(c, asn) for c in model.constraints)


# --- folding builders ----------------------------------------------------


def is_const(e: FExpr, value: int | None = None) -> bool:
    return isinstance(e, FConst) and (value is None or e.value == value)


def f_add(*args) -> FExpr:
    const = 0
    rest = []
    for a in map(_lift, args):
        if isinstance(a, FConst):
            const += a.value
        elif isinstance(a, FOp) and a.op == "add":
            rest.extend(a.args)
        else:
            rest.append(a)
    if const:
        rest.append(FConst(const))
    if not rest:
        return FConst(0)
    if len(rest) == 1:
        return rest[0]
    return FOp("add", tuple(rest))


def f_sub(a, b) -> FExpr:
    a, b = _lift(a), _lift(b)
    if isinstance(a, FConst) and isinstance(b, FConst):
        return FConst(a.value - b.value)
    if is_const(b, 0):
        return a
    return FOp("sub", (a, b))


def f_mul(*args) -> FExpr:
    const = 1
    rest = []
    for a in map(_lift, args):
        if isinstance(a, FConst):
            const *= a.value
        else:
            rest.append(a)
    if const == 0 or not rest:
        return FConst(const)
    if const != 1:
        rest.insert(0, FConst(const))
    if len(rest) == 1:
        return rest[0]
    return FOp("mul", tuple(rest))


def f_minmax(name: str, *args) -> FExpr:
    args = [_lift(a) for a in args]
    consts = [a.value for a in args if isinstance(a, FConst)]
    rest = [a for a in args if not isinstance(a, FConst)]
    if consts:
        rest.append(FConst(min(consts) if name == "min" else max(consts)))
    if len(rest) == 1:
        return rest[0]
    return FOp(name, tuple(rest))


_FOLD_CMP = {
    "eq": lambda a, b: a == b, "ne": lambda a, b: a != b, "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b, "gt": lambda a, b: a > b, "ge": lambda a, b: a >= b,
}


def f_cmp(name: str, a, b) -> FExpr:
    a, b = _lift(a), _lift(b)
    if isinstance(a, FConst) and isinstance(b, FConst):
        return FConst(int(_FOLD_CMP[name](a.value, b.value)))
    return FOp(name, (a, b))


def f_and(*args) -> FExpr:
    rest = []
    for a in map(_lift, args):
        if isinstance(a, FConst):
            if a.value == 0:
                return FConst(0)
            continue
        if isinstance(a, FOp) and a.op == "and":
            rest.extend(a.args)
        else:
            rest.append(a)
    if not rest:
        return FConst(1)
    if len(rest) == 1:
        return rest[0]
    return FOp("and", tuple(rest))


def f_or(*args) -> FExpr:
    rest = []
    for a in map(_lift, args):
        if isinstance(a, FConst):
            if a.value != 0:
                return FConst(1)
            continue
        if isinstance(a, FOp) and a.op == "or":
            rest.extend(a.args)
        else:
            rest.append(a)
    if not rest:
        return FConst(0)
    if len(rest) == 1:
        return rest[0]
    return FOp("or", tuple(rest))


def f_not(a) -> FExpr:
    a = _lift(a)
    if isinstance(a, FConst):
        return FConst(int(not a.value))
    negated = {"eq": "ne", "ne": "eq", "lt": "ge", "ge": "lt", "le": "gt", "gt": "le"}
    if isinstance(a, FOp) and a.op in negated:
        return FOp(negated[a.op], a.args)
    if isinstance(a, FOp) and a.op == "not":
        return a.args[0]
    return FOp("not", (a,))


def f_xor(*args) -> FExpr:
    parity = 0
    rest = []
    for a in map(_lift, args):
        if isinstance(a, FConst):
            parity ^= int(bool(a.value))
        else:
            rest.append(a)
    if not rest:
        return FConst(parity)
    if parity:
        rest.append(FConst(1))
    if len(rest) == 1:
        return rest[0]
    return FOp("xor", tuple(rest))


def f_bool(e) -> FExpr:
    """0/1 flag usable as a predicate: comparisons stay, other terms compare to 1."""
    e = _lift(e)
    if isinstance(e, FConst):
        return FConst(int(bool(e.value)))
    if isinstance(e, FOp) and e.op in BOOL_OPS:
        return e
    return FOp("eq", (e, FConst(1)))


# --- interval arithmetic -------------------------------------------------


def _div_bounds(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    blo, bhi = b
    if blo <= 0 <= bhi:
        m = max(abs(a[0]), abs(a[1]))
        return -m, m
    cands = [trunc_div(x, y) for x in a for y in b]
    return min(cands), max(cands)


def fbounds(e: FExpr, dom: Mapping[str, tuple[int, int]]) -> tuple[int, int]:
    """Sound (lo, hi) enclosure of ``e`` given per-variable bounds."""
    if isinstance(e, FConst):
        return e.value, e.value
    if isinstance(e, FVar):
        return dom[e.name]
    bs = [fbounds(a, dom) for a in e.args]
    o = e.op
    if o == "add":
        return sum(b[0] for b in bs), sum(b[1] for b in bs)
    if o == "sub":
        return bs[0][0] - bs[1][1], bs[0][1] - bs[1][0]
    if o == "mul":
        lo, hi = bs[0]
        for blo, bhi in bs[1:]:
            c = (lo * blo, lo * bhi, hi * blo, hi * bhi)
            lo, hi = min(c), max(c)
        return lo, hi
    if o == "div":
        return _div_bounds(bs[0], bs[1])
    if o == "abs":
        lo, hi = bs[0]
        if lo >= 0:
            return lo, hi
        if hi <= 0:
            return -hi, -lo
        return 0, max(-lo, hi)
    if o == "min":
        return min(b[0] for b in bs), min(b[1] for b in bs)
    if o == "max":
        return max(b[0] for b in bs), max(b[1] for b in bs)
    return 0, 1
