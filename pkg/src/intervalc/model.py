"""Scheduling model objects: domains, interval/sequence variables, the model container."""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Sequence

from .errors import (
    BadIntensity,
    DuplicateId,
    DuplicateInterval,
    EmptyDomain,
    LengthMismatch,
    ModelError,
    UnknownInterval,
)
from .expr import BoolExpr, IntVar, ScalarExpr, as_expr, referenced_objects

_ID_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def check_id(name: str) -> str:
    if not isinstance(name, str) or not _ID_RE.match(name):
        raise ModelError(f"invalid identifier {name!r}")
    return name


@dataclass(frozen=True)
class IntDomain:
    lb: int
    ub: int

    def __post_init__(self):
        if self.lb > self.ub:
            raise EmptyDomain(f"empty domain ({self.lb}, {self.ub})")

    @classmethod
    def of(cls, value) -> IntDomain:
        if isinstance(value, IntDomain):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not domains")
        if isinstance(value, int):
            return cls(value, value)
        if isinstance(value, range):
            return cls(value.start, value.stop - 1)
        lb, ub = value
        return cls(int(lb), int(ub))

    @property
    def fixed(self) -> bool:
        return self.lb == self.ub

    def values(self) -> range:
        return range(self.lb, self.ub + 1)

    def __contains__(self, v: int) -> bool:
        return self.lb <= v <= self.ub


@dataclass(frozen=True)
class IntensityProfile:
    """Stepwise-constant efficiency: ``steps`` are (from_t, value) pairs."""

    steps: tuple[tuple[int, int], ...]
    granularity: int = 100

    def __post_init__(self):
        steps = tuple((int(t), int(v)) for t, v in self.steps)
        object.__setattr__(self, "steps", steps)
        if self.granularity <= 0:
            raise BadIntensity("granularity must be positive")
        if not steps or steps[0][0] != 0:
            raise BadIntensity("first step must start at t=0")
        for (t0, _), (t1, _) in zip(steps, steps[1:]):
            if t1 <= t0:
                raise BadIntensity("step times must be strictly increasing")
        for _, v in steps:
            if not 0 <= v <= self.granularity:
                raise BadIntensity(f"intensity {v} outside [0, {self.granularity}]")

    def value(self, t: int) -> int:
        i = bisect_right([s[0] for s in self.steps], t) - 1
        return self.steps[max(i, 0)][1]

    def tail_value(self) -> int:
        return self.steps[-1][1]


def intensity_tuples(profile: IntensityProfile, starts: Iterable[int], sizes: Iterable[int],
                     max_end: int | None = None, limit: int | None = None
                     ) -> list[tuple[int, int, int]]:
    """All (start, size, length) with size*granularity equal to the summed
    intensity over [start, start+length).  Size 0 only admits length 0.

    Raises BadIntensity when lengths are unbounded (zero tail, no max_end)."""
    starts = list(starts)
    sizes = sorted(set(sizes))
    if not starts or not sizes:
        return []
    if min(starts) < 0:
        raise BadIntensity("intervals with an intensity profile must start at t >= 0")
    g = profile.granularity
    big = max(sizes) * g
    if max_end is None:
        if profile.tail_value() == 0:
            raise BadIntensity("profile ends at zero intensity; bound the end or horizon")
        last_step = profile.steps[-1][0]
        max_end = max(max(starts), last_step) + -(-big // profile.tail_value()) + 1
    if max_end < 0:
        return []
    horizon = max_end
    prefix = [0] + list(accumulate(profile.value(t) for t in range(horizon)))
    out: list[tuple[int, int, int]] = []
    for s in sorted(starts):
        if s > horizon:
            continue
        base = prefix[s]
        for sz in sizes:
            if sz == 0:
                out.append((s, 0, 0))
                continue
            target = sz * g
            lo = bisect_right(prefix, base + target - 1, lo=s)
            hi = bisect_right(prefix, base + target, lo=s)
            for end in range(lo, hi):
                if end > horizon:
                    break
                out.append((s, sz, end - s))
                if limit is not None and len(out) > limit:
                    return out
    out.sort()
    return out


class IntervalVar:
    """A task with start/end/size/length domains and an optional presence flag."""

    __slots__ = ("id", "start", "end", "size", "length", "size_var", "optional",
                 "intensity", "index")
    __hash__ = object.__hash__

    def __init__(self, id, start, end, size, length, size_var, optional, intensity):
        self.id = id
        self.start: IntDomain = start
        self.end: IntDomain = end
        self.size: IntDomain = size
        self.length: IntDomain = length
        self.size_var: IntVar | None = size_var
        self.optional: bool = optional
        self.intensity: IntensityProfile | None = intensity
        self.index = -1

    def __repr__(self):
        opt = ", optional" if self.optional else ""
        return (f"IntervalVar({self.id!r}, start={self.start.lb}..{self.start.ub}, "
                f"size={self.size.lb}..{self.size.ub}{opt})")


def _narrow(s: IntDomain, e: IntDomain, z: IntDomain) -> tuple[IntDomain, IntDomain, IntDomain]:
    slb, sub, elb, eub, zlb, zub = s.lb, s.ub, e.lb, e.ub, z.lb, z.ub
    while True:
        before = (slb, sub, elb, eub, zlb, zub)
        elb = max(elb, slb + zlb)
        eub = min(eub, sub + zub)
        slb = max(slb, elb - zub)
        sub = min(sub, eub - zlb)
        zlb = max(zlb, elb - sub)
        zub = min(zub, eub - slb)
        if slb > sub or elb > eub or zlb > zub:
            raise EmptyDomain("start/end/size domains are inconsistent")
        if (slb, sub, elb, eub, zlb, zub) == before:
            return IntDomain(slb, sub), IntDomain(elb, eub), IntDomain(zlb, zub)


def new_interval(id: str, start=(0, 0), end=None, size=None, length=None,
                 optional: bool = False, intensity=None, granularity: int = 100,
                 horizon: int | None = None) -> IntervalVar:
    """Build an interval variable with mutually narrowed domains.

    ``size`` may be an int, a (lb, ub) pair or an :class:`IntVar`; ``intensity``
    is an :class:`IntensityProfile` or a list of (from_t, value) steps.
    """
    check_id(id)
    size_var = None
    if isinstance(size, IntVar):
        size_var = size
        size = (size.lb, size.ub)
    s = IntDomain.of(start)
    e = IntDomain.of(end) if end is not None else None
    if size is None:
        if e is None and length is None:
            raise ModelError(f"interval {id}: give a size, a length or an end domain")
        z = IntDomain(0, max(0, (e.ub - s.lb) if e is not None else IntDomain.of(length).ub))
    else:
        z = IntDomain.of(size)
    if z.lb < 0:
        raise EmptyDomain(f"interval {id}: negative size")
    if intensity is not None and not isinstance(intensity, IntensityProfile):
        intensity = IntensityProfile(tuple(intensity), granularity)

    if intensity is None:
        ln = z
        if length is not None:
            ld = IntDomain.of(length)
            lo, hi = max(ld.lb, z.lb), min(ld.ub, z.ub)
            if lo > hi:
                raise EmptyDomain(f"interval {id}: length and size domains are disjoint")
            z = ln = IntDomain(lo, hi)
        if e is None:
            e = IntDomain(s.lb + z.lb, s.ub + z.ub)
        s, e, z = _narrow(s, e, z)
        ln = z
    else:
        max_end = e.ub if e is not None else horizon
        tuples = intensity_tuples(intensity, s.values(), z.values(), max_end)
        if e is not None:
            tuples = [t for t in tuples if t[0] + t[2] >= e.lb]
        if length is not None:
            ld = IntDomain.of(length)
            tuples = [t for t in tuples if t[2] in ld]
        if not tuples:
            raise EmptyDomain(f"interval {id}: no (start, size, length) satisfies the intensity")
        s = IntDomain(min(t[0] for t in tuples), max(t[0] for t in tuples))
        z = IntDomain(min(t[1] for t in tuples), max(t[1] for t in tuples))
        ln = IntDomain(min(t[2] for t in tuples), max(t[2] for t in tuples))
        e = IntDomain(min(t[0] + t[2] for t in tuples), max(t[0] + t[2] for t in tuples))
    return IntervalVar(id, s, e, z, ln, size_var, bool(optional), intensity)


class SequenceVar:
    """Ordered group of intervals; each member carries an integer type."""

    __slots__ = ("id", "intervals", "types", "index", "_pos")
    __hash__ = object.__hash__

    def __init__(self, id: str, intervals: Sequence[IntervalVar], types: Sequence[int] | None = None):
        check_id(id)
        intervals = tuple(intervals)
        if not intervals:
            raise ModelError(f"sequence {id} is empty")
        if len({x.id for x in intervals}) != len(intervals):
            raise DuplicateInterval(f"sequence {id} lists an interval twice")
        if types is None:
            types = range(len(intervals))
        types = tuple(int(t) for t in types)
        if len(types) != len(intervals):
            raise LengthMismatch(f"sequence {id}: {len(types)} types for {len(intervals)} intervals")
        if any(t < 0 for t in types):
            raise ModelError("sequence types must be non-negative")
        self.id = id
        self.intervals = intervals
        self.types = types
        self.index = -1
        self._pos = {x.id: i for i, x in enumerate(intervals)}

    def position(self, interval: IntervalVar) -> int:
        return self._pos[interval.id]

    def __contains__(self, interval) -> bool:
        return getattr(interval, "id", None) in self._pos and \
            self.intervals[self._pos[interval.id]] is interval

    def __len__(self):
        return len(self.intervals)

    def __repr__(self):
        return f"SequenceVar({self.id!r}, {[x.id for x in self.intervals]})"


def new_sequence(id: str, intervals: Sequence[IntervalVar], types=None) -> SequenceVar:
    return SequenceVar(id, intervals, types)


class StateFunction:
    """Named resource holding one state value (or none) at each time point."""

    __slots__ = ("id", "state_domain", "index")
    __hash__ = object.__hash__

    def __init__(self, id: str, state_domain):
        check_id(id)
        self.id = id
        self.state_domain = IntDomain.of(state_domain)
        self.index = -1

    @property
    def none_value(self) -> int:
        """Flat encoding of "no state"."""
        return self.state_domain.lb - 1

    def __repr__(self):
        return f"StateFunction({self.id!r}, {self.state_domain.lb}..{self.state_domain.ub})"


@dataclass(frozen=True)
class Objective:
    sense: str  # "minimize" | "maximize"
    expr: ScalarExpr


class Model:
    """Container accumulating declarations, constraints and an objective."""

    def __init__(self, name: str = "model", horizon: int | None = None):
        self.name = name
        self._horizon = horizon
        self.intervals: list[IntervalVar] = []
        self.sequences: list[SequenceVar] = []
        self.state_functions: list[StateFunction] = []
        self.int_vars: list[IntVar] = []
        self.constraints: list = []
        self.objective: Objective | None = None
        self._ids: dict[str, object] = {}

    # declarations

    def _declare(self, obj, bucket: list):
        if obj.id in self._ids:
            raise DuplicateId(f"id {obj.id!r} already declared")
        self._ids[obj.id] = obj
        if hasattr(obj, "index"):
            obj.index = len(bucket)
        bucket.append(obj)
        return obj

    def interval(self, id: str | None = None, start=(0, 0), end=None, size=None, length=None,
                 optional: bool = False, intensity=None, granularity: int = 100) -> IntervalVar:
        if id is None:
            id = f"iv{len(self.intervals)}"
        if start is None:
            start = (0, self.horizon)
        iv = new_interval(id, start, end, size, length, optional, intensity, granularity,
                          horizon=self._horizon)
        if iv.size_var is not None and not self.declares(iv.size_var):
            raise UnknownInterval(f"size variable {iv.size_var.id} is not declared")
        return self._declare(iv, self.intervals)

    def add_interval(self, iv: IntervalVar) -> IntervalVar:
        return self._declare(iv, self.intervals)

    def sequence(self, id: str | None = None, intervals=(), types=None) -> SequenceVar:
        if id is None:
            id = f"seq{len(self.sequences)}"
        intervals = list(intervals)
        for x in intervals:
            self._require(x)
        return self._declare(SequenceVar(id, intervals, types), self.sequences)

    def state_function(self, id: str, states) -> StateFunction:
        return self._declare(StateFunction(id, states), self.state_functions)

    def int_var(self, id: str, lb: int, ub: int) -> IntVar:
        check_id(id)
        return self._declare(IntVar(id, lb, ub), self.int_vars)

    def declares(self, obj) -> bool:
        return self._ids.get(getattr(obj, "id", None)) is obj

    def _require(self, obj):
        if not self.declares(obj):
            raise UnknownInterval(f"{obj!r} is not declared in model {self.name!r}")

    # constraints and objective

    def add(self, *items) -> None:
        """Post constraint records or Boolean expressions (nested lists allowed)."""
        from .constraints import Constraint, ExprConstraint

        for item in items:
            if isinstance(item, (list, tuple)) or _is_generator(item):
                self.add(*item)
                continue
            if isinstance(item, BoolExpr):
                item = ExprConstraint(item)
            if not isinstance(item, Constraint):
                raise TypeError(f"cannot post {item!r}")
            for obj in item.references():
                self._require(obj)
            self.constraints.append(item)

    satisfy = add

    def _set_objective(self, sense: str, expr) -> None:
        expr = as_expr(expr)
        for obj in referenced_objects(expr):
            self._require(obj)
        self.objective = Objective(sense, expr)

    def minimize(self, expr) -> None:
        self._set_objective("minimize", expr)

    def maximize(self, expr) -> None:
        self._set_objective("maximize", expr)

    @property
    def horizon(self) -> int:
        """Explicit horizon, else the largest start/end upper bound."""
        if self._horizon is not None:
            return self._horizon
        bounds = [iv.end.ub for iv in self.intervals] + [iv.start.ub for iv in self.intervals]
        return max(bounds, default=0)

    def interval_by_id(self, name: str) -> IntervalVar:
        obj = self._ids.get(name)
        if not isinstance(obj, IntervalVar):
            raise UnknownInterval(name)
        return obj


def _is_generator(x) -> bool:
    return hasattr(x, "__next__") and hasattr(x, "__iter__")
