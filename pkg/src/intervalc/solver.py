"""Complete desk-scale solver over flat models.

Chronological backtracking with a static smallest-domain-first variable
order and ascending values.  Domains are bitsets (Python ints) offset by
each variable's initial lower bound.  Propagation:

* intension: HC4-style bounds narrowing, plus exact filtering by
  enumeration once the unfixed part of the scope is small;
* extension / element: generalized arc consistency over the tables;
* noOverlap / cumulative: compulsory-part time-tabling and pairwise
  disjunctive reasoning.

Objectives are handled by branch and bound on the objective variable.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass

from .errors import SearchSpaceTooLarge
from .flat import (
    BOOL_OPS,
    Cumulative,
    ElementCtr,
    Extension,
    FConst,
    FlatModel,
    FOp,
    FVar,
    Intension,
    NoOverlap,
    Solution,
    Status,
    check,
)

_ENUM_LIMIT = 64


@dataclass(frozen=True)
class SearchBudget:
    """Node and wall-clock limits; ``None`` means unbounded."""

    max_nodes: int | None = None
    max_millis: int | None = None


class _Fail(Exception):
    pass


class _Stop(Exception):
    pass


def _tdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


# --- code generation for fast evaluation ---------------------------------


def _py(e, index) -> str:
    if isinstance(e, FConst):
        return f"({e.value})"
    if isinstance(e, FVar):
        return f"v[{index[e.name]}]"
    a = [_py(x, index) for x in e.args]
    o = e.op
    if o == "add":
        return "(" + " + ".join(a) + ")"
    if o == "sub":
        return f"({a[0]} - {a[1]})"
    if o == "mul":
        return "(" + " * ".join(a) + ")"
    if o == "div":
        return f"_tdiv({a[0]}, {a[1]})"
    if o == "abs":
        return f"abs({a[0]})"
    if o in ("min", "max"):
        return f"{o}({', '.join(a)})"
    sym = {"eq": "==", "ne": "!=", "lt": "<", "le": "<=", "gt": ">", "ge": ">="}
    if o in sym:
        if o == "eq" and len(a) > 2:
            return "(1 if " + " == ".join(a) + " else 0)"
        return f"(1 if {a[0]} {sym[o]} {a[1]} else 0)"
    if o == "and":
        return "(1 if (" + ") and (".join(a) + ") else 0)"
    if o == "or":
        return "(1 if (" + ") or (".join(a) + ") else 0)"
    if o == "xor":
        return "((" + " + ".join(f"(1 if {x} else 0)" for x in a) + ") % 2)"
    if o == "not":
        return f"(0 if {a[0]} else 1)"
    raise ValueError(o)


def _compile_eval(expr, index):
    src = "lambda v: " + _py(expr, index)
    return eval(src, {"_tdiv": _tdiv, "abs": abs, "min": min, "max": max})  # noqa: S307


# --- engine ---------------------------------------------------------------


def _low(d: int) -> int:
    return (d & -d).bit_length() - 1


class _Engine:
    def __init__(self, flat: FlatModel):
        self.flat = flat
        self.names = list(flat.vars)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.off = [flat.vars[n].domain.lb for n in self.names]
        self.dom: list[int] = []
        for n, off in zip(self.names, self.off):
            d = 0
            for a, b in flat.vars[n].domain.ranges:
                d |= ((1 << (b - a + 1)) - 1) << (a - off)
            self.dom.append(d)
        self.props: list = []
        self.watch: list[list[int]] = [[] for _ in self.names]
        for c in flat.constraints:
            self._add(c)
        self.queue: list[int] = []
        self.inq = [False] * len(self.props)
        self.changes = 0

    def _add(self, c) -> None:
        if isinstance(c, Intension):
            p = _IntensionProp(self, c)
        elif isinstance(c, Extension):
            p = _ExtensionProp(self, c)
        elif isinstance(c, ElementCtr):
            p = _ElementProp(self, c)
        elif isinstance(c, NoOverlap):
            p = _ResourceProp(self, c.origins, c.lengths, None, 1)
        elif isinstance(c, Cumulative):
            p = _ResourceProp(self, c.origins, c.lengths, c.heights, c.cap)
        else:
            raise TypeError(f"unsupported flat constraint {c!r}")
        k = len(self.props)
        self.props.append(p)
        for i in p.scope:
            self.watch[i].append(k)

    # domain primitives

    def lo(self, i: int) -> int:
        return self.off[i] + _low(self.dom[i])

    def hi(self, i: int) -> int:
        return self.off[i] + self.dom[i].bit_length() - 1

    def fixed(self, i: int) -> bool:
        d = self.dom[i]
        return d & (d - 1) == 0

    def size(self, i: int) -> int:
        return bin(self.dom[i]).count("1")

    def values(self, i: int) -> list[int]:
        d, off, out = self.dom[i], self.off[i], []
        while d:
            low = d & -d
            out.append(off + low.bit_length() - 1)
            d ^= low
        return out

    def has(self, i: int, v: int) -> bool:
        k = v - self.off[i]
        return k >= 0 and (self.dom[i] >> k) & 1 == 1

    def set_dom(self, i: int, nd: int) -> None:
        if nd == self.dom[i]:
            return
        if nd == 0:
            raise _Fail
        self.dom[i] = nd
        self.changes += 1
        for k in self.watch[i]:
            if not self.inq[k]:
                self.inq[k] = True
                self.queue.append(k)

    def trim(self, i: int, lo: int, hi: int) -> None:
        d, off = self.dom[i], self.off[i]
        if lo > off:
            d &= ~((1 << (lo - off)) - 1)
        if hi < off + d.bit_length() - 1:
            if hi < off:
                raise _Fail
            d &= (1 << (hi - off + 1)) - 1
        self.set_dom(i, d)

    def remove(self, i: int, v: int) -> None:
        k = v - self.off[i]
        if k >= 0:
            self.set_dom(i, self.dom[i] & ~(1 << k))

    def remove_range(self, i: int, a: int, b: int) -> None:
        """Remove values a..b inclusive."""
        off = self.off[i]
        a, b = max(a, off), b
        if a > b:
            return
        k, n = a - off, b - a + 1
        if k >= self.dom[i].bit_length():
            return
        self.set_dom(i, self.dom[i] & ~(((1 << n) - 1) << k))

    def restrict(self, i: int, vals) -> None:
        off, d = self.off[i], 0
        for v in vals:
            if v >= off:
                d |= 1 << (v - off)
        self.set_dom(i, self.dom[i] & d)

    def propagate(self) -> None:
        q = self.queue
        while q:
            k = q.pop()
            self.inq[k] = False
            self.props[k].run()

    def schedule_all(self) -> None:
        for k in range(len(self.props)):
            if not self.inq[k]:
                self.inq[k] = True
                self.queue.append(k)

    def reset_queue(self) -> None:
        for k in self.queue:
            self.inq[k] = False
        self.queue.clear()


# --- intension ------------------------------------------------------------

_VAR, _CONST, _OP = 0, 1, 2
_NEG = {"eq": "ne", "ne": "eq", "lt": "ge", "ge": "lt", "le": "gt", "gt": "le"}


def _tree(e, index):
    if isinstance(e, FConst):
        return (_CONST, e.value)
    if isinstance(e, FVar):
        return (_VAR, index[e.name])
    return (_OP, e.op, tuple(_tree(a, index) for a in e.args))


class _IntensionProp:
    def __init__(self, eng: _Engine, c: Intension):
        self.eng = eng
        self.root = _tree(c.expr, eng.index)
        self.scope = sorted({eng.index[n] for n in c.scope()})
        self.fn = _compile_eval(c.expr, eng.index)
        self._memo: dict[int, tuple] = {}
        self._stamp = -1

    # forward interval evaluation, memoized until the next domain change
    def fwd(self, n) -> tuple[int, int]:
        eng = self.eng
        t = n[0]
        if t == _VAR:
            return eng.lo(n[1]), eng.hi(n[1])
        if t == _CONST:
            return n[1], n[1]
        if self._stamp != eng.changes:
            self._memo.clear()
            self._stamp = eng.changes
        hit = self._memo.get(id(n))
        if hit is not None and hit[0] is n:
            return hit[1]
        r = self._fwd(n)
        self._memo[id(n)] = (n, r)
        return r

    def _fwd(self, n) -> tuple[int, int]:
        op, args = n[1], n[2]
        if op == "add":
            lo = hi = 0
            for a in args:
                x, y = self.fwd(a)
                lo += x
                hi += y
            return lo, hi
        if op == "sub":
            a, b = self.fwd(args[0]), self.fwd(args[1])
            return a[0] - b[1], a[1] - b[0]
        if op == "mul":
            lo, hi = self.fwd(args[0])
            for a in args[1:]:
                x, y = self.fwd(a)
                c = (lo * x, lo * y, hi * x, hi * y)
                lo, hi = min(c), max(c)
            return lo, hi
        if op == "div":
            a, b = self.fwd(args[0]), self.fwd(args[1])
            if b[0] <= 0 <= b[1]:
                m = max(abs(a[0]), abs(a[1]))
                return -m, m
            c = [_tdiv(x, y) for x in a for y in b]
            return min(c), max(c)
        if op == "abs":
            lo, hi = self.fwd(args[0])
            if lo >= 0:
                return lo, hi
            if hi <= 0:
                return -hi, -lo
            return 0, max(-lo, hi)
        if op == "min":
            bs = [self.fwd(a) for a in args]
            return min(b[0] for b in bs), min(b[1] for b in bs)
        if op == "max":
            bs = [self.fwd(a) for a in args]
            return max(b[0] for b in bs), max(b[1] for b in bs)
        return self.truth(n)

    def truth(self, n) -> tuple[int, int]:
        op, args = n[1], n[2]
        if op in ("and", "or", "xor", "not"):
            ts = [self._t(a) for a in args]
            if op == "and":
                if 0 in ts:
                    return 0, 0
                return (1, 1) if all(t == 1 for t in ts) else (0, 1)
            if op == "or":
                if 1 in ts:
                    return 1, 1
                return (0, 0) if all(t == 0 for t in ts) else (0, 1)
            if op == "not":
                return (0, 1) if ts[0] is None else (1 - ts[0], 1 - ts[0])
            if None in ts:
                return 0, 1
            r = sum(ts) % 2
            return r, r
        bs = [self.fwd(a) for a in args]
        if op in ("eq", "ne"):
            if len(bs) > 2:
                res = self.truth((_OP, "and", tuple((_OP, "eq", (args[0], a)) for a in args[1:])))
                if op == "eq":
                    return res
                return (1 - res[1], 1 - res[0])
            (a0, a1), (b0, b1) = bs
            if a0 == a1 == b0 == b1:
                r = 1
            elif a1 < b0 or b1 < a0:
                r = 0
            elif args[0][0] == _VAR and b0 == b1 and not self.eng.has(args[0][1], b0):
                r = 0
            elif args[1][0] == _VAR and a0 == a1 and not self.eng.has(args[1][1], a0):
                r = 0
            else:
                return 0, 1
            if op == "ne":
                r = 1 - r
            return r, r
        (a0, a1), (b0, b1) = bs
        if op == "le":
            return (1, 1) if a1 <= b0 else (0, 0) if a0 > b1 else (0, 1)
        if op == "lt":
            return (1, 1) if a1 < b0 else (0, 0) if a0 >= b1 else (0, 1)
        if op == "ge":
            return (1, 1) if a0 >= b1 else (0, 0) if a1 < b0 else (0, 1)
        if op == "gt":
            return (1, 1) if a0 > b1 else (0, 0) if a1 <= b0 else (0, 1)
        raise ValueError(op)

    def _t(self, n):
        """Definite truth value of a node (1/0) or None."""
        lo, hi = self.fwd(n)
        if lo > 0 or hi < 0:
            return 1
        if lo == hi == 0:
            return 0
        return None

    # backward narrowing
    def want(self, n, truth: bool) -> None:
        if n[0] == _OP and n[1] in BOOL_OPS:
            self.bool_bwd(n, truth)
            return
        lo, hi = self.fwd(n)
        if not truth:
            self.bwd(n, 0, 0)
        elif lo >= 0:
            self.bwd(n, 1, hi)
        elif hi <= 0:
            self.bwd(n, lo, -1)

    def bool_bwd(self, n, truth: bool) -> None:
        op, args = n[1], n[2]
        if op == "not":
            self.want(args[0], not truth)
            return
        if op == "and" or op == "or":
            conj = (op == "and") == truth
            if conj:
                # every child must take the value ``truth``
                for a in args:
                    self.want(a, truth)
                return
            open_ = []
            for a in args:
                t = self._t(a)
                if t is None:
                    open_.append(a)
                elif bool(t) == truth:
                    return
            if not open_:
                raise _Fail
            if len(open_) == 1:
                self.want(open_[0], truth)
            return
        if op == "xor":
            parity, open_ = 0, []
            for a in args:
                t = self._t(a)
                if t is None:
                    open_.append(a)
                else:
                    parity ^= t
            if not open_:
                if parity != int(truth):
                    raise _Fail
            elif len(open_) == 1:
                self.want(open_[0], parity != int(truth))
            return
        cmp = op if truth else _NEG[op]
        if len(args) > 2:
            if truth:
                for a in args[1:]:
                    self.cmp_bwd("eq", args[0], a)
            elif all(self._t((_OP, "eq", (args[0], a))) == 1 for a in args[2:]):
                self.cmp_bwd("ne", args[0], args[1])
            return
        self.cmp_bwd(cmp, args[0], args[1])

    def cmp_bwd(self, op, a, b) -> None:
        (a0, a1), (b0, b1) = self.fwd(a), self.fwd(b)
        if op == "le":
            self.bwd(a, a0, b1)
            self.bwd(b, a0, b1)
        elif op == "lt":
            self.bwd(a, a0, b1 - 1)
            self.bwd(b, a0 + 1, b1)
        elif op == "ge":
            self.bwd(a, b0, a1)
            self.bwd(b, b0, a1)
        elif op == "gt":
            self.bwd(a, b0 + 1, a1)
            self.bwd(b, b0, a1 - 1)
        elif op == "eq":
            lo, hi = max(a0, b0), min(a1, b1)
            self.bwd(a, lo, hi)
            self.bwd(b, lo, hi)
            if a[0] == _VAR and b[0] == _VAR:
                eng = self.eng
                i, j = a[1], b[1]
                sh = eng.off[j] - eng.off[i]
                dj = eng.dom[j] << sh if sh >= 0 else eng.dom[j] >> -sh
                eng.set_dom(i, eng.dom[i] & dj)
                di = eng.dom[i] << -sh if sh <= 0 else eng.dom[i] >> sh
                eng.set_dom(j, eng.dom[j] & di)
        else:  # ne
            if a0 == a1 and b0 == b1:
                if a0 == b0:
                    raise _Fail
            elif b0 == b1 and a[0] == _VAR:
                self.eng.remove(a[1], b0)
            elif a0 == a1 and b[0] == _VAR:
                self.eng.remove(b[1], a0)

    def bwd(self, n, lo: int, hi: int) -> None:
        if lo > hi:
            raise _Fail
        t = n[0]
        eng = self.eng
        if t == _VAR:
            eng.trim(n[1], lo, hi)
            return
        if t == _CONST:
            if not lo <= n[1] <= hi:
                raise _Fail
            return
        op, args = n[1], n[2]
        if op in BOOL_OPS:
            lo, hi = max(lo, 0), min(hi, 1)
            if lo > hi:
                raise _Fail
            if lo == hi:
                self.bool_bwd(n, bool(lo))
            return
        if op == "add":
            bs = [self.fwd(a) for a in args]
            slo, shi = sum(b[0] for b in bs), sum(b[1] for b in bs)
            for a, (x, y) in zip(args, bs):
                nlo, nhi = lo - (shi - y), hi - (slo - x)
                if nlo > x or nhi < y:
                    self.bwd(a, max(x, nlo), min(y, nhi))
            return
        if op == "sub":
            (a0, a1), (b0, b1) = self.fwd(args[0]), self.fwd(args[1])
            self.bwd(args[0], max(a0, lo + b0), min(a1, hi + b1))
            (a0, a1) = self.fwd(args[0])
            self.bwd(args[1], max(b0, a0 - hi), min(b1, a1 - lo))
            return
        if op == "mul":
            bs = [self.fwd(a) for a in args]
            free = [k for k, b in enumerate(bs) if b[0] != b[1]]
            if len(free) == 1:
                k = free[0]
                c = 1
                for m, b in enumerate(bs):
                    if m != k:
                        c *= b[0]
                x, y = bs[k]
                if c == 0:
                    if not lo <= 0 <= hi:
                        raise _Fail
                elif c > 0:
                    self.bwd(args[k], max(x, -((-lo) // c)), min(y, hi // c))
                else:
                    self.bwd(args[k], max(x, _ceil_div(hi, c)), min(y, _floor_div(lo, c)))
            elif not free:
                c = 1
                for b in bs:
                    c *= b[0]
                if not lo <= c <= hi:
                    raise _Fail
            elif not lo <= 0 <= hi:
                for a, (x, y) in zip(args, bs):
                    if x == 0:
                        self.bwd(a, 1, y)
                    elif y == 0:
                        self.bwd(a, x, -1)
            return
        if op == "min":
            bs = [self.fwd(a) for a in args]
            for a, (x, y) in zip(args, bs):
                if x < lo:
                    self.bwd(a, lo, y)
            cand = [a for a, (x, y) in zip(args, bs) if x <= hi]
            if not cand:
                raise _Fail
            if len(cand) == 1:
                x, y = self.fwd(cand[0])
                self.bwd(cand[0], x, min(y, hi))
            return
        if op == "max":
            bs = [self.fwd(a) for a in args]
            for a, (x, y) in zip(args, bs):
                if y > hi:
                    self.bwd(a, x, hi)
            cand = [a for a, (x, y) in zip(args, bs) if y >= lo]
            if not cand:
                raise _Fail
            if len(cand) == 1:
                x, y = self.fwd(cand[0])
                self.bwd(cand[0], max(x, lo), y)
            return
        if op == "abs":
            x, y = self.fwd(args[0])
            lo = max(lo, 0)
            if lo > hi:
                raise _Fail
            if x >= 0:
                self.bwd(args[0], max(x, lo), min(y, hi))
            elif y <= 0:
                self.bwd(args[0], max(x, -hi), min(y, -lo))
            else:
                self.bwd(args[0], max(x, -hi), min(y, hi))
            return
        x, y = self.fwd(n)
        if y < lo or x > hi:
            raise _Fail

    def run(self) -> None:
        eng = self.eng
        for _ in range(32):
            before = eng.changes
            self.want(self.root, True)
            if eng.changes == before:
                break
        free = [i for i in self.scope if not eng.fixed(i)]
        if not free:
            v = self._vals()
            if not self.fn(v):
                raise _Fail
            return
        prod = 1
        for i in free:
            prod *= eng.size(i)
            if prod > _ENUM_LIMIT:
                return
        self._enumerate(free)

    def _vals(self) -> dict:
        eng = self.eng
        return {i: eng.lo(i) for i in self.scope}

    def _enumerate(self, free) -> None:
        eng = self.eng
        v = self._vals()
        doms = [eng.values(i) for i in free]
        support = [set() for _ in free]
        fn = self.fn

        def rec(k):
            if k == len(free):
                if fn(v):
                    for m, i in enumerate(free):
                        support[m].add(v[i])
                return
            i = free[k]
            for x in doms[k]:
                v[i] = x
                rec(k + 1)

        rec(0)
        for i, sup in zip(free, support):
            if not sup:
                raise _Fail
            eng.restrict(i, sup)


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


# --- tables -------------------------------------------------------------


class _ExtensionProp:
    def __init__(self, eng: _Engine, c: Extension):
        self.eng = eng
        self.vars = [eng.index[n] for n in c.vars]
        self.scope = sorted(set(self.vars))
        self.tuples = c.tuples
        self.positive = c.positive

    def run(self) -> None:
        eng = self.eng
        if not self.positive:
            if all(eng.fixed(i) for i in self.vars):
                tup = tuple(eng.lo(i) for i in self.vars)
                if tup in set(self.tuples):
                    raise _Fail
            return
        sup = [set() for _ in self.vars]
        has = eng.has
        for tup in self.tuples:
            if all(has(i, x) for i, x in zip(self.vars, tup)):
                for s, x in zip(sup, tup):
                    s.add(x)
        for i, s in zip(self.vars, sup):
            if not s:
                raise _Fail
            eng.restrict(i, s)


class _ElementProp:
    def __init__(self, eng: _Engine, c: ElementCtr):
        self.eng = eng
        self.c = c
        self.idx = [t if isinstance(t, int) else eng.index[t] for t in c.index]
        self.idx_is_var = [not isinstance(t, int) for t in c.index]
        self.val = c.value if isinstance(c.value, int) else eng.index[c.value]
        self.val_is_var = not isinstance(c.value, int)
        self.scope = sorted({i for i, var in zip(self.idx, self.idx_is_var) if var}
                            | ({self.val} if self.val_is_var else set()))

    def run(self) -> None:
        eng = self.eng
        axes = [eng.values(i) if var else [i] for i, var in zip(self.idx, self.idx_is_var)]
        sup_idx = [set() for _ in axes]
        sup_val = set()

        def ok(x):
            return eng.has(self.val, x) if self.val_is_var else x == self.val

        if len(axes) == 1:
            for i in axes[0]:
                x = self.c.lookup((i,))
                if x is not None and ok(x):
                    sup_idx[0].add(i)
                    sup_val.add(x)
        else:
            for i in axes[0]:
                for j in axes[1]:
                    x = self.c.lookup((i, j))
                    if x is not None and ok(x):
                        sup_idx[0].add(i)
                        sup_idx[1].add(j)
                        sup_val.add(x)
        if not sup_val:
            raise _Fail
        for i, var, s in zip(self.idx, self.idx_is_var, sup_idx):
            if var:
                eng.restrict(i, s)
        if self.val_is_var:
            eng.restrict(self.val, sup_val)


# --- resources ----------------------------------------------------------


class _ResourceProp:
    """noOverlap (heights None, cap 1) or cumulative; zero-length tasks are ignored."""

    def __init__(self, eng: _Engine, origins, lengths, heights, cap):
        self.eng = eng

        def term(t):
            return (False, t) if isinstance(t, int) else (True, eng.index[t])

        self.s = [term(t) for t in origins]
        self.l = [term(t) for t in lengths]
        self.h = [term(t) for t in heights] if heights is not None else [(False, 1)] * len(origins)
        self.cap = cap
        self.scope = sorted({i for var, i in self.s + self.l + self.h if var})

    def _b(self, t):
        var, x = t
        if var:
            return self.eng.lo(x), self.eng.hi(x)
        return x, x

    def run(self) -> None:
        eng, cap = self.eng, self.cap
        n = len(self.s)
        S = [self._b(t) for t in self.s]
        L = [self._b(t) for t in self.l]
        Hh = [self._b(t) for t in self.h]
        if cap < 0:
            for k in range(n):
                if L[k][0] >= 1 and Hh[k][0] > 0:
                    raise _Fail
        # compulsory parts
        parts = []
        for k in range(n):
            a, b = S[k][1], S[k][0] + L[k][0]
            if L[k][0] >= 1 and Hh[k][0] > 0 and a < b:
                parts.append((a, b, Hh[k][0], k))
        events: dict[int, int] = {}
        for a, b, h, _ in parts:
            events[a] = events.get(a, 0) + h
            events[b] = events.get(b, 0) - h
        level = 0
        for t in sorted(events):
            level += events[t]
            if level > cap:
                raise _Fail
        # pairwise disjunctive reasoning
        for i in range(n):
            if L[i][0] < 1 or Hh[i][0] <= 0:
                continue
            for j in range(i + 1, n):
                if L[j][0] < 1 or Hh[j][0] <= 0 or Hh[i][0] + Hh[j][0] <= cap:
                    continue
                si, sj = S[i], S[j]
                can_ij = si[0] + L[i][0] <= sj[1]
                can_ji = sj[0] + L[j][0] <= si[1]
                if not can_ij and not can_ji:
                    raise _Fail
                if not can_ji:
                    self._trim_start(j, si[0] + L[i][0], None)
                    self._trim_start(i, None, sj[1] - L[i][0])
                elif not can_ij:
                    self._trim_start(i, sj[0] + L[j][0], None)
                    self._trim_start(j, None, si[1] - L[j][0])
                S[i], S[j] = self._b(self.s[i]), self._b(self.s[j])
        # time-tabling: remove starts that would overload the compulsory profile
        if not parts:
            return
        for k in range(n):
            var, si = self.s[k]
            if not var or L[k][0] < 1 or Hh[k][1] <= 0:
                continue
            hk = Hh[k][0]
            if hk <= 0:
                hv, hi_ = self.h[k]
                hk = min(x for x in eng.values(hi_) if x > 0) if hv else Hh[k][1]
            lk = L[k][0]
            ev: dict[int, int] = {}
            for a, b, h, owner in parts:
                if owner == k:
                    continue
                ev[a] = ev.get(a, 0) + h
                ev[b] = ev.get(b, 0) - h
            if not ev:
                continue
            times = sorted(ev)
            level = 0
            forbidden = []
            for t0, t1 in zip(times, times[1:]):
                level += ev[t0]
                if level + hk > cap:
                    forbidden.append((t0 - lk + 1, t1 - 1))
            if not forbidden:
                continue
            if Hh[k][0] > 0:
                for a, b in forbidden:
                    eng.remove_range(si, a, b)
            else:
                d = eng.dom[si]
                off = eng.off[si]
                for a, b in forbidden:
                    a = max(a, off)
                    if a <= b:
                        d &= ~(((1 << (b - a + 1)) - 1) << (a - off))
                if d == 0:
                    hv, hi_ = self.h[k]
                    eng.trim(hi_, 0, 0)

    def _trim_start(self, k, lo, hi):
        var, i = self.s[k]
        if var:
            eng = self.eng
            eng.trim(i, eng.lo(i) if lo is None else lo, eng.hi(i) if hi is None else hi)
        else:
            if (lo is not None and i < lo) or (hi is not None and i > hi):
                raise _Fail


# --- search ---------------------------------------------------------------


class _Search:
    def __init__(self, flat: FlatModel, budget: SearchBudget | None, collect: bool = False):
        self.eng = _Engine(flat)
        self.flat = flat
        self.budget = budget or SearchBudget()
        self.collect = collect
        self.nodes = 0
        self.t0 = time.perf_counter()
        self.best: int | None = None
        self.best_asn: dict | None = None
        self.solutions: list[tuple[int, ...]] = []
        obj = flat.objective if not collect else None
        self.obj = self.eng.index[obj.var] if obj is not None else None
        self.minimize = obj is None or obj.sense == "minimize"
        self.order: list[int] = []

    def _tick(self) -> None:
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise _Stop
        if b.max_millis is not None and (self.nodes & 63 == 1 or b.max_millis == 0):
            if (time.perf_counter() - self.t0) * 1000 >= b.max_millis:
                raise _Stop

    def _bound(self) -> None:
        if self.obj is None or self.best is None:
            return
        eng = self.eng
        if self.minimize:
            eng.trim(self.obj, eng.lo(self.obj), self.best - 1)
        else:
            eng.trim(self.obj, self.best + 1, eng.hi(self.obj))

    def run(self) -> bool:
        """Search; returns True when the tree was exhausted."""
        eng = self.eng
        try:
            self._tick()
            eng.schedule_all()
            eng.propagate()
        except _Fail:
            eng.reset_queue()
            return True
        except _Stop:
            return False
        n = len(eng.names)
        self.order = sorted(range(n), key=lambda i: (eng.size(i), i))
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * n + 1000))
        try:
            self._dfs(0)
        except _Fail:
            eng.reset_queue()
        except _Stop:
            return False
        except _Done:
            return False if not self.collect else True
        finally:
            sys.setrecursionlimit(old)
        return True

    def _dfs(self, k: int) -> None:
        eng = self.eng
        order = self.order
        while k < len(order) and eng.fixed(order[k]):
            k += 1
        if k == len(order):
            self._solution()
            return
        i = order[k]
        for v in eng.values(i):
            if not eng.has(i, v):
                continue
            self._tick()
            saved = eng.dom[:]
            try:
                eng.set_dom(i, 1 << (v - eng.off[i]))
                self._bound()
                eng.propagate()
                self._dfs(k + 1)
            except _Fail:
                eng.reset_queue()
            eng.dom = saved
            eng.changes += 1

    def _solution(self) -> None:
        eng = self.eng
        asn = {name: eng.lo(i) for i, name in enumerate(eng.names)}
        if not check(self.flat, asn):
            raise AssertionError("internal error: search produced an assignment that fails check()")
        if self.collect:
            self.solutions.append(tuple(asn[n] for n in eng.names))
            return
        if self.obj is None:
            self.best_asn = asn
            raise _Done
        self.best = asn[eng.names[self.obj]]
        self.best_asn = asn
        # the bound is enforced on re-entry; fail back into the tree
        raise _Fail


class _Done(Exception):
    pass


def solve(flat: FlatModel, budget: SearchBudget | None = None) -> Solution:
    """Solve ``flat``; OPTIMUM only with a completed branch-and-bound proof."""
    from .compiler import decode

    s = _Search(flat, budget)
    exhausted = s.run()
    millis = int((time.perf_counter() - s.t0) * 1000)
    asn = s.best_asn
    if flat.objective is None:
        if asn is not None:
            status = Status.SAT
        else:
            status = Status.UNSAT if exhausted else Status.TIMEOUT
    elif asn is None:
        status = Status.UNSAT if exhausted else Status.TIMEOUT
    else:
        status = Status.OPTIMUM if exhausted else Status.SAT
    obj = asn[flat.objective.var] if asn is not None and flat.objective is not None else None
    decoded = decode(flat, asn) if asn is not None and flat.layout else None
    return Solution(status, asn, obj, decoded, s.nodes, millis)


def enumerate_all(flat: FlatModel, cap: int = 10**6) -> list[dict[str, int]]:
    """Every satisfying total assignment, sorted by values in declaration order."""
    space = flat.search_space()
    if space > cap:
        raise SearchSpaceTooLarge(f"search space {space} exceeds cap {cap}")
    s = _Search(flat, None, collect=True)
    s.run()
    names = s.eng.names
    return [dict(zip(names, t)) for t in sorted(s.solutions)]


def search_space_log10(flat: FlatModel) -> float:
    return sum(math.log10(len(v.domain)) for v in flat.vars.values())


__all__ = ["SearchBudget", "solve", "enumerate_all"]
