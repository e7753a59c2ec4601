"""Lowering of scheduling models to the flat integer-CSP core.

Every interval becomes start/end/length/size variables plus a presence
variable when optional; records become intensions guarded by presence,
``noOverlap``/``cumulative`` globals where legal, extension tables for
intensity profiles and ``element`` constraints for table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import (
    Alternative,
    Bounds,
    Chain,
    Constraint,
    CumulBound,
    ExprConstraint,
    Forbid,
    IfPresentThen,
    OverlapConstraint,
    Precedence,
    PresenceConstraint,
    SameSequence,
    SeqNoOverlap,
    SequenceOrder,
    Span,
    StateConstraint,
    Synchronize,
)
from .errors import (
    CompileError,
    IndexDomainExceedsTable,
    NoFeasibleTuple,
    StrategyUnsupported,
    TupleExplosion,
    UnsupportedConstraint,
)
from .expr import (
    Accessor,
    Aggregate,
    And,
    Arith,
    Assignment,
    BoolAsInt,
    BoolConst,
    Cmp,
    Const,
    CumulExpr,
    CumulHeight,
    Element,
    Element2D,
    IntervalValue,
    IntVar,
    NEXT_KINDS,
    Not,
    Or,
    PresenceLit,
    Pulse,
    SeqAccessor,
    StepAt,
    StepAtEnd,
    StepAtStart,
    Xor,
    as_expr,
    sequence_order,
)
from .flat import (
    Cumulative,
    Domain,
    ElementCtr,
    Extension,
    FConst,
    FExpr,
    FlatConstraint,
    FlatModel,
    FlatObjective,
    FOp,
    FVar,
    Intension,
    NoOverlap,
    Term,
    f_add,
    f_and,
    f_bool,
    f_cmp,
    f_minmax,
    f_mul,
    f_not,
    f_or,
    f_sub,
    f_xor,
    fbounds,
)
from .model import IntervalVar, Model, SequenceVar, StateFunction, intensity_tuples

STRATEGIES = ("auto", "pairwise", "unary_cumulative")


@dataclass(frozen=True)
class CompileOptions:
    no_overlap_strategy: str = "auto"
    horizon_override: int | None = None
    max_extension_tuples: int = 1_000_000

    def __post_init__(self):
        if self.no_overlap_strategy not in STRATEGIES:
            raise ValueError(f"unknown no-overlap strategy {self.no_overlap_strategy!r}")
        if self.max_extension_tuples < 1:
            raise ValueError("max_extension_tuples must be >= 1")


@dataclass(frozen=True)
class LoweredInterval:
    """Flat terms of one interval; ``p`` is the constant 1 when mandatory."""

    s: Term
    e: Term
    l: Term
    sz: Term
    p: Term

    def attr(self, kind: str) -> Term:
        return {"start": self.s, "end": self.e, "length": self.l, "size": self.sz,
                "presence": self.p}[kind]


def _fx(t: Term) -> FExpr:
    return FVar(t) if isinstance(t, str) else FConst(t)


def guard(presences, phi) -> Intension:
    """``(p1 = 0) or ... or (pk = 0) or phi``; constant-1 presences are dropped."""
    if isinstance(phi, Intension):
        phi = phi.expr
    lits = [f_cmp("eq", _fx(p), 0) for p in presences if not (isinstance(p, int) and p == 1)]
    if not lits:
        return Intension(phi)
    return Intension(f_or(*lits, phi))


def _false() -> FExpr:
    return FOp("eq", (FConst(0), FConst(1)))


class Compiler:
    """One compilation of one model.  Use :func:`compile_model` normally."""

    def __init__(self, model: Model, opts: CompileOptions | None = None):
        self.model = model
        self.opts = opts or CompileOptions()
        self.flat = FlatModel()
        self.horizon = (self.opts.horizon_override if self.opts.horizon_override is not None
                        else model.horizon)
        self.lowered: dict[int, LoweredInterval] = {}
        self.int_names: dict[str, str] = {}
        self._memo: dict = {}
        self._timelines: dict[str, dict[int, str]] = {}
        self._seq_ranks: dict[str, list[str]] = {}
        self.flat.layout = {"intervals": {}, "sequences": {}, "ints": {}, "states": {},
                            "horizon": self.horizon}

    # --- variables -------------------------------------------------------

    def fresh(self, name: str, domain: Domain, boolean: bool = False) -> str:
        base, k = name, 1
        while name in self.flat.vars:
            k += 1
            name = f"{base}_{k}"
        return self.flat.add_var(name, domain, boolean)

    def domain_of(self, t: Term) -> Domain:
        if isinstance(t, int):
            return Domain.range(t, t)
        return self.flat.vars[t].domain

    def bounds(self, e: FExpr) -> tuple[int, int]:
        return fbounds(e, _BoundsView(self.flat))

    def define(self, name: str, frag: FExpr, domain: Domain | None = None) -> str:
        """Fresh variable equal to ``frag`` (posted unguarded)."""
        if domain is None:
            lo, hi = self.bounds(frag)
            domain = Domain.range(lo, hi)
        v = self.fresh(name, domain)
        self.flat.post(Intension(f_cmp("eq", FVar(v), frag)))
        return v

    def as_term(self, frag: FExpr, name: str = "aux") -> Term:
        if isinstance(frag, FConst):
            return frag.value
        if isinstance(frag, FVar):
            return frag.name
        return self.define(name, frag)

    # --- intervals -------------------------------------------------------

    def lower_interval(self, iv: IntervalVar) -> LoweredInterval:
        if id(iv) in self.lowered:
            return self.lowered[id(iv)]
        if iv.intensity is not None:
            low = self._lower_scaled(iv)
        else:
            low = self._lower_plain(iv)
        self.lowered[id(iv)] = low
        self.flat.layout["intervals"][iv.id] = {
            "s": low.s, "e": low.e, "l": low.l, "sz": low.sz, "p": low.p}
        return low

    def _presence(self, iv: IntervalVar) -> Term:
        if not iv.optional:
            return 1
        return self.fresh(f"{iv.id}_p", Domain.range(0, 1), boolean=True)

    def _lower_plain(self, iv: IntervalVar) -> LoweredInterval:
        s = self.fresh(f"{iv.id}_s", Domain.range(iv.start.lb, iv.start.ub))
        e = self.fresh(f"{iv.id}_e", Domain.range(iv.end.lb, iv.end.ub))
        p = self._presence(iv)
        if iv.size_var is not None:
            sz: Term = self.fresh(f"{iv.id}_sz", Domain.range(iv.size.lb, iv.size.ub))
        elif iv.size.fixed:
            sz = iv.size.lb
        else:
            sz = self.fresh(f"{iv.id}_sz", Domain.range(iv.size.lb, iv.size.ub))
        # without intensity the length is the size itself
        low = LoweredInterval(s, e, sz, sz, p)
        self.flat.post(Intension(f_cmp("eq", FVar(e), f_add(FVar(s), _fx(sz)))))
        if iv.size_var is not None:
            self.flat.post(guard([p], f_cmp("eq", FVar(sz), FVar(self.int_names[iv.size_var.id]))))
        return low

    def intensity_table(self, iv: IntervalVar) -> list[tuple[int, int, int]]:
        max_end = min(iv.end.ub, self.horizon)
        limit = self.opts.max_extension_tuples
        tuples = intensity_tuples(iv.intensity, iv.start.values(), iv.size.values(), max_end,
                                  limit=limit)
        if len(tuples) > limit:
            raise TupleExplosion(f"interval {iv.id}: more than {limit} intensity tuples")
        return [t for t in tuples if t[0] + t[2] >= iv.end.lb and t[2] in iv.length]

    def _lower_scaled(self, iv: IntervalVar) -> LoweredInterval:
        tuples = self.intensity_table(iv)
        p = None
        if not tuples:
            if not iv.optional:
                raise NoFeasibleTuple(f"interval {iv.id}: empty intensity table")
            s = self.fresh(f"{iv.id}_s", Domain.range(iv.start.lb, iv.start.ub))
            e = self.fresh(f"{iv.id}_e", Domain.range(iv.end.lb, iv.end.ub))
            p = self._presence(iv)
            sz = self.fresh(f"{iv.id}_sz", Domain.range(iv.size.lb, iv.size.ub))
            ln = self.fresh(f"{iv.id}_l", Domain.range(iv.length.lb, iv.length.ub))
            self.flat.post(Intension(f_cmp("eq", FVar(e), f_add(FVar(s), FVar(ln)))))
            self.flat.post(Intension(f_cmp("eq", FVar(p), 0)))
            return LoweredInterval(s, e, ln, sz, p)
        starts = sorted({t[0] for t in tuples})
        sizes = sorted({t[1] for t in tuples})
        lengths = sorted({t[2] for t in tuples})
        ends = sorted({t[0] + t[2] for t in tuples})
        s = self.fresh(f"{iv.id}_s", Domain.of_values(starts))
        e = self.fresh(f"{iv.id}_e", Domain.of_values(ends))
        p = self._presence(iv)
        sz: Term = sizes[0] if len(sizes) == 1 and iv.size_var is None else \
            self.fresh(f"{iv.id}_sz", Domain.of_values(sizes))
        ln: Term = lengths[0] if len(lengths) == 1 else \
            self.fresh(f"{iv.id}_l", Domain.of_values(lengths))
        self.flat.post(Intension(f_cmp("eq", FVar(e), f_add(FVar(s), _fx(ln)))))
        self.flat.post(self.compile_intensity_table(tuples, (s, sz, ln)))
        if iv.size_var is not None:
            self.flat.post(guard([p], f_cmp("eq", FVar(sz), FVar(self.int_names[iv.size_var.id]))))
        return LoweredInterval(s, e, ln, sz, p)

    @staticmethod
    def compile_intensity_table(tuples, terms) -> Extension:
        """Extension over the variable columns of (s, sz, l); constant columns are projected out."""
        cols = [i for i, t in enumerate(terms) if isinstance(t, str)]
        rows = sorted({tuple(tup[i] for i in cols) for tup in tuples
                       if all(isinstance(terms[i], str) or tup[i] == terms[i] for i in range(3))})
        return Extension(tuple(terms[i] for i in cols), tuple(rows))

    def low(self, iv: IntervalVar) -> LoweredInterval:
        return self.lowered[id(iv)]

    def pterm(self, iv: IntervalVar) -> Term:
        return self.low(iv).p

    def plit(self, iv: IntervalVar) -> FExpr:
        return f_bool(_fx(self.pterm(iv)))

    def attr(self, iv: IntervalVar, kind: str) -> FExpr:
        return _fx(self.low(iv).attr(kind))

    # --- sequences -------------------------------------------------------

    def lexless(self, seq: SequenceVar, j: int, i: int) -> FExpr:
        """Member j is ordered before member i by (start, end, position)."""
        a, b = self.low(seq.intervals[j]), self.low(seq.intervals[i])
        same_s = f_cmp("eq", _fx(a.s), _fx(b.s))
        parts = [f_cmp("lt", _fx(a.s), _fx(b.s)),
                 f_and(same_s, f_cmp("lt", _fx(a.e), _fx(b.e)))]
        if j < i:
            parts.append(f_and(same_s, f_cmp("eq", _fx(a.e), _fx(b.e))))
        return f_or(*parts)

    def ranks(self, seq: SequenceVar) -> list[str]:
        """Per-member rank among present members; absent members get len(seq)."""
        if seq.id in self._seq_ranks:
            return self._seq_ranks[seq.id]
        n = len(seq.intervals)
        names = []
        for i, x in enumerate(seq.intervals):
            before = [f_and(self.plit(y), self.lexless(seq, j, i))
                      for j, y in enumerate(seq.intervals) if j != i]
            rank = f_add(*before)
            p = _fx(self.pterm(x))
            frag = f_add(f_mul(p, rank), f_mul(f_sub(1, p), n))
            dom = Domain.range(0, n if x.optional else n - 1)
            names.append(self.define(f"{seq.id}_pos_{x.id}", frag, dom))
        self._seq_ranks[seq.id] = names
        self.flat.layout["sequences"][seq.id] = [x.id for x in seq.intervals]
        return names

    def seq_accessor(self, node: SeqAccessor) -> FExpr:
        seq, x = node.seq, node.interval
        key = ("seq", node.kind, seq.id, x.id, node.boundary_value, node.absent_value)
        if key in self._memo:
            return FVar(self._memo[key])
        pos = self.ranks(seq)
        me = seq.position(x)
        step = 1 if node.kind in NEXT_KINDS else -1
        attr = None if node.kind in ("next_arg", "prev_arg") else node.kind.split("_of_")[0]
        adj, vals, doms = [], [], []
        for j, y in enumerate(seq.intervals):
            if j == me:
                continue
            hit = f_and(self.plit(y), f_cmp("eq", FVar(pos[j]), f_add(FVar(pos[me]), step)))
            v = FConst(seq.types[j]) if attr is None else self.attr(y, attr)
            adj.append(hit)
            vals.append(f_mul(hit, v))
            doms.append(Domain.range(seq.types[j], seq.types[j]) if attr is None
                        else self.domain_of(self.low(y).attr(attr)))
        inner = f_add(*vals, f_mul(f_not(f_or(*adj)), node.boundary_value))
        p = _fx(self.pterm(x))
        frag = f_add(f_mul(p, inner), f_mul(f_sub(1, p), node.absent_value))
        ranges = [r for d in doms for r in d.ranges] + [(node.boundary_value,) * 2]
        if x.optional:
            ranges.append((node.absent_value,) * 2)
        name = self.define(f"{seq.id}_{node.kind}_{x.id}", frag, Domain(ranges))
        self._memo[key] = name
        return FVar(name)

    # --- expressions -----------------------------------------------------

    def compile_expr(self, node) -> FExpr:
        """Intension fragment for a scalar or Boolean expression."""
        from .expr import BoolExpr

        if isinstance(node, BoolExpr):
            return self.compile_bool(node)
        node = as_expr(node)
        if isinstance(node, Const):
            return FConst(node.value)
        if isinstance(node, IntVar):
            return FVar(self.int_names[node.id])
        if isinstance(node, Accessor):
            if node.kind == "presence":
                return _fx(self.pterm(node.interval))
            t = self.attr(node.interval, node.kind)
            if not node.interval.optional:
                return t
            p = _fx(self.pterm(node.interval))
            return f_add(f_mul(p, t), f_mul(f_sub(1, p), node.absent_value))
        if isinstance(node, SeqAccessor):
            return self.seq_accessor(node)
        if isinstance(node, Arith):
            args = [self.compile_expr(a) for a in node.args]
            if node.op == "add":
                return f_add(*args)
            if node.op == "sub":
                return f_sub(*args)
            if node.op == "mul":
                return f_mul(*args)
            if node.op in ("min", "max"):
                return f_minmax(node.op, *args)
            if node.op == "div" and all(isinstance(a, FConst) for a in args) and args[1].value:
                from .expr import trunc_div

                return FConst(trunc_div(args[0].value, args[1].value))
            return FOp(node.op, tuple(args))
        if isinstance(node, (Element, Element2D)):
            return self.compile_element(node)
        if isinstance(node, Aggregate):
            return self._aggregate(node)
        if isinstance(node, CumulHeight):
            iv = node.interval
            tau = self.attr(iv, "start" if node.kind == "height_at_start" else "end")
            prof = self.profile(node.cumul, tau)
            p = _fx(self.pterm(iv))
            return f_add(f_mul(p, prof), f_mul(f_sub(1, p), node.absent_value))
        if isinstance(node, BoolAsInt):
            return self.compile_bool(node.expr)
        raise UnsupportedConstraint(f"cannot compile expression {node!r}")

    def compile_bool(self, node) -> FExpr:
        if isinstance(node, BoolConst):
            return FConst(int(node.value))
        if isinstance(node, Cmp):
            return f_cmp(node.op, self.compile_expr(node.lhs), self.compile_expr(node.rhs))
        if isinstance(node, And):
            return f_and(*[self.compile_bool(a) for a in node.args])
        if isinstance(node, Or):
            return f_or(*[self.compile_bool(a) for a in node.args])
        if isinstance(node, Xor):
            return f_xor(*[self.compile_bool(a) for a in node.args])
        if isinstance(node, Not):
            return f_not(self.compile_bool(node.arg))
        if isinstance(node, PresenceLit):
            return self.plit(node.interval)
        raise UnsupportedConstraint(f"cannot compile Boolean expression {node!r}")

    def compile_element(self, node) -> FExpr:
        if isinstance(node, Element):
            table_obj = node.array
            idx_terms = [self.as_term(self.compile_expr(node.index), "idx")]
            valid = [table_obj.valid_indices()]
            size = [max(valid[0]) + 1]

            def look(ix):
                return table_obj.lookup(ix[0])
        else:
            table_obj = node.matrix
            idx_terms = [self.as_term(self.compile_expr(node.row), "idx"),
                         self.as_term(self.compile_expr(node.col), "idx")]
            valid = [table_obj.valid_rows(), table_obj.valid_cols()]
            size = [max(valid[0]) + 1, max(valid[1]) + 1]

            def look(ix):
                return table_obj.lookup(ix[0], ix[1])
        idx_values = []
        for t, ok in zip(idx_terms, valid):
            vals = list(self.domain_of(t))
            bad = [v for v in vals if v not in ok]
            if bad:
                raise IndexDomainExceedsTable(
                    f"index values {bad[:5]} fall outside the table's valid indices")
            idx_values.append(vals)
        if all(isinstance(t, int) for t in idx_terms):
            return FConst(look(tuple(idx_terms)))
        filler = 0
        if len(size) == 1:
            table: tuple = tuple(look((i,)) if i in valid[0] else filler for i in range(size[0]))
            results = {look((i,)) for i in idx_values[0]}
        else:
            table = tuple(tuple(look((i, j)) if i in valid[0] and j in valid[1] else filler
                                for j in range(size[1])) for i in range(size[0]))
            results = {look((i, j)) for i in idx_values[0] for j in idx_values[1]}
        res = self.fresh("elem", Domain.of_values(results))
        self.flat.post(ElementCtr(table, tuple(idx_terms), res))
        return FVar(res)

    def _aggregate(self, node: Aggregate) -> FExpr:
        ivs = node.intervals
        ps = [_fx(self.pterm(iv)) for iv in ivs]
        if node.kind == "count_present":
            return f_add(*ps)
        any_p = f_or(*[self.plit(iv) for iv in ivs])

        def low_start():
            big = max(self.domain_of(self.low(iv).s).ub for iv in ivs) + 1
            return f_minmax("min", *[f_add(f_mul(p, self.attr(iv, "start")), f_mul(f_sub(1, p), big))
                                     for iv, p in zip(ivs, ps)])

        def high_end():
            small = min(self.domain_of(self.low(iv).e).lb for iv in ivs) - 1
            return f_minmax("max", *[f_add(f_mul(p, self.attr(iv, "end")), f_mul(f_sub(1, p), small))
                                     for iv, p in zip(ivs, ps)])

        if node.kind == "earliest_start":
            core = low_start() if any(iv.optional for iv in ivs) else \
                f_minmax("min", *[self.attr(iv, "start") for iv in ivs])
        elif node.kind in ("latest_end", "makespan"):
            core = high_end() if any(iv.optional for iv in ivs) else \
                f_minmax("max", *[self.attr(iv, "end") for iv in ivs])
        else:
            if any(iv.optional for iv in ivs):
                core = f_sub(high_end(), low_start())
            else:
                core = f_sub(f_minmax("max", *[self.attr(iv, "end") for iv in ivs]),
                             f_minmax("min", *[self.attr(iv, "start") for iv in ivs]))
        if isinstance(any_p, FConst) and any_p.value == 1:
            return core
        return f_add(f_mul(any_p, core), f_mul(f_not(any_p), node.empty_value))

    # --- cumulative functions --------------------------------------------

    def contribution(self, term, tau: FExpr) -> FExpr:
        if isinstance(term, StepAt):
            return f_mul(term.height, f_cmp("le", term.time, tau))
        iv = term.interval
        if isinstance(term, Pulse):
            cond = f_and(self.plit(iv), f_cmp("le", self.attr(iv, "start"), tau),
                         f_cmp("lt", tau, self.attr(iv, "end")))
        elif isinstance(term, StepAtStart):
            cond = f_and(self.plit(iv), f_cmp("le", self.attr(iv, "start"), tau))
        else:
            cond = f_and(self.plit(iv), f_cmp("le", self.attr(iv, "end"), tau))
        return f_mul(term.height, cond)

    def profile(self, cumul: CumulExpr, tau: FExpr) -> FExpr:
        return f_add(*[self.contribution(t, tau) for t in cumul.terms if t.height != 0])

    def _height_term(self, iv: IntervalVar, h: int) -> Term:
        p = self.pterm(iv)
        if isinstance(p, int):
            return h * p
        if h == 1:
            return p
        key = ("height", iv.id, h)
        if key not in self._memo:
            self._memo[key] = self.define(f"{iv.id}_h", f_mul(h, FVar(p)), Domain.of_values((0, h)))
        return self._memo[key]

    def compile_cumulative(self, rec: CumulBound, intension_only: bool = False
                           ) -> list[FlatConstraint]:
        cumul = rec.cumul
        terms = [t for t in cumul.terms if t.height != 0]
        lo_free = rec.lo <= cumul.min_possible()
        hi_free = rec.hi >= cumul.max_possible()
        if lo_free and hi_free:
            return []
        pulses_only = all(isinstance(t, Pulse) for t in terms)
        in_horizon = all(t.interval.start.lb >= 0 and t.interval.end.ub <= self.horizon
                         for t in terms if isinstance(t, Pulse))
        if (pulses_only and terms and rec.window is None and lo_free and in_horizon
                and not intension_only):
            return [Cumulative(tuple(self.low(t.interval).s for t in terms),
                               tuple(self.low(t.interval).l for t in terms),
                               tuple(self._height_term(t.interval, t.height) for t in terms),
                               rec.hi)]
        return self._decompose_cumul(rec, terms, lo_free, hi_free)

    def _decompose_cumul(self, rec, terms, lo_free, hi_free) -> list[FlatConstraint]:
        H = self.horizon
        window = rec.window
        wp: list[Term] = []
        if window is None:
            w_lo, w_hi = FConst(0), FConst(H)
        elif isinstance(window, IntervalVar):
            w = self.low(window)
            wp = [w.p]
            w_lo = f_minmax("max", _fx(w.s), 0)
            w_hi = f_minmax("min", _fx(w.e), H)
        else:
            w_lo, w_hi = FConst(max(0, window[0])), FConst(min(H, window[1]))
        # the profile changes only at events; rising events matter for the
        # upper bound, falling ones for the lower bound
        events: list[tuple[list[Term], FExpr]] = [(wp, w_lo)]
        for t in terms:
            rising = t.height > 0
            if isinstance(t, StepAt):
                if (rising and not hi_free) or (not rising and not lo_free):
                    events.append(([], FConst(t.time)))
                continue
            low = self.low(t.interval)
            if isinstance(t, Pulse):
                if not hi_free:
                    events.append(([low.p], _fx(low.s)))
                if not lo_free:
                    events.append(([low.p], _fx(low.e)))
            else:
                when = _fx(low.s if isinstance(t, StepAtStart) else low.e)
                if (rising and not hi_free) or (not rising and not lo_free):
                    events.append(([low.p], when))
        out: list[FlatConstraint] = []
        seen = set()
        for pres, tau in events:
            key = (tuple(pres), tau)
            if key in seen:
                continue
            seen.add(key)
            prof = self.profile(rec.cumul, tau)
            ok = f_and(FConst(1) if lo_free else f_cmp("le", rec.lo, prof),
                       FConst(1) if hi_free else f_cmp("le", prof, rec.hi))
            outside = f_or(f_cmp("lt", tau, w_lo), f_cmp("ge", tau, w_hi))
            self._emit(out, pres + wp, f_or(outside, ok))
        return out

    # --- state functions -------------------------------------------------

    def state_term(self, func: StateFunction, t: int) -> FExpr:
        if not 0 <= t <= self.horizon:
            return FConst(func.none_value)
        tl = self._timelines.get(func.id)
        if tl is None:
            dom = Domain.range(func.none_value, func.state_domain.ub)
            tl = {k: self.fresh(f"{func.id}_t{k}", dom) for k in range(self.horizon + 1)}
            self._timelines[func.id] = tl
            self.flat.layout["states"][func.id] = {"none": func.none_value,
                                                   "vars": [tl[k] for k in sorted(tl)]}
        return FVar(tl[t])

    def compile_state(self, rec: StateConstraint) -> list[FlatConstraint]:
        iv, f = rec.interval, rec.func
        low = self.low(iv)
        s, e = _fx(low.s), _fx(low.e)
        sdom, edom = self.domain_of(low.s), self.domain_of(low.e)
        out: list[FlatConstraint] = []
        self.state_term(f, 0)
        kind = rec.kind
        if kind == "sets_state":
            before, after = rec.args
            for t in sdom:
                self._emit(out, [low.p], f_or(f_cmp("ne", s, t),
                                              f_cmp("eq", self.state_term(f, t), before)))
            for t in edom:
                self._emit(out, [low.p], f_or(f_cmp("ne", e, t),
                                              f_cmp("eq", self.state_term(f, t), after)))
            return out
        last = edom.ub - (2 if kind == "always_constant" else 1)
        for t in range(sdom.lb, last + 1):
            st = self.state_term(f, t)
            if kind in ("always_equal", "requires_state"):
                cond = f_cmp("eq", st, rec.args[0])
            elif kind == "always_in":
                cond = f_and(f_cmp("ge", st, rec.args[0]), f_cmp("le", st, rec.args[1]))
            elif kind == "always_no_state":
                cond = f_cmp("eq", st, f.none_value)
            else:
                cond = f_cmp("eq", st, self.state_term(f, t + 1))
            end_cut = t + 1 if kind == "always_constant" else t
            self._emit(out, [low.p], f_or(f_cmp("gt", s, t), f_cmp("le", e, end_cut), cond))
        return out

    # --- records ---------------------------------------------------------

    def _emit(self, out: list, presences, phi: FExpr) -> None:
        c = guard(presences, phi)
        if isinstance(c.expr, FConst):
            if c.expr.value:
                return
            c = Intension(_false())
        out.append(c)

    def compile_no_overlap(self, ivs, types, transitions, is_direct=False, seq=None,
                           intension_only=False) -> list[FlatConstraint]:
        strategy = self.opts.no_overlap_strategy
        lows = [self.low(iv) for iv in ivs]
        has_trans = transitions is not None
        no_zero = all(iv.length.lb >= 1 for iv in ivs)
        if strategy == "unary_cumulative" and not intension_only:
            if has_trans:
                raise StrategyUnsupported("unary_cumulative cannot express transition times")
            if not no_zero:
                raise StrategyUnsupported("unary_cumulative needs lengths >= 1")
            return [Cumulative(tuple(lo.s for lo in lows), tuple(lo.l for lo in lows),
                               tuple(lo.p for lo in lows), 1)]
        if (strategy == "auto" and not intension_only and not has_trans and no_zero
                and all(not iv.optional for iv in ivs)):
            return [NoOverlap(tuple(lo.s for lo in lows), tuple(lo.l for lo in lows))]
        out: list[FlatConstraint] = []
        gaps = has_trans and not is_direct
        for i in range(len(ivs)):
            for j in range(i + 1, len(ivs)):
                a, b = lows[i], lows[j]
                dij = transitions[types[i]][types[j]] if gaps else 0
                dji = transitions[types[j]][types[i]] if gaps else 0
                self._emit(out, [a.p, b.p], f_or(
                    f_cmp("le", f_add(_fx(a.e), dij), _fx(b.s)),
                    f_cmp("le", f_add(_fx(b.e), dji), _fx(a.s))))
        if has_trans and is_direct:
            pos = self.ranks(seq)
            for i in range(len(ivs)):
                for j in range(len(ivs)):
                    d = transitions[types[i]][types[j]]
                    if i == j or d == 0:
                        continue
                    a, b = lows[i], lows[j]
                    self._emit(out, [a.p, b.p], f_or(
                        f_cmp("ne", FVar(pos[j]), f_add(FVar(pos[i]), 1)),
                        f_cmp("le", f_add(_fx(a.e), d), _fx(b.s))))
        return out

    def compile_seq_no_overlap(self, rec: SeqNoOverlap, intension_only=False):
        return self.compile_no_overlap(rec.seq.intervals, rec.seq.types, rec.transitions,
                                       rec.is_direct, rec.seq, intension_only)

    def compile_constraint(self, rec: Constraint, intension_only: bool = False
                           ) -> list[FlatConstraint]:
        out: list[FlatConstraint] = []
        if isinstance(rec, Precedence):
            (x, xa), op, (y, ya) = rec.sides()
            self._emit(out, [self.pterm(rec.a), self.pterm(rec.b)],
                       f_cmp(op, self.attr(x, xa), f_add(self.attr(y, ya), rec.delay)))
        elif isinstance(rec, Span):
            m = self.low(rec.main)
            self._emit(out, [], f_cmp("eq", f_bool(_fx(m.p)),
                                      f_or(*[self.plit(x) for x in rec.subs])))
            for x in rec.subs:
                self._emit(out, [self.pterm(x)], f_and(
                    f_cmp("le", _fx(m.s), self.attr(x, "start")),
                    f_cmp("le", self.attr(x, "end"), _fx(m.e))))
            self._emit(out, [m.p], f_or(*[f_and(self.plit(x), f_cmp("eq", self.attr(x, "start"),
                                                                      _fx(m.s))) for x in rec.subs]))
            self._emit(out, [m.p], f_or(*[f_and(self.plit(x), f_cmp("eq", self.attr(x, "end"),
                                                                      _fx(m.e))) for x in rec.subs]))
        elif isinstance(rec, Alternative):
            m = self.low(rec.main)
            self._emit(out, [], f_cmp("eq", f_add(*[_fx(self.pterm(x)) for x in rec.alts]),
                                      f_mul(rec.cardinality, _fx(m.p))))
            for x in rec.alts:
                self._emit(out, [self.pterm(x)], f_and(
                    f_cmp("eq", self.attr(x, "start"), _fx(m.s)),
                    f_cmp("eq", self.attr(x, "end"), _fx(m.e))))
        elif isinstance(rec, Synchronize):
            m = self.low(rec.main)
            for x in rec.ivs:
                self._emit(out, [m.p, self.pterm(x)], f_and(
                    f_cmp("eq", self.attr(x, "start"), _fx(m.s)),
                    f_cmp("eq", self.attr(x, "end"), _fx(m.e))))
        elif isinstance(rec, SeqNoOverlap):
            out.extend(self.compile_seq_no_overlap(rec, intension_only))
        elif isinstance(rec, SequenceOrder):
            self._sequence_order(rec, out)
        elif isinstance(rec, SameSequence):
            self._same_sequence(rec, out)
        elif isinstance(rec, CumulBound):
            out.extend(self.compile_cumulative(rec, intension_only))
        elif isinstance(rec, StateConstraint):
            out.extend(self.compile_state(rec))
        elif isinstance(rec, Forbid):
            s, e = self.attr(rec.interval, "start"), self.attr(rec.interval, "end")
            for a, b in rec.periods:
                if rec.kind == "forbid_start":
                    phi = f_or(f_cmp("lt", s, a), f_cmp("ge", s, b))
                elif rec.kind == "forbid_end":
                    phi = f_or(f_cmp("le", e, a), f_cmp("gt", e, b))
                else:
                    phi = f_or(f_cmp("le", e, a), f_cmp("ge", s, b))
                self._emit(out, [self.pterm(rec.interval)], phi)
        elif isinstance(rec, PresenceConstraint):
            self._presence_rec(rec, out)
        elif isinstance(rec, IfPresentThen):
            inner = self.compile_constraint(rec.inner, intension_only=True)
            p = self.pterm(rec.interval)
            for c in inner:
                self._emit(out, [p], c.expr)
        elif isinstance(rec, OverlapConstraint):
            a_b = rec.ivs
            if rec.kind in ("must_overlap", "overlap_at_least"):
                a, b = a_b
                sa, ea, sb, eb = (self.attr(a, "start"), self.attr(a, "end"),
                                  self.attr(b, "start"), self.attr(b, "end"))
                if rec.kind == "must_overlap":
                    phi = f_and(f_cmp("lt", sa, eb), f_cmp("lt", sb, ea))
                else:
                    phi = f_cmp("ge", f_sub(f_minmax("min", ea, eb), f_minmax("max", sa, sb)),
                                rec.min_overlap)
                self._emit(out, [self.pterm(a), self.pterm(b)], phi)
            else:
                types = rec.types or tuple(range(len(a_b)))
                out.extend(self.compile_no_overlap(a_b, types, rec.transitions,
                                                   intension_only=intension_only))
        elif isinstance(rec, Chain):
            for (x, y), d in zip(zip(rec.ivs, rec.ivs[1:]), rec.delays):
                lhs = f_add(self.attr(x, "end"), d)
                self._emit(out, [self.pterm(x), self.pterm(y)],
                           f_cmp("eq" if rec.strict else "le", lhs, self.attr(y, "start")))
        elif isinstance(rec, Bounds):
            s, e = self.attr(rec.interval, "start"), self.attr(rec.interval, "end")
            if rec.kind == "release_date":
                phi = f_cmp("ge", s, rec.t1)
            elif rec.kind == "deadline":
                phi = f_cmp("le", e, rec.t1)
            else:
                phi = f_and(f_cmp("ge", s, rec.t1), f_cmp("le", e, rec.t2))
            self._emit(out, [self.pterm(rec.interval)], phi)
        elif isinstance(rec, ExprConstraint):
            self._emit(out, [], self.compile_bool(rec.expr))
        else:
            raise UnsupportedConstraint(f"no lowering for {type(rec).__name__}")
        return out

    def _sequence_order(self, rec: SequenceOrder, out: list) -> None:
        a, b = rec.a, rec.b
        others = [x for x in rec.seq.intervals if x is not a and x is not b]
        pa = self.pterm(a)
        if rec.kind == "first":
            for x in others:
                self._emit(out, [pa, self.pterm(x)],
                           f_cmp("le", self.attr(a, "start"), self.attr(x, "start")))
            return
        if rec.kind == "last":
            for x in others:
                self._emit(out, [pa, self.pterm(x)],
                           f_cmp("ge", self.attr(a, "end"), self.attr(x, "end")))
            return
        pb = self.pterm(b)
        self._emit(out, [pa, pb], f_cmp("le", self.attr(a, "end"), self.attr(b, "start")))
        if rec.kind == "previous":
            for x in others:
                self._emit(out, [pa, pb, self.pterm(x)], f_not(f_and(
                    f_cmp("le", self.attr(a, "end"), self.attr(x, "start")),
                    f_cmp("le", self.attr(x, "end"), self.attr(b, "start")))))

    def _same_sequence(self, rec: SameSequence, out: list) -> None:
        common = rec.common()
        s1, s2 = rec.seq1, rec.seq2
        if rec.kind == "same_sequence":
            r1, r2 = self.ranks(s1), self.ranks(s2)
            for x in common:
                i1, i2 = s1.position(x), s2.position(x)
                self._emit(out, [self.pterm(x)], f_cmp("eq", FVar(r1[i1]), FVar(r2[i2])))
            return
        for k, x in enumerate(common):
            for y in common[k + 1:]:
                a = self.lexless(s1, s1.position(x), s1.position(y))
                b = self.lexless(s2, s2.position(x), s2.position(y))
                if a == b:
                    continue
                self._emit(out, [self.pterm(x), self.pterm(y)], f_cmp("eq", a, b))

    def _presence_rec(self, rec: PresenceConstraint, out: list) -> None:
        ps = [_fx(self.pterm(x)) for x in rec.ivs]
        kind = rec.kind
        if kind == "presence_implies":
            phi = f_or(f_cmp("eq", ps[0], 0), f_cmp("eq", ps[1], 1))
        elif kind == "presence_or":
            phi = f_or(f_cmp("eq", ps[0], 1), f_cmp("eq", ps[1], 1))
        elif kind == "presence_xor":
            phi = f_cmp("ne", ps[0], ps[1])
        elif kind == "all_present_or_all_absent":
            phi = f_and(*[f_cmp("eq", ps[0], p) for p in ps[1:]])
        elif kind == "presence_or_all":
            phi = f_cmp("ge", f_add(*ps), 1)
        elif kind == "at_least_k_present":
            phi = f_cmp("ge", f_add(*ps), rec.k)
        elif kind == "at_most_k_present":
            phi = f_cmp("le", f_add(*ps), rec.k)
        else:
            phi = f_cmp("eq", f_add(*ps), rec.k)
        self._emit(out, [], phi)

    # --- driver ----------------------------------------------------------

    def run(self) -> FlatModel:
        m = self.model
        for x in m.int_vars:
            self.int_names[x.id] = self.fresh(x.id, Domain.range(x.lb, x.ub))
            self.flat.layout["ints"][x.id] = self.int_names[x.id]
        for iv in m.intervals:
            self.lower_interval(iv)
        for rec in m.constraints:
            for c in self.compile_constraint(rec):
                self.flat.post(c)
        if m.objective is not None:
            frag = self.compile_expr(m.objective.expr)
            if isinstance(frag, FVar):
                var = frag.name
            else:
                var = self.define("obj", frag)
            self.flat.objective = FlatObjective(m.objective.sense, var)
        for seq in m.sequences:
            self.flat.layout["sequences"].setdefault(seq.id, [x.id for x in seq.intervals])
        return self.flat


class _BoundsView:
    """Mapping adapter exposing (lb, ub) of flat variables."""

    def __init__(self, flat: FlatModel):
        self.flat = flat

    def __getitem__(self, name: str) -> tuple[int, int]:
        d = self.flat.vars[name].domain
        return d.lb, d.ub


def compile_model(model: Model, opts: CompileOptions | None = None) -> FlatModel:
    """Lower ``model`` to a :class:`FlatModel` (pure and deterministic)."""
    return Compiler(model, opts).run()


# --- decoding ------------------------------------------------------------


def _val(t: Term, asn) -> int:
    return asn[t] if isinstance(t, str) else t


def decode(flat: FlatModel, asn: dict[str, int]) -> dict:
    """Interval values, sequence orders, int vars and state timelines of ``asn``."""
    lay = flat.layout
    if not lay:
        return {}
    ivs = {}
    for name, t in lay["intervals"].items():
        ivs[name] = {"present": bool(_val(t["p"], asn)), "start": _val(t["s"], asn),
                     "end": _val(t["e"], asn), "size": _val(t["sz"], asn),
                     "length": _val(t["l"], asn)}
    seqs = {}
    for sid, members in lay["sequences"].items():
        keyed = sorted((ivs[x]["start"], ivs[x]["end"], k, x)
                       for k, x in enumerate(members) if ivs[x]["present"])
        seqs[sid] = [k[3] for k in keyed]
    states = {}
    for fid, st in lay["states"].items():
        states[fid] = {t: (None if asn[v] == st["none"] else asn[v])
                       for t, v in enumerate(st["vars"])}
    ints = {x: asn[v] for x, v in lay["ints"].items()}
    return {"intervals": ivs, "sequences": seqs, "ints": ints, "states": states}


def to_assignment(decoded: dict) -> Assignment:
    return Assignment(
        {k: IntervalValue(v["present"], v["start"], v["end"], v["size"], v["length"])
         for k, v in decoded["intervals"].items()},
        dict(decoded["ints"]),
        {f: dict(tl) for f, tl in decoded["states"].items()})


def solution_key(decoded: dict) -> tuple:
    """Presence-aware fingerprint: absent intervals contribute only their absence."""
    ivs = tuple(sorted(
        (k, True, v["start"], v["end"], v["size"], v["length"]) if v["present"] else (k, False)
        for k, v in decoded["intervals"].items()))
    ints = tuple(sorted(decoded["ints"].items()))
    states = tuple(sorted((f, tuple(sorted(tl.items(), key=lambda kv: kv[0])))
                          for f, tl in decoded["states"].items()))
    return ivs, ints, states


def encode(flat: FlatModel, asn: Assignment) -> dict[str, int]:
    """Flat values of the primary variables (interval attributes, int vars, timelines)."""
    lay = flat.layout
    out: dict[str, int] = {}
    for name, t in lay["intervals"].items():
        v = asn.intervals[name]
        for key, val in (("s", v.start), ("e", v.end), ("l", v.length), ("sz", v.size),
                         ("p", int(v.present))):
            if isinstance(t[key], str):
                out[t[key]] = val
    for x, var in lay["ints"].items():
        out[var] = asn.ints[x]
    for fid, st in lay["states"].items():
        tl = asn.states.get(fid, {})
        for k, var in enumerate(st["vars"]):
            v = tl.get(k)
            out[var] = st["none"] if v is None else v
    return out


__all__ = [
    "CompileOptions", "Compiler", "LoweredInterval", "STRATEGIES", "compile_model", "decode",
    "encode", "guard", "solution_key", "to_assignment", "CompileError",
]
