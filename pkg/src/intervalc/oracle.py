"""Brute-force semantic oracle over scheduling models.

Enumerates every well-formed assignment of interval attributes, int vars
and state timelines, and keeps those accepted by the constraint records'
defining formulas.  Only meant for desk-scale models.
"""

from __future__ import annotations

import itertools

from .constraints import interval_well_formed, model_holds
from .errors import SearchSpaceTooLarge
from .expr import Assignment, IntervalValue
from .model import IntervalVar, Model, intensity_tuples


def interval_values(iv: IntervalVar, horizon: int | None = None) -> list[IntervalValue]:
    """Every value the interval can take on its own, absent first."""
    out = [IntervalValue(False)] if iv.optional else []
    if iv.intensity is not None:
        max_end = iv.end.ub if horizon is None else min(iv.end.ub, horizon)
        combos = [(s, z, ln) for s, z, ln in intensity_tuples(
            iv.intensity, iv.start.values(), iv.size.values(), max_end)]
    else:
        combos = [(s, z, z) for s in iv.start.values() for z in iv.size.values()]
    for s, z, ln in combos:
        v = IntervalValue(True, s, s + ln, z, ln)
        if interval_well_formed(iv, v):
            out.append(v)
    return out


def assignments(model: Model, cap: int = 2_000_000):
    """Yield every candidate Assignment (well-formed per interval)."""
    h = model.horizon
    per_iv = [interval_values(iv, h) for iv in model.intervals]
    per_int = [range(x.lb, x.ub + 1) for x in model.int_vars]
    per_state = []
    for f in model.state_functions:
        choices = [None] + list(f.state_domain.values())
        per_state.append(list(itertools.product(choices, repeat=h + 1)))
    space = 1
    for d in per_iv + per_int + per_state:
        space *= max(1, len(d))
    if space > cap:
        raise SearchSpaceTooLarge(f"oracle space {space} exceeds cap {cap}")
    ids = [iv.id for iv in model.intervals]
    int_ids = [x.id for x in model.int_vars]
    f_ids = [f.id for f in model.state_functions]
    for ivals in itertools.product(*per_iv):
        for ints in itertools.product(*per_int):
            for sts in itertools.product(*per_state):
                yield Assignment(dict(zip(ids, ivals)), dict(zip(int_ids, ints)),
                                 {f: dict(enumerate(tl)) for f, tl in zip(f_ids, sts)})


def assignment_key(model: Model, asn: Assignment) -> tuple:
    """Same fingerprint as :func:`intervalc.compiler.solution_key`."""
    ivs = tuple(sorted(
        (k, True, v.start, v.end, v.size, v.length) if v.present else (k, False)
        for k, v in asn.intervals.items()))
    ints = tuple(sorted(asn.ints.items()))
    states = tuple(sorted((f, tuple(sorted(tl.items(), key=lambda kv: kv[0])))
                          for f, tl in asn.states.items()))
    return ivs, ints, states


def solutions(model: Model, cap: int = 2_000_000) -> set[tuple]:
    """Fingerprints of all assignments accepted by the model."""
    return {assignment_key(model, a) for a in assignments(model, cap) if model_holds(model, a)}


def optimum(model: Model, cap: int = 2_000_000) -> int | None:
    """Best objective value over the oracle's feasible set (None if infeasible)."""
    from .expr import eval_scalar

    best = None
    obj = model.objective
    for a in assignments(model, cap):
        if not model_holds(model, a):
            continue
        v = eval_scalar(obj.expr, a)
        if best is None or (v < best if obj.sense == "minimize" else v > best):
            best = v
    return best
