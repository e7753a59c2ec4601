"""Bundled model families and their instance files.

Each family has two formulations of the same problem:

* a scheduling model built from interval and sequence variables, which goes
  through the compiler;
* a classical model written directly as a flat integer CSP, the way it
  would be hand-encoded without scheduling abstractions.

Instance files are JSON with ``"schema": 1`` and a ``"family"`` tag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import constraints as C
from .errors import ParseError
from .expr import CumulExpr, end_of, makespan, pulse
from .flat import (
    Cumulative,
    Domain,
    ElementCtr,
    FlatModel,
    FlatObjective,
    FVar,
    Intension,
    NoOverlap,
    f_add,
    f_cmp,
    f_minmax,
    f_or,
)
from .model import Model

FAMILIES = ("jobshop", "flowshop", "rcpsp", "flexible-jobshop")
SCHEMA = 1


@dataclass(frozen=True)
class Instance:
    family: str
    name: str
    data: dict


# --- loading and validation ---------------------------------------------


def _int_matrix(data, key, ragged=False) -> list[list[int]]:
    rows = data.get(key)
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{key!r} must be a non-empty list of lists")
    if not ragged and len({len(r) for r in rows}) != 1:
        raise ParseError(f"{key!r} must be rectangular")
    for r in rows:
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in r):
            raise ParseError(f"{key!r} must hold integers")
    return rows


def _check_family(family: str, data: dict) -> None:
    if family in ("jobshop", "flowshop"):
        durs = _int_matrix(data, "durations")
        if any(v < 0 for r in durs for v in r):
            raise ParseError("durations must be >= 0")
        if family == "jobshop":
            mach = _int_matrix(data, "machines")
            if [len(r) for r in mach] != [len(r) for r in durs]:
                raise ParseError("machines and durations must have the same shape")
            for r in mach:
                if sorted(r) != list(range(len(r))):
                    raise ParseError("each job must visit every machine exactly once")
    elif family == "rcpsp":
        durs = data.get("durations")
        if not isinstance(durs, list) or not durs or any(
                not isinstance(d, int) or d < 0 for d in durs):
            raise ParseError("'durations' must be a non-empty list of integers >= 0")
        caps = data.get("capacities")
        if not isinstance(caps, list) or any(not isinstance(c, int) or c < 0 for c in caps):
            raise ParseError("'capacities' must be a list of integers >= 0")
        req = _int_matrix(data, "requests")
        if len(req) != len(durs) or any(len(r) != len(caps) for r in req):
            raise ParseError("'requests' must be tasks x resources")
        if any(v < 0 for r in req for v in r):
            raise ParseError("requests must be >= 0")
        for pair in data.get("precedences", []):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) and 0 <= v < len(durs) for v in pair)):
                raise ParseError(f"bad precedence pair {pair!r}")
    elif family == "flexible-jobshop":
        durs = _int_matrix(data, "durations")
        n_mach = len(durs[0])
        for r in durs:
            if all(v < 0 for v in r):
                raise ParseError("every operation needs an eligible machine (duration >= 0)")
        types = data.get("types", [0] * len(durs))
        if len(types) != len(durs) or any(not isinstance(t, int) or t < 0 for t in types):
            raise ParseError("'types' must hold one non-negative integer per operation")
        setup = data.get("setup")
        if setup is not None:
            if not isinstance(setup, list) or len(setup) != n_mach:
                raise ParseError("'setup' must hold one matrix per machine")
            side = max(types) + 1
            for mat in setup:
                rows = _int_matrix({"m": mat}, "m")
                if len(rows) != side or len(rows[0]) != side:
                    raise ParseError(f"setup matrices must be {side}x{side}")
        for pair in data.get("precedences", []):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) and 0 <= v < len(durs) for v in pair)):
                raise ParseError(f"bad precedence pair {pair!r}")
    else:
        raise ParseError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def parse_instance(text: str, name: str = "instance") -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ParseError(f"unsupported schema {data.get('schema')!r}; expected {SCHEMA}")
    family = data.get("family")
    _check_family(family, data)
    return Instance(family, str(data.get("name", name)), data)


def load_instance(path) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, path.stem)


def bundled_paths() -> list[Path]:
    root = resources.files("intervalc") / "instances"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def bundled() -> list[Instance]:
    return [load_instance(p) for p in bundled_paths()]


# --- shared helpers -----------------------------------------------------


def _shop(inst: Instance) -> tuple[list[list[int]], list[list[int]]]:
    durs = inst.data["durations"]
    if inst.family == "flowshop":
        mach = [list(range(len(r))) for r in durs]
    else:
        mach = inst.data["machines"]
    return durs, mach


def horizon(inst: Instance) -> int:
    d = inst.data
    if inst.family in ("jobshop", "flowshop"):
        return sum(sum(r) for r in d["durations"])
    if inst.family == "rcpsp":
        return sum(d["durations"])
    setup = d.get("setup")
    worst_setup = max((v for m in setup for r in m for v in r), default=0) if setup else 0
    return sum(max(r) + worst_setup for r in d["durations"])


# --- scheduling formulations ---------------------------------------------


def _shop_model(inst: Instance) -> Model:
    durs, mach = _shop(inst)
    h = horizon(inst)
    m = Model(inst.name, horizon=h)
    ops = [[m.interval(f"j{j}_o{k}", start=(0, h - d), size=d) for k, d in enumerate(row)]
           for j, row in enumerate(durs)]
    for row in ops:
        m.add(C.end_before_start(a, b) for a, b in zip(row, row[1:]))
    n_mach = len(durs[0])
    for r in range(n_mach):
        on = [ops[j][k] for j in range(len(ops)) for k in range(len(ops[j])) if mach[j][k] == r]
        m.add(C.seq_no_overlap(m.sequence(f"m{r}", on)))
    m.minimize(makespan([row[-1] for row in ops]))
    return m


def _rcpsp_model(inst: Instance) -> Model:
    d = inst.data
    h = horizon(inst)
    m = Model(inst.name, horizon=h)
    x = [m.interval(f"x{i}", start=(0, h - dur), size=dur) for i, dur in enumerate(d["durations"])]
    m.add(C.end_before_start(x[i], x[j]) for i, j in d.get("precedences", []))
    for k, cap in enumerate(d["capacities"]):
        cumul = CumulExpr()
        for i, row in enumerate(d["requests"]):
            if row[k] > 0:
                cumul = cumul + pulse(x[i], row[k])
        if cumul.terms:
            m.add(cumul <= cap)
    m.minimize(end_of(x[-1]))
    return m


def _fjs_model(inst: Instance) -> Model:
    d = inst.data
    durs = d["durations"]
    types = d.get("types", [0] * len(durs))
    setup = d.get("setup")
    h = horizon(inst)
    n_mach = len(durs[0])
    m = Model(inst.name, horizon=h)
    op = []
    modes: list[dict[int, object]] = []
    for i, row in enumerate(durs):
        eligible = [v for v in row if v >= 0]
        op.append(m.interval(f"op{i}", start=(0, h - min(eligible)),
                             size=(min(eligible), max(eligible))))
        modes.append({r: m.interval(f"op{i}_m{r}", start=(0, h - dur), size=dur, optional=True)
                      for r, dur in enumerate(row) if dur >= 0})
    m.add(C.alternative(op[i], list(modes[i].values())) for i in range(len(durs)))
    for r in range(n_mach):
        on = [i for i in range(len(durs)) if r in modes[i]]
        if len(on) < 2:
            continue
        seq = m.sequence(f"m{r}", [modes[i][r] for i in on], [types[i] for i in on])
        m.add(C.seq_no_overlap(seq, setup[r] if setup else None))
    m.add(C.end_before_start(op[i], op[j]) for i, j in d.get("precedences", []))
    m.minimize(makespan(op))
    return m


def scheduling_model(inst: Instance) -> Model:
    return {"jobshop": _shop_model, "flowshop": _shop_model, "rcpsp": _rcpsp_model,
            "flexible-jobshop": _fjs_model}[inst.family](inst)


# --- classical (hand-flattened) formulations -----------------------------


def _v(name):
    return FVar(name)


def _classical_shop(inst: Instance) -> FlatModel:
    durs, mach = _shop(inst)
    h = horizon(inst)
    f = FlatModel()
    s = [[f.add_var(f"s_{j}_{k}", Domain.range(0, h - dur)) for k, dur in enumerate(row)]
         for j, row in enumerate(durs)]
    for j, row in enumerate(durs):
        for k in range(len(row) - 1):
            f.post(Intension(f_cmp("le", f_add(_v(s[j][k]), row[k]), _v(s[j][k + 1]))))
    for r in range(len(durs[0])):
        cells = [(j, k) for j in range(len(durs)) for k in range(len(durs[j])) if mach[j][k] == r]
        if all(durs[j][k] > 0 for j, k in cells):
            f.post(NoOverlap(tuple(s[j][k] for j, k in cells), tuple(durs[j][k] for j, k in cells)))
        else:
            for a, (j, k) in enumerate(cells):
                for jj, kk in cells[a + 1:]:
                    f.post(Intension(f_or(
                        f_cmp("le", f_add(_v(s[j][k]), durs[j][k]), _v(s[jj][kk])),
                        f_cmp("le", f_add(_v(s[jj][kk]), durs[jj][kk]), _v(s[j][k])))))
    mk = f.add_var("makespan", Domain.range(0, h))
    ends = [f_add(_v(s[j][-1]), durs[j][-1]) for j in range(len(durs))]
    f.post(Intension(f_cmp("eq", _v(mk), f_minmax("max", *ends))))
    f.objective = FlatObjective("minimize", mk)
    return f


def _classical_rcpsp(inst: Instance) -> FlatModel:
    d = inst.data
    durs = d["durations"]
    h = horizon(inst)
    f = FlatModel()
    s = [f.add_var(f"s{i}", Domain.range(0, h - dur)) for i, dur in enumerate(durs)]
    for i, j in d.get("precedences", []):
        f.post(Intension(f_cmp("le", f_add(_v(s[i]), durs[i]), _v(s[j]))))
    for k, cap in enumerate(d["capacities"]):
        tasks = [i for i, row in enumerate(d["requests"]) if row[k] > 0 and durs[i] > 0]
        if tasks:
            f.post(Cumulative(tuple(s[i] for i in tasks), tuple(durs[i] for i in tasks),
                              tuple(d["requests"][i][k] for i in tasks), cap))
    if durs[-1] == 0:
        f.objective = FlatObjective("minimize", s[-1])
    else:
        end = f.add_var("end", Domain.range(durs[-1], h))
        f.post(Intension(f_cmp("eq", _v(end), f_add(_v(s[-1]), durs[-1]))))
        f.objective = FlatObjective("minimize", end)
    return f


def _classical_fjs(inst: Instance) -> FlatModel:
    d = inst.data
    durs = d["durations"]
    types = d.get("types", [0] * len(durs))
    setup = d.get("setup")
    h = horizon(inst)
    f = FlatModel()
    n = len(durs)
    s, e, mv = [], [], []
    for i, row in enumerate(durs):
        eligible = [r for r, v in enumerate(row) if v >= 0]
        lo = min(row[r] for r in eligible)
        s.append(f.add_var(f"s{i}", Domain.range(0, h - lo)))
        mv.append(f.add_var(f"mode{i}", Domain.of_values(eligible)))
        dur = f.add_var(f"d{i}", Domain.of_values(sorted({row[r] for r in eligible})))
        # ineligible machines hold a sentinel the mode domain never reaches
        f.post(ElementCtr(tuple(v if v >= 0 else 0 for v in row), (mv[i],), dur))
        e.append(f.add_var(f"e{i}", Domain.range(lo, h)))
        f.post(Intension(f_cmp("eq", _v(e[i]), f_add(_v(s[i]), _v(dur)))))
    for i in range(n):
        for j in range(i + 1, n):
            for r in range(len(durs[0])):
                if durs[i][r] < 0 or durs[j][r] < 0:
                    continue
                dij = setup[r][types[i]][types[j]] if setup else 0
                dji = setup[r][types[j]][types[i]] if setup else 0
                f.post(Intension(f_or(
                    f_cmp("ne", _v(mv[i]), r), f_cmp("ne", _v(mv[j]), r),
                    f_cmp("le", f_add(_v(e[i]), dij), _v(s[j])),
                    f_cmp("le", f_add(_v(e[j]), dji), _v(s[i])))))
    for i, j in d.get("precedences", []):
        f.post(Intension(f_cmp("le", _v(e[i]), _v(s[j]))))
    mk = f.add_var("makespan", Domain.range(0, h))
    f.post(Intension(f_cmp("eq", _v(mk), f_minmax("max", *[_v(x) for x in e]))))
    f.objective = FlatObjective("minimize", mk)
    return f


def classical_model(inst: Instance) -> FlatModel:
    return {"jobshop": _classical_shop, "flowshop": _classical_shop, "rcpsp": _classical_rcpsp,
            "flexible-jobshop": _classical_fjs}[inst.family](inst)


__all__ = ["FAMILIES", "Instance", "bundled", "bundled_paths", "classical_model", "horizon",
           "load_instance", "parse_instance", "scheduling_model"]
