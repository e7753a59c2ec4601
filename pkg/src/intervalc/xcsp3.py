"""XCSP3-core emission and parsing for flat models.

Only the subset produced by :func:`emit` is parsed back.  Emission is
deterministic: the same flat model always yields the same bytes.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from .errors import MalformedDocument, UnknownElement, UnsupportedConstraint
from .flat import (
    OPS,
    Cumulative,
    Domain,
    ElementCtr,
    Extension,
    FConst,
    FlatModel,
    FlatObjective,
    FOp,
    FVar,
    Intension,
    NoOverlap,
    expr_vars,
)

IND = "  "


def expr_text(e) -> str:
    """Functional syntax, e.g. ``le(add(x,2),y)``."""
    if isinstance(e, FConst):
        return str(e.value)
    if isinstance(e, FVar):
        return e.name
    return f"{e.op}({','.join(expr_text(a) for a in e.args)})"


def _terms(ts) -> str:
    return " ".join(str(t) for t in ts)


def _tuples(rows) -> str:
    if rows and len(rows[0]) == 1:
        return " ".join(str(r[0]) for r in rows)
    return "".join("(" + ",".join(str(v) for v in r) + ")" for r in rows)


def _constraint_lines(c) -> list[str]:
    i2, i3 = IND * 2, IND * 3
    if isinstance(c, Intension):
        return [f"{i2}<intension> {expr_text(c.expr)} </intension>"]
    if isinstance(c, Extension):
        tag = "supports" if c.positive else "conflicts"
        return [f"{i2}<extension>",
                f"{i3}<list> {_terms(c.vars)} </list>",
                f"{i3}<{tag}> {_tuples(c.tuples)} </{tag}>",
                f"{i2}</extension>"]
    if isinstance(c, NoOverlap):
        return [f"{i2}<noOverlap>",
                f"{i3}<origins> {_terms(c.origins)} </origins>",
                f"{i3}<lengths> {_terms(c.lengths)} </lengths>",
                f"{i2}</noOverlap>"]
    if isinstance(c, Cumulative):
        return [f"{i2}<cumulative>",
                f"{i3}<origins> {_terms(c.origins)} </origins>",
                f"{i3}<lengths> {_terms(c.lengths)} </lengths>",
                f"{i3}<heights> {_terms(c.heights)} </heights>",
                f"{i3}<condition> (le,{c.cap}) </condition>",
                f"{i2}</cumulative>"]
    if isinstance(c, ElementCtr):
        if c.two_d:
            table = f"{i3}<matrix> {_tuples(c.table)} </matrix>"
        else:
            table = f"{i3}<list> {_terms(c.table)} </list>"
        return [f"{i2}<element>", table,
                f"{i3}<index> {_terms(c.index)} </index>",
                f"{i3}<value> {c.value} </value>",
                f"{i2}</element>"]
    raise UnsupportedConstraint(f"cannot emit {type(c).__name__}")


def emit(flat: FlatModel, problem_type: str | None = None) -> str:
    """Serialize ``flat``; ``problem_type`` defaults to COP iff there is an objective."""
    if problem_type is None:
        problem_type = "COP" if flat.objective is not None else "CSP"
    if problem_type not in ("CSP", "COP"):
        raise ValueError(f"problem type must be CSP or COP, got {problem_type!r}")
    out = [f'<instance format="XCSP3" type="{problem_type}">', f"{IND}<variables>"]
    for v in flat.vars.values():
        out.append(f'{IND * 2}<var id="{v.id}"> {v.domain.to_text()} </var>')
    out.append(f"{IND}</variables>")
    if flat.constraints:
        out.append(f"{IND}<constraints>")
        for c in flat.constraints:
            out.extend(_constraint_lines(c))
        out.append(f"{IND}</constraints>")
    if flat.objective is not None:
        o = flat.objective
        out += [f"{IND}<objectives>", f"{IND * 2}<{o.sense}> {o.var} </{o.sense}>",
                f"{IND}</objectives>"]
    out.append("</instance>")
    return "\n".join(out) + "\n"


# --- parsing -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_expr(text: str):
    """Parse functional syntax into an FExpr."""
    toks = []
    for num, name, sym in _TOKEN.findall(text):
        if num:
            toks.append(("n", int(num)))
        elif name:
            toks.append(("w", name))
        elif sym.strip():
            toks.append(("s", sym))
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(toks):
            raise MalformedDocument(f"truncated expression {text!r}")
        kind, val = toks[pos]
        pos += 1
        if kind == "n":
            return FConst(val)
        if kind != "w":
            raise MalformedDocument(f"unexpected {val!r} in {text!r}")
        if pos < len(toks) and toks[pos] == ("s", "("):
            if val not in OPS:
                raise MalformedDocument(f"unknown operator {val!r}")
            pos += 1
            args = [node()]
            while pos < len(toks) and toks[pos] == ("s", ","):
                pos += 1
                args.append(node())
            if pos >= len(toks) or toks[pos] != ("s", ")"):
                raise MalformedDocument(f"missing ')' in {text!r}")
            pos += 1
            return FOp(val, tuple(args))
        return FVar(val)

    e = node()
    if pos != len(toks):
        raise MalformedDocument(f"trailing input in {text!r}")
    return e


def _term(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def _parse_tuples(text: str, arity: int) -> tuple:
    text = text.strip()
    if not text:
        return ()
    if arity == 1 and "(" not in text:
        return tuple((int(t),) for t in text.split())
    rows = re.findall(r"\(([^()]*)\)", text)
    if re.sub(r"\(([^()]*)\)", "", text).strip():
        raise MalformedDocument("malformed tuple list")
    try:
        return tuple(tuple(int(x) for x in r.split(",")) for r in rows)
    except ValueError as exc:
        raise MalformedDocument(f"non-integer tuple value: {exc}") from exc


def _children(el, allowed: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for ch in el:
        if ch.tag not in allowed:
            raise UnknownElement(f"<{ch.tag}> inside <{el.tag}>")
        out[ch.tag] = (ch.text or "").strip()
    return out


def _need(parts: dict, tag: str, owner: str) -> str:
    if tag not in parts:
        raise MalformedDocument(f"<{owner}> lacks <{tag}>")
    return parts[tag]


def _constraint(el):
    tag = el.tag
    if tag == "intension":
        return Intension(parse_expr(el.text or ""))
    if tag == "extension":
        p = _children(el, ("list", "supports", "conflicts"))
        vs = tuple(_need(p, "list", tag).split())
        positive = "supports" in p
        body = p.get("supports", p.get("conflicts"))
        if body is None:
            raise MalformedDocument("<extension> lacks <supports> or <conflicts>")
        rows = _parse_tuples(body, len(vs))
        if any(len(r) != len(vs) for r in rows):
            raise MalformedDocument("tuple arity differs from <list>")
        return Extension(vs, rows, positive)
    if tag == "noOverlap":
        p = _children(el, ("origins", "lengths"))
        return NoOverlap(tuple(map(_term, _need(p, "origins", tag).split())),
                         tuple(map(_term, _need(p, "lengths", tag).split())))
    if tag == "cumulative":
        p = _children(el, ("origins", "lengths", "heights", "condition"))
        m = re.fullmatch(r"\(\s*le\s*,\s*(-?\d+)\s*\)", _need(p, "condition", tag))
        if not m:
            raise MalformedDocument("only (le,k) cumulative conditions are supported")
        return Cumulative(tuple(map(_term, _need(p, "origins", tag).split())),
                          tuple(map(_term, _need(p, "lengths", tag).split())),
                          tuple(map(_term, _need(p, "heights", tag).split())),
                          int(m.group(1)))
    if tag == "element":
        p = _children(el, ("list", "matrix", "index", "value"))
        index = tuple(map(_term, _need(p, "index", tag).split()))
        if "matrix" in p:
            rows = re.findall(r"\(([^()]*)\)", p["matrix"])
            table = tuple(tuple(int(x) for x in r.split(",")) for r in rows)
        else:
            table = tuple(int(x) for x in _need(p, "list", tag).split())
        return ElementCtr(table, index, _term(_need(p, "value", tag)))
    raise UnknownElement(f"unsupported constraint <{tag}>")


def _scope(c) -> list[str]:
    if isinstance(c, Intension):
        return expr_vars(c.expr)
    return c.scope()


def parse(text: str) -> FlatModel:
    """Read a document in the emitted subset back into a FlatModel."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not well-formed XML: {exc}") from exc
    if root.tag != "instance" or root.get("format") != "XCSP3":
        raise MalformedDocument("root must be <instance format=\"XCSP3\">")
    flat = FlatModel()
    for section in root:
        if section.tag == "variables":
            for v in section:
                if v.tag != "var":
                    raise UnknownElement(f"<{v.tag}> inside <variables>")
                vid = v.get("id")
                if not vid:
                    raise MalformedDocument("<var> without id")
                try:
                    dom = Domain.parse(v.text or "")
                except ValueError as exc:
                    raise MalformedDocument(f"bad domain for {vid}: {exc}") from exc
                if vid in flat.vars:
                    raise MalformedDocument(f"variable {vid} declared twice")
                flat.add_var(vid, dom, dom.ranges == ((0, 1),))
        elif section.tag == "constraints":
            for el in section:
                flat.post(_constraint(el))
        elif section.tag == "objectives":
            items = list(section)
            if len(items) != 1 or items[0].tag not in ("minimize", "maximize"):
                raise MalformedDocument("<objectives> must hold one <minimize> or <maximize>")
            flat.objective = FlatObjective(items[0].tag, (items[0].text or "").strip())
        else:
            raise UnknownElement(f"<{section.tag}> inside <instance>")
    for c in flat.constraints:
        for name in _scope(c):
            if name not in flat.vars:
                raise MalformedDocument(f"constraint references undeclared variable {name!r}")
    if flat.objective is not None and flat.objective.var not in flat.vars:
        raise MalformedDocument(f"objective references undeclared variable {flat.objective.var!r}")
    return flat


__all__ = ["emit", "expr_text", "parse", "parse_expr"]
