"""Static Gantt charts as SVG.

A :class:`Timeline` is a list of named panels over the time range
[0, horizon].  Each panel is 60 px tall on a 1000 px wide canvas, and time
maps to x by ``x = 1000 * t / horizon``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constraints import CumulBound
from .errors import ModelError, NoSolution
from .expr import CumulExpr, profile_at
from .flat import Solution, Status
from .model import Model

WIDTH = 1000
PANEL = 60
PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
           "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295")
PANEL_KINDS = ("intervals", "sequence", "cumulative")


@dataclass(frozen=True)
class Panel:
    name: str
    kind: str
    items: tuple = ()          # interval ids (intervals) or the sequence id (sequence)
    cumul: CumulExpr | None = None
    capacity: int | None = None


@dataclass
class Timeline:
    horizon: int
    panels: list[Panel] = field(default_factory=list)

    def panel(self, name: str, kind: str, items=(), cumul=None, capacity=None) -> Timeline:
        if kind not in PANEL_KINDS:
            raise ModelError(f"panel kind must be one of {PANEL_KINDS}, got {kind!r}")
        if any(p.name == name for p in self.panels):
            raise ModelError(f"duplicate panel name {name!r}")
        if isinstance(items, str):
            items = (items,)
        self.panels.append(Panel(name, kind, tuple(items), cumul, capacity))
        return self

    @classmethod
    def default(cls, model: Model) -> Timeline:
        """One panel per sequence, one for unsequenced intervals, one per capacity bound."""
        tl = cls(max(model.horizon, 1))
        covered = set()
        for seq in model.sequences:
            tl.panel(seq.id, "sequence", seq.id)
            covered.update(iv.id for iv in seq.intervals)
        rest = [iv.id for iv in model.intervals if iv.id not in covered]
        if rest:
            tl.panel("intervals", "intervals", rest)
        k = 0
        for c in model.constraints:
            if isinstance(c, CumulBound) and c.window is None:
                tl.panel(f"cumul{k}", "cumulative", cumul=c.cumul, capacity=c.hi)
                k += 1
        return tl


def _n(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, horizon: int):
        self.h = horizon
        self.out: list[str] = []

    def x(self, t: int) -> float:
        return WIDTH * t / self.h

    def add(self, line: str) -> None:
        self.out.append(line)


def _rect(cv, y, height, iv_val, color, label):
    x0, x1 = cv.x(iv_val["start"]), cv.x(iv_val["end"])
    cv.add(f'<rect x="{_n(x0)}" y="{_n(y)}" width="{_n(x1 - x0)}" height="{_n(height)}" '
           f'fill="{color}" stroke="#333333" stroke-width="0.5"><title>{label}</title></rect>')


def _intervals_panel(cv, top, ids, decoded, model):
    present = [i for i in ids if decoded["intervals"][i]["present"]]
    if not present:
        return
    row = 40 / len(present)
    for k, name in enumerate(present):
        v = decoded["intervals"][name]
        idx = model.interval_by_id(name).index
        _rect(cv, top + 16 + k * row + 1, row - 2, v, PALETTE[idx % len(PALETTE)],
              f'{name} [{v["start"]},{v["end"]})')


def _sequence_panel(cv, top, seq_id, decoded, model):
    order = decoded["sequences"].get(seq_id, [])
    prev = None
    for name in order:
        v = decoded["intervals"][name]
        idx = model.interval_by_id(name).index
        _rect(cv, top + 20, 32, v, PALETTE[idx % len(PALETTE)], f'{name} [{v["start"]},{v["end"]})')
        if prev is not None and v["start"] > prev:
            cv.add(f'<line x1="{_n(cv.x(prev))}" y1="{_n(top + 18)}" x2="{_n(cv.x(v["start"]))}" '
                   f'y2="{_n(top + 18)}" stroke="#999999" stroke-dasharray="3,2"/>')
        prev = v["end"] if prev is None else max(prev, v["end"])


def _cumul_panel(cv, top, panel, asn):
    levels = [profile_at(panel.cumul, t, asn) for t in range(cv.h)]
    hi = max([1, *levels] + ([panel.capacity] if panel.capacity is not None else []))
    lo = min([0, *levels])

    def y(v):
        return top + 56 - 38 * (v - lo) / (hi - lo)

    pts = []
    for t, v in enumerate(levels):
        pts.append(f"{_n(cv.x(t))},{_n(y(v))}")
        pts.append(f"{_n(cv.x(t + 1))},{_n(y(v))}")
    cv.add(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    if panel.capacity is not None:
        cy = _n(y(panel.capacity))
        cv.add(f'<line x1="0" y1="{cy}" x2="{WIDTH}" y2="{cy}" stroke="#d62728" '
               f'stroke-dasharray="5,3"/>')


def render(solution: Solution, model: Model, layout: Timeline | None = None) -> str:
    """SVG text for ``solution``; deterministic for identical inputs."""
    if solution.status not in (Status.SAT, Status.OPTIMUM) or not solution.decoded:
        raise NoSolution(f"nothing to render for status {solution.status.value}")
    from .compiler import to_assignment

    decoded = solution.decoded
    asn = to_assignment(decoded)
    if layout is None:
        layout = Timeline.default(model)
    cv = _Canvas(max(layout.horizon, 1))
    height = PANEL * max(1, len(layout.panels))
    cv.add('<?xml version="1.0" encoding="UTF-8"?>')
    cv.add(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
           f'height="{height}" viewBox="0 0 {WIDTH} {height}">')
    cv.add(f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="#ffffff"/>')
    for k, panel in enumerate(layout.panels):
        top = PANEL * k
        cv.add(f'<g id="panel-{panel.name}">')
        cv.add(f'<text x="4" y="{top + 12}" font-family="monospace" font-size="11">'
               f'{panel.name}</text>')
        cv.add(f'<line x1="0" y1="{top + PANEL}" x2="{WIDTH}" y2="{top + PANEL}" '
               f'stroke="#dddddd"/>')
        if panel.kind == "intervals":
            _intervals_panel(cv, top, panel.items, decoded, model)
        elif panel.kind == "sequence":
            _sequence_panel(cv, top, panel.items[0], decoded, model)
        else:
            _cumul_panel(cv, top, panel, asn)
        cv.add("</g>")
    cv.add("</svg>")
    return "\n".join(cv.out) + "\n"


__all__ = ["PALETTE", "Panel", "Timeline", "render"]
