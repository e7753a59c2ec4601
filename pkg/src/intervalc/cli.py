"""Command-line front end: build, solve, compare, render.

Reports go to stdout as JSON.  ``solve`` exits 0 on OPTIMUM/SAT, 20 on
UNSAT and 30 on TIMEOUT; input errors exit 1 and usage errors 2.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .compiler import CompileOptions, compile_model
from .errors import IntervalcError
from .families import FAMILIES, classical_model, load_instance, scheduling_model
from .flat import Solution, Status
from .gantt import render
from .solver import SearchBudget, solve
from .xcsp3 import emit, parse

EXIT_CODES = {Status.OPTIMUM: 0, Status.SAT: 0, Status.UNSAT: 20, Status.TIMEOUT: 30}


def _opts(args) -> CompileOptions:
    return CompileOptions(no_overlap_strategy=args.strategy.replace("-", "_"))


def _budget(args) -> SearchBudget:
    return SearchBudget(max_nodes=args.budget_nodes, max_millis=args.budget_ms)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _instance(family: str, path: str):
    inst = load_instance(path)
    if inst.family != family:
        raise IntervalcError(f"{path} is a {inst.family} instance, not {family}")
    return inst


def _run(flat, budget, timing: bool) -> tuple[Solution, dict]:
    t0 = time.perf_counter()
    sol = solve(flat, budget)
    rep = {"status": sol.status.value, "objective": sol.objective_value, "nodes": sol.nodes,
           **flat.counts()}
    if timing:
        rep["millis"] = round((time.perf_counter() - t0) * 1000)
    return sol, rep


def cmd_build(args) -> int:
    inst = _instance(args.family, args.instance)
    flat = classical_model(inst) if args.classical else compile_model(scheduling_model(inst), _opts(args))
    doc = emit(flat)
    out = Path(args.out or f"{inst.name}.xml")
    out.write_text(doc, encoding="utf-8", newline="\n")
    _dump({"instance": inst.name, "family": inst.family, "out": str(out), **flat.counts()})
    return 0


def _solution_json(sol: Solution) -> dict:
    return {"status": sol.status.value, "objective": sol.objective_value,
            "assignment": sol.assignment, "decoded": sol.decoded}


def _load_solution(path: str) -> Solution:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        decoded = data.get("decoded")
        if decoded:
            decoded["states"] = {f: {int(t): v for t, v in tl.items()}
                                 for f, tl in decoded.get("states", {}).items()}
        return Solution(Status(data["status"]), data.get("assignment"), data.get("objective"),
                        decoded)
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise IntervalcError(f"cannot read solution {path}: {exc}") from exc


def cmd_solve(args) -> int:
    src = Path(args.input)
    if src.suffix == ".xml":
        try:
            text = src.read_text(encoding="utf-8")
        except OSError as exc:
            raise IntervalcError(f"cannot read {src}: {exc}") from exc
        flat = parse(text)
    else:
        flat = compile_model(scheduling_model(load_instance(src)), _opts(args))
    sol, rep = _run(flat, _budget(args), args.timing)
    if args.out:
        Path(args.out).write_text(json.dumps(_solution_json(sol), indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
    _dump(rep)
    return EXIT_CODES[sol.status]


def _aug(sched: int, classical: int) -> float | None:
    if classical == 0:
        return None
    return round((sched - classical) / classical * 100, 1)


def cmd_compare(args) -> int:
    inst = _instance(args.family, args.instance)
    budget = _budget(args)
    s_flat = compile_model(scheduling_model(inst), _opts(args))
    c_flat = classical_model(inst)
    s_sol, s_rep = _run(s_flat, budget, args.timing)
    c_sol, c_rep = _run(c_flat, budget, args.timing)
    both = s_sol.status == c_sol.status == Status.OPTIMUM
    rep = {
        "instance": inst.name,
        "family": inst.family,
        "scheduling": s_rep,
        "classical": c_rep,
        "both_optimum": both,
        "objective_equal": both and s_sol.objective_value == c_sol.objective_value,
        "var_augmentation_pct": _aug(s_rep["vars"], c_rep["vars"]),
        "constraint_augmentation_pct": _aug(s_rep["constraints"], c_rep["constraints"]),
    }
    _dump(rep)
    return 0 if rep["objective_equal"] else 1


def cmd_render(args) -> int:
    sol = _load_solution(args.solution)
    model = scheduling_model(load_instance(args.model))
    svg = render(sol, model)
    Path(args.out).write_text(svg, encoding="utf-8", newline="\n")
    _dump({"out": args.out})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="intervalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, budget=False):
        sp.add_argument("--strategy", choices=("auto", "pairwise", "unary-cumulative"),
                        default="auto", help="SeqNoOverlap lowering strategy")
        sp.add_argument("--seed", type=int, default=0, help="reserved; search is deterministic")
        if budget:
            sp.add_argument("--budget-nodes", type=int, default=None)
            sp.add_argument("--budget-ms", type=int, default=None)
            sp.add_argument("--timing", action="store_true",
                            help="add wall-clock millis to the report (not byte-stable)")

    b = sub.add_parser("build", help="compile an instance and write XCSP3")
    b.add_argument("family", choices=FAMILIES)
    b.add_argument("instance")
    b.add_argument("--out")
    b.add_argument("--classical", action="store_true", help="emit the hand-flattened model")
    common(b)
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("solve", help="solve an XCSP3 file or an instance")
    s.add_argument("input")
    s.add_argument("--out", help="write the solution as JSON")
    common(s, budget=True)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="solve both formulations and compare")
    c.add_argument("family", choices=FAMILIES)
    c.add_argument("instance")
    common(c, budget=True)
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("render", help="draw a solution as a Gantt SVG")
    r.add_argument("solution")
    r.add_argument("model", help="instance file the solution was computed from")
    r.add_argument("out")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IntervalcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
