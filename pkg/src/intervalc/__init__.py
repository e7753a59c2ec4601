"""Scheduling-model compiler: interval and sequence variables lowered to flat XCSP3.

Typical use::

    from intervalc import Model, compile_model, emit, solve
    from intervalc import constraints as C

    m = Model(horizon=10)
    a = m.interval("a", start=(0, 8), size=2)
    b = m.interval("b", start=(0, 8), size=3)
    m.add(C.end_before_start(a, b))
    flat = compile_model(m)
    print(emit(flat))
    print(solve(flat).decoded)
"""

from . import constraints, expr
from .compiler import CompileOptions, compile_model, decode
from .flat import FlatModel, Solution, Status, check
from .gantt import Timeline, render
from .model import IntDomain, IntensityProfile, Model
from .solver import SearchBudget, enumerate_all, solve
from .xcsp3 import emit, parse

__version__ = "0.1.0"

__all__ = [
    "CompileOptions", "FlatModel", "IntDomain", "IntensityProfile", "Model", "SearchBudget",
    "Solution", "Status", "Timeline", "check", "compile_model", "constraints", "decode", "emit",
    "enumerate_all", "expr", "parse", "render", "solve",
]
