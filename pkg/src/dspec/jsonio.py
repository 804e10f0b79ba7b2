"""Deterministic JSON and the object <-> dict mappings for files on disk.

Floats are always written with 17 significant digits and keys in sorted
order, so identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .herglotz import boundary_from_json, boundary_to_json
from .ode import Problem, SolutionTrace
from .potential import potential_from_json, potential_to_json
from .spectrum import SpectralData
from .transform import ChainRecord

__all__ = ["dumps", "loads", "problem_to_json", "problem_from_json",
           "chain_to_json", "write_spectral_csv", "write_trace_csv"]


def _encode(obj, parts: list, indent: int):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        keys = sorted(obj.keys())
        for i, k in enumerate(keys):
            if not isinstance(k, str):
                raise TypeError(f"JSON keys must be strings, got {k!r}")
            parts.append(pad + "  " + json.dumps(k) + ": ")
            _encode(obj[k], parts, indent + 2)
            parts.append(",\n" if i < len(keys) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, v in enumerate(seq):
            parts.append(pad + "  ")
            _encode(v, parts, indent + 2)
            parts.append(",\n" if i < len(seq) - 1 else "\n")
        parts.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        parts.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite float {x} in JSON output")
        parts.append(format(x, ".17g"))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def dumps(obj) -> str:
    parts: list[str] = []
    _encode(obj, parts, 0)
    parts.append("\n")
    return "".join(parts)


def loads(text: str):
    return json.loads(text)


def problem_to_json(problem: Problem) -> dict:
    return {"q": potential_to_json(problem.q),
            "f": boundary_to_json(problem.f),
            "F": boundary_to_json(problem.F)}


def problem_from_json(d: dict) -> Problem:
    return Problem(q=potential_from_json(d["q"]),
                   f=boundary_from_json(d["f"]),
                   F=boundary_from_json(d["F"]))


def chain_to_json(record: ChainRecord, problem_files: list[str]) -> dict:
    return {"steps": [{"direction": d, "mu": mu, "nu": nu}
                      for d, mu, nu in record.steps],
            "problems": list(problem_files)}


def write_spectral_csv(data: SpectralData, path) -> None:
    lines = ["n,lambda,beta,gamma"]
    for n, lam, bet, gam in data.csv_rows():
        lines.append(f"{n},{lam:.17g},{bet:.17g},{gam:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trace_csv(trace: SolutionTrace, path) -> None:
    lines = ["x,y,dy,logscale"]
    for i in range(trace.grid.size):
        lines.append(f"{trace.grid[i]:.17g},{trace.y[i]:.17g},"
                     f"{trace.dy[i]:.17g},{trace.logscale[i]:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
