"""The regular L2 part q of the potential: analytic presets and sampled grids.

The inverse-square endpoint terms are not part of q; they are owned by the
problem via its boundary objects and enter through full_potential only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OutOfDomain

__all__ = ["Potential", "analytic", "sampled", "eval_q", "eval_q_many",
           "symmetrize_check", "full_potential", "integral_q",
           "potential_to_json", "potential_from_json", "PRESETS"]

PI = math.pi

# preset name -> value(x, params)
PRESETS = {
    "zero": lambda x, p: np.zeros_like(np.asarray(x, dtype=float)),
    "constant": lambda x, p: np.full_like(np.asarray(x, dtype=float), p["c"]),
    "cosine": lambda x, p: p["amplitude"] * np.cos(p["k"] * np.asarray(x, dtype=float)),
    "poly": lambda x, p: np.polynomial.polynomial.polyval(
        np.asarray(x, dtype=float), np.asarray(p["coeffs"], dtype=float)),
}


@dataclass(frozen=True)
class Potential:
    """Either an analytic preset or a cubic-spline interpolant of samples on [0, pi]."""

    kind: str                      # "preset" | "sampled"
    name: str = ""                 # preset name when kind == "preset"
    params: dict = field(default_factory=dict)
    grid: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "preset":
            if self.name not in PRESETS:
                raise ValueError(f"unknown preset {self.name!r}")
        elif self.kind == "sampled":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.size < 9:
                raise ValueError("sampled potentials need at least 9 grid points")
            if g.size != v.size:
                raise ValueError("grid and values must have equal length")
            if np.any(np.diff(g) <= 0):
                raise ValueError("grid must be strictly increasing")
            if g[0] < -1e-12 or g[-1] > PI + 1e-12:
                raise ValueError("grid must lie within [0, pi]")
            if not np.all(np.isfinite(v)):
                raise ValueError("sampled values must be finite")
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")

    @property
    def is_analytic(self) -> bool:
        return self.kind == "preset"

    def spline(self) -> CubicSpline:
        # not-a-knot ends: 4th-order reproduction of smooth data (natural ends
        # would be O(h^2) near the endpoints and break the 1e-8 round-trip bound)
        key = (self.grid, self.values)
        cached = _SPLINES.get(key)
        if cached is None:
            cached = CubicSpline(np.asarray(self.grid), np.asarray(self.values),
                                 bc_type="not-a-knot", extrapolate=True)
            _SPLINES[key] = cached
        return cached


_SPLINES: dict[tuple, CubicSpline] = {}


def analytic(name: str, **params) -> Potential:
    return Potential(kind="preset", name=name, params=dict(params))


def sampled(grid, values) -> Potential:
    return Potential(kind="sampled", grid=tuple(np.asarray(grid, dtype=float).tolist()),
                     values=tuple(np.asarray(values, dtype=float).tolist()))


def eval_q_many(p: Potential, x: np.ndarray) -> np.ndarray:
    """Vectorized evaluation without the domain guard (used on trusted grids)."""
    x = np.asarray(x, dtype=float)
    if p.kind == "preset":
        return PRESETS[p.name](x, p.params)
    return p.spline()(x)


def eval_q(p: Potential, x: float) -> float:
    """q(x) for x in the open interval (0, pi)."""
    if not 0.0 < x < PI:
        raise OutOfDomain(f"x={x} outside (0, pi)")
    return float(eval_q_many(p, np.asarray([x]))[0])


def symmetrize_check(p: Potential, tol: float) -> bool:
    """sup over a 257-point uniform grid of |q(x) - q(pi - x)| <= tol."""
    xs = np.linspace(0.0, PI, 259)[1:-1]
    vals = eval_q_many(p, xs)
    return bool(np.max(np.abs(vals - vals[::-1])) <= tol)


def full_potential(problem, x: float) -> float:
    """q(x) plus both inverse-square endpoint terms l(l+1)/x^2 and L(L+1)/(pi-x)^2."""
    from .herglotz import ell

    if not 0.0 < x < PI:
        raise OutOfDomain(f"x={x} outside (0, pi)")
    lf = ell(problem.f)
    lF = ell(problem.F)
    val = eval_q(problem.q, x)
    if lf != 0 and lf != -1:
        val += lf * (lf + 1) / x ** 2
    if lF != 0 and lF != -1:
        val += lF * (lF + 1) / (PI - x) ** 2
    return val


def integral_q(p: Potential) -> float:
    """integral of q over (0, pi); exact antiderivatives for presets, spline
    antiderivative plus constant endpoint strips for samples."""
    if p.kind == "preset":
        if p.name == "zero":
            return 0.0
        if p.name == "constant":
            return p.params["c"] * PI
        if p.name == "cosine":
            a, k = p.params["amplitude"], p.params["k"]
            return a * math.sin(k * PI) / k if k != 0 else a * PI
        if p.name == "poly":
            c = np.asarray(p.params["coeffs"], dtype=float)
            return float(np.polynomial.polynomial.polyval(
                PI, np.concatenate([[0.0], c / (np.arange(c.size) + 1)])))
        raise AssertionError(p.name)
    sp = p.spline()
    g = np.asarray(p.grid)
    total = float(sp.integrate(g[0], g[-1]))
    # endpoint strips: the sampled hull may exclude the endpoints themselves
    total += float(sp(g[0])) * (g[0] - 0.0)
    total += float(sp(g[-1])) * (PI - g[-1])
    return total


def potential_to_json(p: Potential) -> dict:
    if p.kind == "preset":
        return {"kind": "preset", "name": p.name, "params": dict(p.params)}
    return {"kind": "sampled", "grid": list(p.grid), "values": list(p.values)}


def potential_from_json(d: dict) -> Potential:
    kind = d.get("kind")
    if kind == "preset":
        return Potential(kind="preset", name=d["name"], params=dict(d.get("params", {})))
    if kind == "sampled":
        return sampled(d["grid"], d["values"])
    raise ValueError(f"unknown potential kind {kind!r}")
