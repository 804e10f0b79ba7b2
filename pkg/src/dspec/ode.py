"""Regular solutions of the boundary value problem and its characteristic function.

The left regular solution phi starts from polynomial initial data
phi(0) = f_down(lambda), phi'(0) = -f_up(lambda) at a nonsingular left endpoint,
from (0, 1) for the Dirichlet symbol (the x-asymptotic normalization phi ~ x),
and from the Frobenius leading term x^(l+1)/(2l+1)!! at an offset eps for a
singular endpoint, with the offset error removed by Richardson extrapolation
over (eps, eps/2).  The right regular solution psi mirrors this.  Their
Wronskian chi = phi psi' - phi' psi is independent of x and vanishes exactly at
the eigenvalues; it is handled as (mantissa, logscale) to stay overflow-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _integrate
from .errors import NumericalFailure
from .herglotz import BoundaryObject, Inf, RationalHN, ell, index, poly_pair
from .potential import Potential, eval_q_many

PI = math.pi
EPS_START = 1e-4 * PI          # Frobenius start offset at a singular endpoint
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

__all__ = ["Problem", "SolutionTrace", "CharValue", "default_grid",
           "left_regular", "right_regular", "char_function", "char_function_batch",
           "char_derivative", "EPS_START"]


@dataclass(frozen=True)
class Problem:
    """Boundary value problem data (q, f, F) on (0, pi)."""

    q: Potential
    f: BoundaryObject
    F: BoundaryObject

    @property
    def ell_f(self) -> int:
        return ell(self.f)

    @property
    def ell_F(self) -> int:
        return ell(self.F)

    @property
    def index_f(self) -> int:
        return index(self.f)

    @property
    def index_F(self) -> int:
        return index(self.F)

    @property
    def index_sum_half(self) -> float:
        return 0.5 * (self.index_f + self.index_F)


@dataclass(frozen=True)
class SolutionTrace:
    """Solution samples; true values are y*exp(logscale), dy*exp(logscale)."""

    grid: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    logscale: np.ndarray
    side: str          # "left" | "right"
    lam: float

    def ratio(self) -> np.ndarray:
        """Log-derivative y'/y; the rescaling factor cancels."""
        return self.dy / self.y

    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.y)) + self.logscale

    def values(self) -> np.ndarray:
        return self.y * np.exp(self.logscale)

    def derivatives(self) -> np.ndarray:
        return self.dy * np.exp(self.logscale)


class CharValue:
    """chi as mantissa * exp(logscale), kept split to defeat overflow."""

    __slots__ = ("mantissa", "logscale")

    def __init__(self, mantissa: float, logscale: float):
        self.mantissa = float(mantissa)
        self.logscale = float(logscale)

    @property
    def value(self) -> float:
        return self.mantissa * math.exp(self.logscale)

    @property
    def sign(self) -> float:
        return math.copysign(1.0, self.mantissa) if self.mantissa != 0.0 else 0.0

    def scaled(self, ref_logscale: float) -> float:
        return self.mantissa * math.exp(self.logscale - ref_logscale)

    def __repr__(self):
        return f"CharValue({self.mantissa!r}, logscale={self.logscale!r})"


def _double_factorial_odd(l: int) -> float:
    """(2l+1)!! = prod_{k=0..l} (2k+1)."""
    out = 1.0
    for k in range(l + 1):
        out *= 2 * k + 1
    return out


def _pot_encoding(q: Potential):
    empty = np.empty(0)
    empty2 = np.empty((4, 0))
    if q.kind == "preset":
        if q.name == "zero":
            return _integrate.QK_ZERO, empty, empty, empty2
        if q.name == "constant":
            return _integrate.QK_CONST, np.asarray([q.params["c"]], dtype=float), empty, empty2
        if q.name == "cosine":
            return (_integrate.QK_COS,
                    np.asarray([q.params["amplitude"], q.params["k"]], dtype=float),
                    empty, empty2)
        if q.name == "poly":
            return (_integrate.QK_POLY, np.asarray(q.params["coeffs"], dtype=float),
                    empty, empty2)
        raise AssertionError(q.name)
    sp = q.spline()
    return (_integrate.QK_SPLINE, empty,
            np.ascontiguousarray(sp.x, dtype=float),
            np.ascontiguousarray(sp.c, dtype=float))


def default_grid(problem: Problem, n: int = 513) -> np.ndarray:
    """Uniform interior grid, densified x4 within 0.05*pi of singular endpoints.

    Built on the integer lattice k * pi/(4(n+1)) so densified and base points
    coincide exactly instead of producing float near-duplicates."""
    quarter = PI / (4 * (n + 1))
    ks = set(range(4, 4 * (n + 1), 4))
    kzone = int(0.05 * PI / quarter)
    if problem.ell_f >= 1:
        ks.update(range(1, kzone + 1))
    if problem.ell_F >= 1:
        ks.update(range(4 * (n + 1) - kzone, 4 * (n + 1)))
    return quarter * np.asarray(sorted(ks), dtype=float)


def _initial_state(problem: Problem, lams: np.ndarray, side: str):
    """Start point and per-lambda initial data (x0, y0, z0) for one side."""
    lams = np.asarray(lams, dtype=float)
    f = problem.f if side == "left" else problem.F
    idx = index(f)
    sgn = 1.0 if side == "left" else -1.0
    if idx >= 0:
        assert isinstance(f, RationalHN)
        pp = poly_pair(f)
        up = np.polynomial.polynomial.polyval(lams, np.asarray(pp.up))
        down = np.polynomial.polynomial.polyval(lams, np.asarray(pp.down))
        x0 = 0.0 if side == "left" else PI
        y0 = down * np.ones_like(lams)
        z0 = -sgn * up * np.ones_like(lams)
        return x0, y0, z0, False
    if idx == -1:
        # Dirichlet: asymptotic normalization phi ~ x (resp. psi ~ pi - x)
        x0 = 0.0 if side == "left" else PI
        return x0, np.zeros_like(lams), sgn * np.ones_like(lams), False
    l = ell(f)
    dfac = _double_factorial_odd(l)
    eps = EPS_START
    x0 = eps if side == "left" else PI - eps
    y0 = np.full_like(lams, eps ** (l + 1) / dfac)
    z0 = np.full_like(lams, sgn * (l + 1) * eps ** l / dfac)
    return x0, y0, z0, True


def _frobenius_state(f: BoundaryObject, eps: float, side: str, nlam: int):
    l = ell(f)
    dfac = _double_factorial_odd(l)
    sgn = 1.0 if side == "left" else -1.0
    x0 = eps if side == "left" else PI - eps
    y0 = np.full(nlam, eps ** (l + 1) / dfac)
    z0 = np.full(nlam, sgn * (l + 1) * eps ** l / dfac)
    return x0, y0, z0


def _prescale(y0: np.ndarray, z0: np.ndarray):
    """Scale initial data to O(1) by the geometric mean of the two magnitudes."""
    ay = np.abs(y0)
    az = np.abs(z0)
    s = np.where((ay > 0) & (az > 0), np.sqrt(ay * az), np.maximum(ay, az))
    s = np.where(s > 0, s, 1.0)
    return y0 / s, z0 / s, np.log(s)


def _run(problem: Problem, lams: np.ndarray, x0: float, y0, z0, xs: np.ndarray,
         rtol: float, atol: float):
    qkind, qpar, qknots, qcoefs = _pot_encoding(problem.q)
    lf2 = float(problem.ell_f * (problem.ell_f + 1))
    lF2 = float(problem.ell_F * (problem.ell_F + 1))
    y0s, z0s, ls0s = _prescale(np.asarray(y0, dtype=float), np.asarray(z0, dtype=float))
    ys, zs, lss, status = _integrate.integrate_batch(
        np.asarray(lams, dtype=float), float(x0), y0s, z0s, ls0s,
        np.asarray(xs, dtype=float), qkind, qpar, qknots, qcoefs, lf2, lF2,
        float(rtol), float(atol))
    if np.any(status != 0):
        bad = np.asarray(lams)[status != 0]
        raise NumericalFailure(f"integrator breakdown at lambda={bad[:5]}")
    return ys, zs, lss


def _combine_richardson(ys1, zs1, lss1, ys2, zs2, lss2):
    """Remove the O(eps^2) Frobenius truncation error: (4*run(eps/2) - run(eps))/3."""
    L = np.maximum(lss1, lss2)
    w1 = np.exp(lss1 - L)
    w2 = np.exp(lss2 - L)
    y = (4.0 * ys2 * w2 - ys1 * w1) / 3.0
    z = (4.0 * zs2 * w2 - zs1 * w1) / 3.0
    return y, z, L


def _trace_batch(problem: Problem, lams, side: str, xs_sorted: np.ndarray,
                 rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
    """(Y, DY, LS) arrays of shape (len(lams), len(xs_sorted)); xs ascending."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    xs = np.asarray(xs_sorted, dtype=float)
    run_xs = xs if side == "left" else xs[::-1]
    x0, y0, z0, singular = _initial_state(problem, lams, side)
    if not singular:
        ys, zs, lss = _run(problem, lams, x0, y0, z0, run_xs, rtol, atol)
    else:
        f = problem.f if side == "left" else problem.F
        gap = run_xs[0] if side == "left" else PI - run_xs[0]
        if gap <= EPS_START:
            raise ValueError(f"trace targets must stay outside the start offset {EPS_START}")
        ys1, zs1, lss1 = _run(problem, lams, x0, y0, z0, run_xs, rtol, atol)
        xh0, yh0, zh0 = _frobenius_state(f, EPS_START / 2, side, lams.size)
        ys2, zs2, lss2 = _run(problem, lams, xh0, yh0, zh0, run_xs, rtol, atol)
        ys, zs, lss = _combine_richardson(ys1, zs1, lss1, ys2, zs2, lss2)
    if side == "right":
        ys, zs, lss = ys[:, ::-1], zs[:, ::-1], lss[:, ::-1]
    return ys, zs, lss


def _trace(problem, lam, side, grid, rtol, atol) -> SolutionTrace:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a nonempty strictly increasing 1-d array")
    if grid[0] < 0.0 or grid[-1] > PI:
        raise ValueError("grid must lie within [0, pi]")
    ys, zs, lss = _trace_batch(problem, [lam], side, grid, rtol, atol)
    return SolutionTrace(grid=grid, y=ys[0], dy=zs[0], logscale=lss[0],
                         side=side, lam=float(lam))


def left_regular(problem: Problem, lam: float, grid,
                 rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> SolutionTrace:
    """Trace of the left regular solution phi(., lam) on an increasing grid."""
    return _trace(problem, lam, "left", grid, rtol, atol)


def right_regular(problem: Problem, lam: float, grid,
                  rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> SolutionTrace:
    """Trace of the right regular solution psi(., lam) on an increasing grid."""
    return _trace(problem, lam, "right", grid, rtol, atol)


def char_function_batch(problem: Problem, lams, match_x: float = PI / 2,
                        rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL
                        ) -> list[CharValue]:
    """chi(lambda) for a batch of lambdas, evaluated at the matching point."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    xs = np.asarray([match_x])
    yl, zl, ll = _trace_batch(problem, lams, "left", xs, rtol, atol)
    yr, zr, lr = _trace_batch(problem, lams, "right", xs, rtol, atol)
    out = []
    for b in range(lams.size):
        m = yl[b, 0] * zr[b, 0] - zl[b, 0] * yr[b, 0]
        out.append(CharValue(m, ll[b, 0] + lr[b, 0]))
    return out


def char_function(problem: Problem, lam: float, match_x: float = PI / 2,
                  rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> CharValue:
    """Characteristic function chi(lambda) = W(phi, psi) at the matching point.

    Independent of the matching point up to integration error; zeros are the
    eigenvalues.  Returned as (mantissa, logscale); .value gives the plain float.
    """
    return char_function_batch(problem, [lam], match_x, rtol, atol)[0]


def char_derivative(problem: Problem, lam: float,
                    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> float:
    """d chi / d lambda via Richardson-extrapolated central differences."""
    h = max(1e-5, 1e-7 * abs(lam))
    pts = np.asarray([lam - h, lam + h, lam - h / 2, lam + h / 2])
    cvs = char_function_batch(problem, pts, rtol=rtol, atol=atol)
    ref = max(cv.logscale for cv in cvs)
    vals = [cv.scaled(ref) for cv in cvs]
    d1 = (vals[1] - vals[0]) / (2 * h)
    d2 = (vals[3] - vals[2]) / h
    return (4.0 * d2 - d1) / 3.0 * math.exp(ref)
