"""Darboux-type transformations between boundary value problems.

t_hat removes the smallest eigenvalue and lowers both endpoint indices by one;
t_tilde inserts a prescribed eigenvalue mu below the spectrum with norming
constant nu and raises both indices.  They are mutual inverses.

The transformed potential is computed twice, by two independent routes:

* the cancellation-free closed form obtained by eliminating (y'/y)' through
  the Riccati identity, e.g. q_hat = 2(phi'/phi)^2 + 2 lam0 - q
  - 2(l_f+1)^2/x^2 - 2(l_F+1)^2/(pi-x)^2, and
* q - 2 v' with v the endpoint-regularized log-derivative, differentiated
  numerically on the grid.

The two must agree to 1e-4 sup-norm on the retained region (0.02*pi away from
the endpoints); the emitted sample grid keeps its points inside the excluded
zones but fills their values by quadratic extrapolation from the retained side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, NumericalFailure
from .herglotz import (BoundaryObject, index, smallest_pole, theta_hat,
                       theta_tilde)
from .ode import EPS_START, Problem, _trace_batch, char_function, default_grid
from .potential import Potential, eval_q_many, sampled
from .spectrum import eigenvalues, norming_constants

PI = math.pi
ZONE = 0.02 * PI
ROUTE_TOL = 1e-4

__all__ = ["ChainRecord", "t_hat", "t_tilde", "apply_chain", "ZONE"]


@dataclass(frozen=True)
class ChainRecord:
    """Log of an iterated transformation run: per-step (direction, mu, nu) and
    every intermediate problem, the initial one first."""

    steps: tuple[tuple[str, float, float], ...]
    problems: tuple[Problem, ...]

    def __post_init__(self):
        if len(self.problems) != len(self.steps) + 1:
            raise ValueError("need one more problem snapshot than steps")
        for k, (direction, mu, nu) in enumerate(self.steps):
            if direction not in ("hat", "tilde"):
                raise ValueError(f"unknown direction {direction!r}")
            if nu <= 0:
                raise ValueError("nu must be positive")
            before, after = self.problems[k], self.problems[k + 1]
            delta = -1 if direction == "hat" else 1
            if (index(after.f) - index(before.f) != delta
                    or index(after.F) - index(before.F) != delta):
                raise ValueError(f"step {k}: index pair did not move by {delta}")


def _fill_zones(x: np.ndarray, vals: np.ndarray, retained: np.ndarray) -> np.ndarray:
    """Quadratic extrapolation of the retained values into the endpoint zones."""
    out = vals.copy()
    ridx = np.nonzero(retained)[0]
    left = np.nonzero(~retained & (x < PI / 2))[0]
    right = np.nonzero(~retained & (x >= PI / 2))[0]
    if left.size:
        src = ridx[x[ridx] <= x[ridx[0]] + 0.12]
        src = src[:48]
        c = np.polyfit(x[src] - x[src[0]], vals[src], 2)
        out[left] = np.polyval(c, x[left] - x[src[0]])
    if right.size:
        src = ridx[x[ridx] >= x[ridx[-1]] - 0.12]
        src = src[-48:]
        c = np.polyfit(x[src] - x[src[-1]], vals[src], 2)
        out[right] = np.polyval(c, x[right] - x[src[-1]])
    return out


def _emit_potential(x, q_closed, q_deriv_route, what: str,
                    fill_left: bool, fill_right: bool) -> Potential:
    retained = (x >= ZONE) & (x <= PI - ZONE)
    err = float(np.max(np.abs(q_closed[retained] - q_deriv_route[retained])))
    if err > ROUTE_TOL:
        raise NumericalFailure(
            f"{what}: closed-form and derivative routes disagree by {err:.3e} "
            f"(tolerance {ROUTE_TOL})")
    # the closed form loses digits only where it subtracts a 1/x^2 term, i.e.
    # at singular sides; regular sides keep their directly computed values
    keep = retained.copy()
    if not fill_left:
        keep |= x < ZONE
    if not fill_right:
        keep |= x > PI - ZONE
    return sampled(x, _fill_zones(x, q_closed, keep))


def t_hat(problem: Problem, rtol: float = 1e-10, atol: float = 1e-12,
          grid: np.ndarray | None = None) -> tuple[Problem, float, float]:
    """Remove the smallest eigenvalue lam0; returns (new problem, lam0, gamma0).

    The returned (mu, nu) pair is exactly what t_tilde needs to undo the step.
    """
    assert ZONE > EPS_START
    lam0 = float(eigenvalues(problem, 1, rtol=rtol, atol=atol)[0])
    if lam0 >= min(smallest_pole(problem.f), smallest_pole(problem.F)):
        raise DomainViolation("smallest eigenvalue is not below the boundary poles")
    gamma0 = float(norming_constants(problem, [lam0], rtol=rtol, atol=atol)[0])
    fhat = theta_hat(lam0, problem.f)
    Fhat = theta_hat(lam0, problem.F)
    x = default_grid(problem) if grid is None else np.asarray(grid, dtype=float)
    yl, zl, ll = _trace_batch(problem, [lam0], "left", x, rtol, atol)
    w = zl[0] / yl[0]
    lf, lF = problem.ell_f, problem.ell_F
    qx = eval_q_many(problem.q, x)
    q_closed = (2.0 * w ** 2 + 2.0 * lam0 - qx
                - 2.0 * (lf + 1) ** 2 / x ** 2
                - 2.0 * (lF + 1) ** 2 / (PI - x) ** 2)
    v = w - (lf + 1) / x + (lF + 1) / (PI - x)
    q_deriv = qx - 2.0 * np.gradient(v, x)
    qhat = _emit_potential(x, q_closed, q_deriv, "t_hat",
                           fill_left=lf >= 0, fill_right=lF >= 0)
    return Problem(q=qhat, f=fhat, F=Fhat), lam0, gamma0


def t_tilde(mu: float, nu: float, problem: Problem,
            rtol: float = 1e-10, atol: float = 1e-12,
            grid: np.ndarray | None = None) -> Problem:
    """Insert eigenvalue mu (below the current spectrum) with norming constant nu.

    Built on u = psi(., mu) - (chi(mu)/nu) phi(., mu), a positive combination
    of the two regular solutions since chi < 0 below the spectrum.  The new
    boundary objects take the ratios -u'(0)/u(0) and u'(pi)/u(pi) where the
    endpoint is nonsingular; at singular endpoints the ratio never enters.
    """
    if nu <= 0:
        raise DomainViolation(f"nu={nu} must be positive")
    lam0 = float(eigenvalues(problem, 1, rtol=rtol, atol=atol)[0])
    if not mu < lam0:
        raise DomainViolation(f"mu={mu} is not below the smallest eigenvalue {lam0}")
    chi_mu = char_function(problem, mu, rtol=rtol, atol=atol)
    if chi_mu.mantissa >= 0:
        raise NumericalFailure(f"chi({mu}) = {chi_mu.value:.6g} is not negative below the spectrum")
    log_c = math.log(-chi_mu.mantissa) + chi_mu.logscale - math.log(nu)

    x = default_grid(problem) if grid is None else np.asarray(grid, dtype=float)
    xs = x
    has_left = problem.index_f >= -1
    has_right = problem.index_F >= -1
    if has_left:
        xs = np.concatenate([[0.0], xs])
    if has_right:
        xs = np.concatenate([xs, [PI]])
    yl, zl, ll = _trace_batch(problem, [mu], "left", xs, rtol, atol)
    yr, zr, lr = _trace_batch(problem, [mu], "right", xs, rtol, atol)
    lphi = ll[0] + log_c
    ref = np.maximum(lr[0], lphi)
    u = yr[0] * np.exp(lr[0] - ref) + yl[0] * np.exp(lphi - ref)
    du = zr[0] * np.exp(lr[0] - ref) + zl[0] * np.exp(lphi - ref)
    if np.any(u <= 0):
        raise NumericalFailure("u is not strictly positive; transformation data inconsistent")

    tau_left = -du[0] / u[0] if has_left else 0.0
    tau_right = du[-1] / u[-1] if has_right else 0.0
    ftil = theta_tilde(mu, tau_left, problem.f)
    Ftil = theta_tilde(mu, tau_right, problem.F)

    sl = slice(1 if has_left else 0, -1 if has_right else None)
    w = du[sl] / u[sl]
    lf, lF = problem.ell_f, problem.ell_F
    lft, lFt = -1 - min(0, index(ftil)), -1 - min(0, index(Ftil))
    qx = eval_q_many(problem.q, x)
    q_closed = 2.0 * w ** 2 + 2.0 * mu - qx
    if lf >= 1:
        q_closed -= 2.0 * lf ** 2 / x ** 2
    if lF >= 1:
        q_closed -= 2.0 * lF ** 2 / (PI - x) ** 2
    v = w + (lft + 1) / x - (lFt + 1) / (PI - x)
    q_deriv = qx - 2.0 * np.gradient(v, x)
    qtil = _emit_potential(x, q_closed, q_deriv, "t_tilde",
                           fill_left=lf >= 1, fill_right=lF >= 1)
    return Problem(q=qtil, f=ftil, F=Ftil)


def _parse_step(step):
    if step == "hat" or step == ("hat",) or (isinstance(step, dict) and step.get("direction") == "hat"):
        return ("hat", None, None)
    if isinstance(step, dict):
        if step.get("direction") == "tilde":
            return ("tilde", float(step["mu"]), float(step["nu"]))
    elif isinstance(step, (tuple, list)) and len(step) == 3 and step[0] == "tilde":
        return ("tilde", float(step[1]), float(step[2]))
    raise ValueError(f"cannot parse chain step {step!r}")


def apply_chain(problem: Problem, steps) -> ChainRecord:
    """Run a sequence of hat/tilde steps, recording every intermediate problem.

    Hat steps record the (lam0, gamma0) they removed, so the chain is
    invertible; tilde steps take explicit (mu, nu)."""
    problems = [problem]
    done: list[tuple[str, float, float]] = []
    current = problem
    for step in steps:
        direction, mu, nu = _parse_step(step)
        if direction == "hat":
            current, mu, nu = t_hat(current)
        else:
            current = t_tilde(mu, nu, current)
        problems.append(current)
        done.append((direction, float(mu), float(nu)))
    return ChainRecord(steps=tuple(done), problems=tuple(problems))
