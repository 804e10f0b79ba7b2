"""Algebra of endpoint data: rational Herglotz-Nevanlinna functions and singularity symbols.

A boundary object is either a rational Herglotz-Nevanlinna function

    f(lambda) = h0*lambda + h + sum_k delta_k / (h_k - lambda)

with h0 >= 0, delta_k > 0 and strictly increasing real poles h_1 < ... < h_d,
or the symbol Inf(n) standing for the Dirichlet condition (n = 0) or an
inverse-square singularity with coefficient n(n+1) (n >= 1).

The index counts poles (finite ones twice, a pole at infinity once) and is
assigned the value -n-1 to Inf(n).  theta_hat lowers the index by one and
theta_tilde raises it by one; they are mutually inverse on their admissible
sets.  All objects are immutable and every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainViolation, NumericalFailure, PoleEvaluation

__all__ = [
    "RationalHN", "Inf", "BoundaryObject", "PolyPair",
    "index", "ell", "evaluate", "evaluate_derivative", "poly_pair",
    "smallest_pole", "pole_count_upto", "omega",
    "theta_hat", "theta_tilde", "theta_roundtrip_check",
    "boundary_close", "boundary_to_json", "boundary_from_json",
]

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class RationalHN:
    """Rational Herglotz-Nevanlinna function in partial-fraction form."""

    h0: float = 0.0
    h: float = 0.0
    poles: tuple[float, ...] = ()
    residues: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(float(p) for p in self.poles))
        object.__setattr__(self, "residues", tuple(float(r) for r in self.residues))
        object.__setattr__(self, "h0", float(self.h0))
        object.__setattr__(self, "h", float(self.h))
        if self.h0 < 0:
            raise ValueError(f"h0 must be nonnegative, got {self.h0}")
        if len(self.poles) != len(self.residues):
            raise ValueError("poles and residues must have equal length")
        if any(r <= 0 for r in self.residues):
            raise ValueError("residues must be strictly positive")
        if any(b <= a for a, b in zip(self.poles, self.poles[1:])):
            raise ValueError("poles must be strictly increasing")

    @property
    def d(self) -> int:
        return len(self.poles)


@dataclass(frozen=True)
class Inf:
    """Singularity symbol: Dirichlet for n = 0, coefficient n(n+1)/x^2 for n >= 1."""

    n: int

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise ValueError(f"Inf requires a nonnegative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


BoundaryObject = Union[RationalHN, Inf]


@dataclass(frozen=True)
class PolyPair:
    """Numerator/denominator polynomials (ascending coefficients), f = up/down."""

    up: tuple[float, ...]
    down: tuple[float, ...]

    def up_poly(self) -> Polynomial:
        return Polynomial(self.up)

    def down_poly(self) -> Polynomial:
        return Polynomial(self.down)


def index(f: BoundaryObject) -> int:
    """2d+1 if h0 > 0, 2d if h0 = 0; -n-1 for Inf(n)."""
    if isinstance(f, Inf):
        return -f.n - 1
    return 2 * f.d + 1 if f.h0 > 0 else 2 * f.d


def ell(f: BoundaryObject) -> int:
    """Orbital quantum number: -1 - min(0, index).  n for Inf(n), -1 for rational."""
    return -1 - min(0, index(f))


def evaluate(f: RationalHN, lam: float) -> float:
    """Value h0*lam + h + sum delta_k/(h_k - lam); lam must not be a pole."""
    for p in f.poles:
        if abs(lam - p) <= _POLE_TOL * max(1.0, abs(p)):
            raise PoleEvaluation(f"lambda={lam} is a pole of the boundary function")
    val = f.h0 * lam + f.h
    for p, r in zip(f.poles, f.residues):
        val += r / (p - lam)
    return val


def evaluate_derivative(f: RationalHN, lam: float) -> float:
    """f'(lam) = h0 + sum delta_k/(h_k - lam)^2, strictly positive off poles unless f is constant."""
    for p in f.poles:
        if abs(lam - p) <= _POLE_TOL * max(1.0, abs(p)):
            raise PoleEvaluation(f"lambda={lam} is a pole of the boundary function")
    val = f.h0
    for p, r in zip(f.poles, f.residues):
        val += r / (p - lam) ** 2
    return val


def poly_pair(f: RationalHN) -> PolyPair:
    """Exact numerator/denominator: down = h0' * prod(h_k - lambda), up = f*down.

    h0' is 1/h0 when h0 > 0 and 1 otherwise, so that the leading data of f are
    recoverable from the pair without extra normalization.
    """
    h0p = 1.0 / f.h0 if f.h0 > 0 else 1.0
    down = Polynomial([h0p])
    for p in f.poles:
        down = down * Polynomial([p, -1.0])
    up = Polynomial([f.h, f.h0]) * down
    for p, r in zip(f.poles, f.residues):
        other = Polynomial([h0p])
        for pp in f.poles:
            if pp != p:
                other = other * Polynomial([pp, -1.0])
        up = up + r * other
    return PolyPair(up=tuple(up.coef.tolist()), down=tuple(down.coef.tolist()))


def smallest_pole(f: BoundaryObject) -> float:
    """h_1 when f has a finite pole, +inf otherwise (and for every Inf(n))."""
    if isinstance(f, RationalHN) and f.d > 0:
        return f.poles[0]
    return math.inf


def pole_count_upto(f: BoundaryObject, lam: float) -> int:
    """Number of finite poles h_k <= lam; identically zero for symbols."""
    if isinstance(f, Inf):
        return 0
    return sum(1 for p in f.poles if p <= lam)


def omega(f: BoundaryObject) -> tuple[float, float]:
    """The two endpoint invariants (omega1, omega2).

    (1/h0, h/h0 - sum h_k) for odd index, (-h, -sum h_k) for even index,
    and (-l(l+1)/(2 pi), -l^2(l+1)^2/(8 pi^2)) with l = ell(f) for index <= -1.
    """
    idx = index(f)
    if idx <= -1:
        lf = ell(f)
        return (-lf * (lf + 1) / (2 * math.pi),
                -lf ** 2 * (lf + 1) ** 2 / (8 * math.pi ** 2))
    assert isinstance(f, RationalHN)
    if idx % 2 == 1:
        return (1.0 / f.h0, f.h / f.h0 - sum(f.poles))
    return (-f.h, -sum(f.poles))


def _trim(coef: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(coef)) if coef.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.abs(coef) > 1e-13 * scale
    last = int(np.max(np.nonzero(keep))) if keep.any() else 0
    return coef[: last + 1]


def _exact_divide(num: Polynomial, mu: float, what: str) -> Polynomial:
    """Divide by (lambda - mu); the remainder must vanish (removable point)."""
    quot, rem = divmod(num, Polynomial([-mu, 1.0]))
    scale = max(1.0, float(np.max(np.abs(num.coef))))
    if abs(float(rem.coef[0])) > 1e-10 * scale:
        raise NumericalFailure(
            f"{what}: division by (lambda - mu) not exact, remainder {float(rem.coef[0]):.3e}")
    return quot


def _canonicalize(up: Polynomial, down: Polynomial) -> RationalHN:
    """Partial-fraction fields (h0, h, poles, residues) of up/down.

    The quotient of the polynomial division gives h0 and h; the poles are the
    roots of down (they must be real and simple for a Herglotz function) and the
    residues come from evaluating the division remainder at each pole.
    """
    up = Polynomial(_trim(up.coef))
    down = Polynomial(_trim(down.coef))
    if not np.any(down.coef):
        raise NumericalFailure("canonicalize: zero denominator")
    quot, rem = divmod(up, down)
    q = _trim(quot.coef)
    if q.size > 2:
        raise NumericalFailure("canonicalize: quotient degree exceeds one, not Herglotz")
    h = float(q[0])
    h0 = float(q[1]) if q.size == 2 else 0.0
    if h0 < 0 and abs(h0) < 1e-12 * max(1.0, abs(h)):
        h0 = 0.0
    if h0 < 0:
        raise NumericalFailure(f"canonicalize: negative leading coefficient h0={h0}")
    if down.degree() == 0:
        return RationalHN(h0=h0, h=h)
    roots = down.roots()
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.max(np.abs(roots.imag)) > 1e-8 * scale:
        raise NumericalFailure("canonicalize: complex poles, not Herglotz")
    poles = np.sort(roots.real)
    dp = down.deriv()
    residues = [-float(rem(p)) / float(dp(p)) for p in poles]
    if any(r <= 0 for r in residues):
        raise NumericalFailure(f"canonicalize: non-positive residue in {residues}")
    return RationalHN(h0=h0, h=h, poles=tuple(poles.tolist()), residues=tuple(residues))


def theta_hat(mu: float, f: BoundaryObject) -> BoundaryObject:
    """Index-lowering endpoint transformation.

    For index >= 1 the result is (mu-lambda)/(f(lambda)-f(mu)) - f(mu), computed
    through the exact polynomial formulas

        up_hat  = (-f(mu) up - (lambda-mu-f(mu)^2) down) / (lambda-mu),
        down_hat = (up - f(mu) down) / (lambda-mu),

    whose numerators vanish at mu so the division is exact.  For index <= 0 the
    result is the symbol Inf(-index).  Requires mu below the smallest pole of f.
    """
    if mu >= smallest_pole(f):
        raise DomainViolation(f"mu={mu} is not below the smallest pole {smallest_pole(f)}")
    idx = index(f)
    if idx <= 0:
        return Inf(-idx)
    assert isinstance(f, RationalHN)
    fm = evaluate(f, mu)
    pp = poly_pair(f)
    up, down = pp.up_poly(), pp.down_poly()
    lam = Polynomial([0.0, 1.0])
    up_hat = _exact_divide(-fm * up - (lam - mu - fm * fm) * down, mu, "theta_hat up")
    down_hat = _exact_divide(up - fm * down, mu, "theta_hat down")
    out = _canonicalize(up_hat, down_hat)
    if index(out) != idx - 1:
        raise NumericalFailure(f"theta_hat: index {index(out)} != {idx - 1}")
    return out


def theta_tilde(mu: float, tau: float, f: BoundaryObject) -> BoundaryObject:
    """Index-raising endpoint transformation, inverse to theta_hat.

    (mu-lambda)/(f(lambda)-tau) - tau for index >= 0 via

        up_tilde = tau up + (lambda-mu-tau^2) down,  down_tilde = -up + tau down;

    the constant function -tau for index -1 (Dirichlet), and Inf(-index-2) for
    index <= -2 (tau is ignored in the symbol branches).  Requires mu below the
    smallest pole, and tau > f(mu) when f is rational.
    """
    if mu >= smallest_pole(f):
        raise DomainViolation(f"mu={mu} is not below the smallest pole {smallest_pole(f)}")
    idx = index(f)
    if idx <= -2:
        return Inf(-idx - 2)
    if idx == -1:
        return RationalHN(h0=0.0, h=-float(tau))
    assert isinstance(f, RationalHN)
    fm = evaluate(f, mu)
    if not tau > fm:
        raise DomainViolation(f"tau={tau} must exceed f(mu)={fm}")
    pp = poly_pair(f)
    up, down = pp.up_poly(), pp.down_poly()
    lam = Polynomial([0.0, 1.0])
    out = _canonicalize(tau * up + (lam - mu - tau * tau) * down, -up + tau * down)
    if index(out) != idx + 1:
        raise NumericalFailure(f"theta_tilde: index {index(out)} != {idx + 1}")
    return out


def boundary_close(a: BoundaryObject, b: BoundaryObject, tol: float = 1e-10) -> bool:
    """Componentwise comparison after canonicalization; symbols compare exactly."""
    if isinstance(a, Inf) or isinstance(b, Inf):
        return isinstance(a, Inf) and isinstance(b, Inf) and a.n == b.n
    if a.d != b.d:
        return False
    vals = [(a.h0, b.h0), (a.h, b.h)]
    vals += list(zip(a.poles, b.poles)) + list(zip(a.residues, b.residues))
    return all(abs(x - y) <= tol for x, y in vals)


def theta_roundtrip_check(mu: float, f: BoundaryObject, tau: float | None = None,
                          tol: float = 1e-12) -> bool:
    """Verify the inverse identities of the two endpoint transformations.

    Checks theta_tilde(mu, -f(mu), theta_hat(mu, f)) == f, and when tau is given
    also theta_hat(mu, theta_tilde(mu, tau, f)) == f, within coefficient
    tolerance tol after canonicalization.
    """
    fhat = theta_hat(mu, f)
    # tau is ignored by the symbol branches, which is exactly where f(mu) is undefined
    tau_back = -evaluate(f, mu) if isinstance(f, RationalHN) else 0.0
    ok = boundary_close(theta_tilde(mu, tau_back, fhat), f, tol=tol)
    if tau is not None:
        ok = ok and boundary_close(theta_hat(mu, theta_tilde(mu, tau, f)), f, tol=tol)
    return ok


def boundary_to_json(f: BoundaryObject) -> dict:
    if isinstance(f, Inf):
        return {"kind": "inf", "n": f.n}
    return {"kind": "hn", "h0": f.h0, "h": f.h,
            "poles": list(f.poles), "residues": list(f.residues)}


def boundary_from_json(d: dict) -> BoundaryObject:
    kind = d.get("kind")
    if kind == "inf":
        return Inf(n=int(d["n"]))
    if kind == "hn":
        return RationalHN(h0=float(d.get("h0", 0.0)), h=float(d.get("h", 0.0)),
                          poles=tuple(d.get("poles", ())),
                          residues=tuple(d.get("residues", ())))
    raise ValueError(f"unknown boundary object kind {kind!r}")
