"""Eigenvalue location and spectral data (lambda_n, beta_n, gamma_n).

Eigenvalues are the zeros of the characteristic function chi.  Since chi is
strictly negative below the smallest eigenvalue and its zeros are simple, the
search is sign-based: an adaptive scan covers the low end from a floor with
constant chi-sign below it, and half-integer-width brackets around the
asymptotic centers (n - L)^2, L = (ind f + ind F)/2, take over once n - L >= 3.
Norming constants come from chi'(lambda_n) = beta_n * gamma_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import (BracketFailure, MissedRoot, NonPositiveGamma,
                     NotAnEigenvalue, Unsupported)
from .herglotz import RationalHN, index, poly_pair
from .ode import Problem, _trace_batch, char_function, char_function_batch, default_grid
from .potential import eval_q_many

PI = math.pi

__all__ = ["SpectralData", "eigenvalues", "beta", "norming_constants",
           "spectral_data", "norming_integral_check", "product_representation_check"]


@dataclass(frozen=True)
class SpectralData:
    """Indexed spectral sequences of one problem."""

    lambdas: np.ndarray
    gammas: np.ndarray
    betas: np.ndarray
    ind_f: int
    ind_F: int

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        gam = np.asarray(self.gammas, dtype=float)
        bet = np.asarray(self.betas, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "gammas", gam)
        object.__setattr__(self, "betas", bet)
        if np.any(np.diff(lam) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        if np.any(gam <= 0):
            raise ValueError("norming constants must be positive")
        if np.any(bet == 0):
            raise ValueError("beta coefficients must be nonzero")

    def __len__(self):
        return self.lambdas.size

    def to_json(self) -> dict:
        return {"ind_f": self.ind_f, "ind_F": self.ind_F,
                "lambdas": self.lambdas.tolist(),
                "gammas": self.gammas.tolist(),
                "betas": self.betas.tolist()}

    @classmethod
    def from_json(cls, d: dict) -> "SpectralData":
        return cls(lambdas=np.asarray(d["lambdas"], dtype=float),
                   gammas=np.asarray(d["gammas"], dtype=float),
                   betas=np.asarray(d["betas"], dtype=float),
                   ind_f=int(d["ind_f"]), ind_F=int(d["ind_F"]))

    def csv_rows(self) -> list[tuple]:
        return [(n, self.lambdas[n], self.betas[n], self.gammas[n])
                for n in range(len(self))]


def _chi_arrays(problem, lams, rtol, atol):
    cvs = char_function_batch(problem, lams, rtol=rtol, atol=atol)
    m = np.asarray([c.mantissa for c in cvs])
    ls = np.asarray([c.logscale for c in cvs])
    return m, ls


def _signs(m: np.ndarray) -> np.ndarray:
    s = np.sign(m)
    s[s == 0] = -1.0
    return s


def _crossover_index(L: float) -> int:
    n = max(0, math.ceil(L + 3.0 - 1e-12))
    while n - L < 3.0 - 1e-12:
        n += 1
    return n


def _potential_floor(problem) -> float:
    xs = np.linspace(0.0, PI, 131)[1:-1]
    v = eval_q_many(problem.q, xs)
    lf, lF = problem.ell_f, problem.ell_F
    if lf * (lf + 1) != 0:
        v = v + lf * (lf + 1) / xs ** 2
    if lF * (lF + 1) != 0:
        v = v + lF * (lF + 1) / (PI - xs) ** 2
    return float(np.min(v))


def _find_floor(problem, scan_top, rtol, atol) -> float:
    floor = min(_potential_floor(problem) - 1.0, scan_top - 1.0, -1.0)
    for _ in range(60):
        probes = np.asarray([floor, floor - 1.0, floor - 3.0])
        m, _ = _chi_arrays(problem, probes, rtol, atol)
        if np.all(m < 0):
            return floor
        floor = scan_top - 2.0 * (scan_top - floor)
    raise MissedRoot(f"could not find a floor with chi < 0 below it (last tried {floor})")


def _scan_points(floor: float, top: float, expected: int) -> np.ndarray:
    pts = [np.asarray([floor])]
    if floor < 0:
        m_neg = max(24, 6 * expected)
        pts.append(np.linspace(floor, min(0.0, top), m_neg, endpoint=False))
    lo_s = math.sqrt(max(floor, 0.0))
    hi_s = math.sqrt(top)
    if hi_s > lo_s:
        m_pos = max(64, 20 * expected)
        s = np.linspace(lo_s, hi_s, m_pos)
        pts.append(s * s)
    pts.append(np.asarray([top]))
    out = np.unique(np.concatenate(pts))
    return out[(out >= floor) & (out <= top)]


def _polish(problem, lo, hi, slo, rtol_lambda, rtol, atol):
    """Batched bisection then Illinois regula falsi on the sign-change brackets."""
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    slo = np.asarray(slo, dtype=float).copy()
    for _ in range(18):
        mid = 0.5 * (a + b)
        m, _ = _chi_arrays(problem, mid, rtol, atol)
        sm = _signs(m)
        take_lo = sm == slo
        a = np.where(take_lo, mid, a)
        b = np.where(take_lo, b, mid)
    # regula falsi with the Illinois cut, on chi scaled per root
    ma, la = _chi_arrays(problem, a, rtol, atol)
    mb, lb = _chi_arrays(problem, b, rtol, atol)
    ref = np.maximum(la, lb)
    fa = ma * np.exp(la - ref)
    fb = mb * np.exp(lb - ref)
    side = np.zeros(a.shape)  # +1 last replaced a, -1 last replaced b
    for _ in range(12):
        tol = rtol_lambda * np.maximum(1.0, np.abs(b))
        active = np.abs(b - a) > tol
        if not np.any(active):
            break
        denom = np.where(fb == fa, 1.0, fb - fa)
        c = b - fb * (b - a) / denom
        c = np.minimum(np.maximum(c, np.minimum(a, b)), np.maximum(a, b))
        c = np.where(active, c, b)
        mc, lc = _chi_arrays(problem, c, rtol, atol)
        fc = mc * np.exp(lc - ref)
        repl_b = np.sign(fc) == np.sign(fb)
        fa_h = np.where(active & repl_b & (side == -1), 0.5 * fa, fa)
        fb_h = np.where(active & ~repl_b & (side == +1), 0.5 * fb, fb)
        a_new = np.where(active & ~repl_b, c, a)
        fa_new = np.where(active & ~repl_b, fc, fa_h)
        b_new = np.where(active & repl_b, c, b)
        fb_new = np.where(active & repl_b, fc, fb_h)
        side = np.where(active, np.where(repl_b, -1.0, 1.0), side)
        a, b, fa, fb = a_new, b_new, fa_new, fb_new
        exact = active & (fc == 0.0)
        a = np.where(exact, c, a)
        b = np.where(exact, c, b)
    return 0.5 * (a + b)


def eigenvalues(problem: Problem, count: int, rtol_lambda: float = 1e-10,
                rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """The first `count` eigenvalues, strictly increasing.

    Asymptotic brackets [(n-L-1/2)^2, (n-L+1/2)^2] are used beyond the
    crossover index; the region below the first bracket is covered by an
    adaptive scan from a floor below which chi keeps constant sign.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    L = problem.index_sum_half
    n_c = _crossover_index(L)
    scan_top = (n_c - L - 0.5) ** 2

    # asymptotic bracket edges: consecutive half-integer offsets in sqrt(lambda)
    n_hi = max(count, n_c)
    edges = (np.arange(0, n_hi - n_c + 1) + (n_c - L - 0.5)) ** 2
    if edges.size > 1:
        em, _ = _chi_arrays(problem, edges, rtol, atol)
        es = _signs(em)
        flips = es[:-1] * es[1:]
        if np.any(flips > 0):
            k = int(np.argmax(flips > 0))
            raise BracketFailure(
                f"no sign change of chi in bracket n={n_c + k}: "
                f"[{edges[k]:.6g}, {edges[k + 1]:.6g}]")
    else:
        es = None

    floor = _find_floor(problem, scan_top, rtol, atol)
    lo_sc = hi_sc = slo_sc = None
    for attempt in range(4):
        pts = _scan_points(floor, scan_top, n_c * (1 + attempt) + attempt)
        m, _ = _chi_arrays(problem, pts, rtol, atol)
        s = _signs(m)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if idx.size == n_c:
            lo_sc, hi_sc, slo_sc = pts[idx], pts[idx + 1], s[idx]
            break
        if idx.size < n_c:
            floor = scan_top - 2.0 * (scan_top - floor)
    if lo_sc is None:
        raise MissedRoot(
            f"scan over [{floor:.6g}, {scan_top:.6g}] found {idx.size} sign changes, "
            f"expected {n_c}")

    lo_all = [lo_sc]
    hi_all = [hi_sc]
    slo_all = [slo_sc]
    if count > n_c:
        lo_all.append(edges[:count - n_c])
        hi_all.append(edges[1:count - n_c + 1])
        slo_all.append(es[:count - n_c])
    roots = _polish(problem, np.concatenate(lo_all), np.concatenate(hi_all),
                    np.concatenate(slo_all), rtol_lambda, rtol, atol)
    roots = np.sort(roots)
    if np.any(np.diff(roots) <= 0):
        raise MissedRoot("polished roots are not strictly increasing")
    return roots[:count]


def _log_mag(y, ls):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(y)) + ls


def _beta_from_rows(grid, yl, zl, ll, yr, zr, lr, rel_tol=1e-4):
    """psi/phi ratio at the admissible points nearest pi/2 and pi/3."""
    Lphi = _log_mag(yl, ll)
    Lpsi = _log_mag(yr, lr)
    ok = (Lphi > Lphi.max() - math.log(20.0)) & (Lpsi > Lpsi.max() - math.log(20.0))
    cand = np.nonzero(ok)[0]
    if cand.size < 2:
        raise NotAnEigenvalue("no admissible evaluation points for the psi/phi ratio")
    i1 = cand[np.argmin(np.abs(grid[cand] - PI / 2))]
    rest = cand[cand != i1]
    i2 = rest[np.argmin(np.abs(grid[rest] - PI / 3))]
    r1 = (yr[i1] / yl[i1]) * math.exp(lr[i1] - ll[i1])
    r2 = (yr[i2] / yl[i2]) * math.exp(lr[i2] - ll[i2])
    if abs(r1 - r2) > rel_tol * max(abs(r1), abs(r2)):
        raise NotAnEigenvalue(
            f"psi/phi ratios disagree: {r1:.8g} at x={grid[i1]:.4g} vs "
            f"{r2:.8g} at x={grid[i2]:.4g}")
    return r1


def beta(problem: Problem, lam: float, rtol: float = 1e-10, atol: float = 1e-12) -> float:
    """Proportionality constant psi(., lam) = beta * phi(., lam) at an eigenvalue."""
    grid = default_grid(problem)
    yl, zl, ll = _trace_batch(problem, [lam], "left", grid, rtol, atol)
    yr, zr, lr = _trace_batch(problem, [lam], "right", grid, rtol, atol)
    return _beta_from_rows(grid, yl[0], zl[0], ll[0], yr[0], zr[0], lr[0])


def _betas_batch(problem, lams, rtol, atol):
    grid = default_grid(problem)
    yl, zl, ll = _trace_batch(problem, lams, "left", grid, rtol, atol)
    yr, zr, lr = _trace_batch(problem, lams, "right", grid, rtol, atol)
    return np.asarray([
        _beta_from_rows(grid, yl[b], zl[b], ll[b], yr[b], zr[b], lr[b])
        for b in range(len(lams))])


def _char_derivatives_batch(problem, lams, rtol, atol):
    lams = np.asarray(lams, dtype=float)
    h = np.maximum(1e-5, 1e-7 * np.abs(lams))
    pts = np.concatenate([lams - h, lams + h, lams - h / 2, lams + h / 2])
    m, ls = _chi_arrays(problem, pts, rtol, atol)
    m = m.reshape(4, -1)
    ls = ls.reshape(4, -1)
    ref = ls.max(axis=0)
    v = m * np.exp(ls - ref)
    d1 = (v[1] - v[0]) / (2 * h)
    d2 = (v[3] - v[2]) / h
    return (4.0 * d2 - d1) / 3.0 * np.exp(ref)


def norming_constants(problem: Problem, lambdas, betas=None,
                      rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """gamma_n = chi'(lambda_n) / beta_n; all must come out positive."""
    lambdas = np.asarray(lambdas, dtype=float)
    if betas is None:
        betas = _betas_batch(problem, lambdas, rtol, atol)
    betas = np.asarray(betas, dtype=float)
    chip = _char_derivatives_batch(problem, lambdas, rtol, atol)
    gammas = chip / betas
    if np.any(gammas <= 0):
        bad = int(np.argmax(gammas <= 0))
        raise NonPositiveGamma(
            f"gamma_{bad} = {gammas[bad]:.6g} <= 0 (lambda={lambdas[bad]:.8g}, "
            f"beta={betas[bad]:.6g}, chi'={chip[bad]:.6g})")
    return gammas


def spectral_data(problem: Problem, count: int,
                  rtol: float = 1e-10, atol: float = 1e-12) -> SpectralData:
    """Eigenvalues, beta coefficients, and norming constants in one sweep."""
    lams = eigenvalues(problem, count, rtol=rtol, atol=atol)
    betas = _betas_batch(problem, lams, rtol, atol)
    gammas = norming_constants(problem, lams, betas, rtol, atol)
    return SpectralData(lambdas=lams, gammas=gammas, betas=betas,
                        ind_f=problem.index_f, ind_F=problem.index_F)


def norming_integral_check(problem: Problem, lam: float,
                           rtol: float = 1e-10, atol: float = 1e-12) -> float:
    """Direct norm integral int_0^pi phi(., lam)^2 dx for problems with no
    eigenparameter dependence (both indices <= 0); compares against
    chi'/beta upstream."""
    if problem.index_f >= 1 or problem.index_F >= 1:
        raise Unsupported("norm integral defined this way only for ind f, ind F <= 0")
    grid = default_grid(problem)
    yl, _, ll = _trace_batch(problem, [lam], "left", grid, rtol, atol)
    vals = yl[0] * np.exp(ll[0])
    left = 0.0
    if problem.index_f >= 0:
        f = problem.f
        assert isinstance(f, RationalHN)
        left = float(np.polynomial.polynomial.polyval(lam, np.asarray(poly_pair(f).down)))
    right = 0.0
    if problem.index_F >= 0:
        # phi(pi) = psi(pi) / beta is awkward; integrate with the trace endpoint instead
        F = problem.F
        assert isinstance(F, RationalHN)
        ylpi, _, llpi = _trace_batch(problem, [lam], "left", np.asarray([PI]), rtol, atol)
        right = float(ylpi[0, 0] * np.exp(llpi[0, 0]))
    xs = np.concatenate([[0.0], grid, [PI]])
    ys = np.concatenate([[left], vals, [right]]) ** 2
    return float(simpson(ys, x=xs))


def product_representation_check(problem: Problem, lam: float, truncation_m: int,
                                 data: SpectralData | None = None,
                                 rtol: float = 1e-10, atol: float = 1e-12) -> float:
    """Ratio of the truncated Hadamard product to chi(lam); 1 up to tail error.

    chi(lam) = -pi^[L integer] * prod_{n=floor(L)+1}^{-1} (n-L)^-2
               * prod_{n=0}^{floor(L)} (lambda_n - lam)
               * prod_{n>=max(floor(L)+1,0)} (lambda_n - lam)/(n-L)^2.
    """
    if truncation_m < 50:
        raise ValueError("truncation must be at least 50")
    if data is not None and len(data) >= truncation_m + 1:
        lams = data.lambdas[:truncation_m + 1]
    else:
        lams = eigenvalues(problem, truncation_m + 1, rtol=rtol, atol=atol)
    idxf, idxF = problem.index_f, problem.index_F
    L = 0.5 * (idxf + idxF)
    fl = math.floor(L + 1e-12)
    sign = -1.0
    logmag = 0.0
    if (idxf + idxF) % 2 == 0:
        logmag += math.log(PI)
    for n in range(fl + 1, 0):
        logmag -= 2.0 * math.log(abs(n - L))
    for n in range(0, fl + 1):
        t = lams[n] - lam
        sign *= math.copysign(1.0, t)
        logmag += math.log(abs(t))
    for n in range(max(fl + 1, 0), truncation_m + 1):
        t = (lams[n] - lam) / (n - L) ** 2
        sign *= math.copysign(1.0, t)
        logmag += math.log(abs(t))
    cv = char_function(problem, lam, rtol=rtol, atol=atol)
    return (sign / cv.mantissa) * math.exp(logmag - cv.logscale)
