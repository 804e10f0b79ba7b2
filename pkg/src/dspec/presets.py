"""Named example problems used by the test and verification suites."""

from __future__ import annotations

from .herglotz import Inf, RationalHN
from .ode import Problem
from .potential import analytic

__all__ = ["PRESET_PROBLEMS", "preset_problem"]


def dirichlet_zero() -> Problem:
    return Problem(q=analytic("zero"), f=Inf(0), F=Inf(0))


def neumann_zero() -> Problem:
    return Problem(q=analytic("zero"), f=RationalHN(), F=RationalHN())


def bessel_l1() -> Problem:
    return Problem(q=analytic("zero"), f=Inf(1), F=Inf(0))


def bessel_l2_l1() -> Problem:
    return Problem(q=analytic("zero"), f=Inf(2), F=Inf(1))


def pole_left() -> Problem:
    # one finite pole at 2.0, below most of the spectrum: Pi_f(lambda_n) = 1 there
    return Problem(q=analytic("zero"),
                   f=RationalHN(h0=0.0, h=0.5, poles=(2.0,), residues=(3.0,)),
                   F=Inf(0))


def affine_neumann() -> Problem:
    return Problem(q=analytic("cosine", amplitude=1.0, k=1),
                   f=RationalHN(h0=1.0, h=0.0), F=RationalHN())


def neumann_cos() -> Problem:
    return Problem(q=analytic("cosine", amplitude=1.0, k=1),
                   f=RationalHN(), F=RationalHN())


def bessel_cos() -> Problem:
    return Problem(q=analytic("cosine", amplitude=1.0, k=1), f=Inf(1), F=Inf(0))


def dirichlet_sym() -> Problem:
    # cos(2x) is symmetric about pi/2
    return Problem(q=analytic("cosine", amplitude=1.0, k=2), f=Inf(0), F=Inf(0))


def dirichlet_cos() -> Problem:
    return Problem(q=analytic("cosine", amplitude=1.0, k=1), f=Inf(0), F=Inf(0))


PRESET_PROBLEMS = {
    "dirichlet_zero": dirichlet_zero,
    "neumann_zero": neumann_zero,
    "bessel_l1": bessel_l1,
    "bessel_l2_l1": bessel_l2_l1,
    "pole_left": pole_left,
    "affine_neumann": affine_neumann,
    "neumann_cos": neumann_cos,
    "bessel_cos": bessel_cos,
    "dirichlet_sym": dirichlet_sym,
    "dirichlet_cos": dirichlet_cos,
}


def preset_problem(name: str) -> Problem:
    try:
        return PRESET_PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown preset problem {name!r}") from None
