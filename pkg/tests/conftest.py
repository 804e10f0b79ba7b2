"""Shared fixtures: preset problems and session-cached spectral data.

The heavy eigenvalue sweeps (60 and 201 eigenvalues) are computed once per
session; everything downstream (asymptotics, traces, products, acceptance)
reuses them.
"""

import math

import numpy as np
import pytest

from dspec.presets import preset_problem
from dspec.spectrum import spectral_data


def tan_equals_s_roots(count):
    """Positive roots of tan s = s, by bisection on sin s - s cos s.

    Independent oracle for the eigenvalues of the l=1 inverse-square problem:
    sqrt(lambda_n) * pi = s_{n+1}.
    """
    roots = []
    g = lambda s: math.sin(s) - s * math.cos(s)
    for k in range(1, count + 1):
        lo, hi = k * math.pi, k * math.pi + math.pi / 2 * (1 - 1e-12)
        assert g(lo) * g(hi) < 0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(lo) * g(mid) <= 0:
                hi = mid
            else:
                lo = mid
        roots.append(0.5 * (lo + hi))
    return np.asarray(roots)


# frozen from the oracle above; the oracle recomputes and must agree
TAN_S_ROOTS_FIRST3 = (4.493409457909064, 7.725251836937707, 10.904121659428899)


@pytest.fixture(scope="session")
def dd_problem():
    return preset_problem("dirichlet_zero")


@pytest.fixture(scope="session")
def nn_problem():
    return preset_problem("neumann_zero")


@pytest.fixture(scope="session")
def bessel_problem():
    return preset_problem("bessel_l1")


@pytest.fixture(scope="session")
def pole_problem():
    return preset_problem("pole_left")


@pytest.fixture(scope="session")
def dd_data21(dd_problem):
    return spectral_data(dd_problem, 21)


@pytest.fixture(scope="session")
def dd_data60(dd_problem):
    return spectral_data(dd_problem, 60)


@pytest.fixture(scope="session")
def bessel_data60(bessel_problem):
    return spectral_data(bessel_problem, 60)


@pytest.fixture(scope="session")
def dd_data201(dd_problem):
    return spectral_data(dd_problem, 201)


@pytest.fixture(scope="session")
def bessel_data201(bessel_problem):
    return spectral_data(bessel_problem, 201)
