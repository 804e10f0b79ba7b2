import math

import numpy as np
import pytest
from scipy.integrate import quad

from dspec.errors import OutOfDomain
from dspec.herglotz import Inf, RationalHN
from dspec.ode import Problem
from dspec.potential import (analytic, eval_q, eval_q_many, full_potential,
                             integral_q, potential_from_json, potential_to_json,
                             sampled, symmetrize_check)

PI = math.pi


class TestEvalQ:
    def test_zero(self):
        assert eval_q(analytic("zero"), 1.0) == 0.0

    def test_constant(self):
        assert eval_q(analytic("constant", c=2.0), 0.5) == 2.0

    def test_sampled_cosine(self):
        xs = np.linspace(0, PI, 33)
        p = sampled(xs, np.cos(xs))
        assert eval_q(p, PI / 3) == pytest.approx(0.5, abs=1e-6)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            eval_q(analytic("zero"), -0.1)
        with pytest.raises(OutOfDomain):
            eval_q(analytic("zero"), PI)

    def test_poly(self):
        p = analytic("poly", coeffs=[1.0, 0.0, 2.0])
        assert eval_q(p, 1.5) == pytest.approx(1.0 + 2.0 * 1.5 ** 2)


def test_sampled_reproduces_preset_at_129_points():
    xs = np.linspace(0, PI, 129)
    p = sampled(xs, np.cos(xs))
    fine = np.linspace(0, PI, 1401)[1:-1]
    err = np.max(np.abs(eval_q_many(p, fine) - np.cos(fine)))
    assert err <= 1e-8


class TestSymmetrize:
    def test_zero(self):
        assert symmetrize_check(analytic("zero"), 1e-12)

    def test_cos2x(self):
        assert symmetrize_check(analytic("cosine", amplitude=1.0, k=2), 1e-10)

    def test_cosx(self):
        assert not symmetrize_check(analytic("cosine", amplitude=1.0, k=1), 1e-3)


class TestFullPotential:
    def test_regular(self):
        p = Problem(q=analytic("zero"), f=Inf(0), F=Inf(0))
        assert full_potential(p, PI / 2) == 0.0

    def test_left_singular(self):
        p = Problem(q=analytic("zero"), f=Inf(1), F=Inf(0))
        assert full_potential(p, 1.0) == pytest.approx(2.0)

    def test_both_singular_with_constant(self):
        p = Problem(q=analytic("constant", c=3.0), f=Inf(1), F=Inf(1))
        expected = 3.0 + 2 / (PI / 2) ** 2 + 2 / (PI / 2) ** 2
        assert full_potential(p, PI / 2) == pytest.approx(expected)

    def test_depends_only_on_ells(self):
        # the singular augmentation is blind to everything but (l_f, l_F)
        q = analytic("cosine", amplitude=0.7, k=2)
        p1 = Problem(q=q, f=Inf(2), F=RationalHN(h0=1, h=0))
        p2 = Problem(q=analytic("zero"), f=Inf(2), F=RationalHN(h0=0, h=9))
        for x in (0.3, 1.1, 2.9):
            d1 = full_potential(p1, x) - eval_q(q, x)
            d2 = full_potential(p2, x) - 0.0
            assert d1 == pytest.approx(d2, rel=1e-12)


def test_integral_q_matches_quadrature():
    for p in (analytic("cosine", amplitude=0.8, k=2),
              analytic("poly", coeffs=[0.2, -0.1, 0.05]),
              analytic("constant", c=1.3)):
        ref, _ = quad(lambda x: eval_q_many(p, np.asarray([x]))[0], 0, PI)
        assert integral_q(p) == pytest.approx(ref, abs=1e-10)
    xs = np.linspace(0, PI, 201)
    ps = sampled(xs, np.cos(2 * xs))
    assert integral_q(ps) == pytest.approx(0.0, abs=1e-8)


def test_json_roundtrip():
    p = analytic("cosine", amplitude=1.0, k=2)
    assert potential_from_json(potential_to_json(p)) == p
    xs = np.linspace(0, PI, 17)
    s = sampled(xs, np.sin(xs))
    assert potential_from_json(potential_to_json(s)) == s


def test_sampled_validation():
    with pytest.raises(ValueError):
        sampled([0, 1, 2], [1, 2, 3])  # too few points
    xs = np.linspace(0, PI, 9)
    with pytest.raises(ValueError):
        sampled(xs, np.concatenate([np.ones(8), [np.inf]]))
    bad = xs.copy()
    bad[3] = bad[2]
    with pytest.raises(ValueError):
        sampled(bad, np.ones(9))
