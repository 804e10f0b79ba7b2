import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dspec.errors import DomainViolation, NumericalFailure, PoleEvaluation
from dspec.herglotz import (Inf, RationalHN, boundary_close, boundary_from_json,
                            boundary_to_json, ell, evaluate, evaluate_derivative,
                            index, omega, pole_count_upto, poly_pair,
                            smallest_pole, theta_hat, theta_roundtrip_check,
                            theta_tilde)

PI = math.pi


class TestIndexAndEll:
    def test_index_odd(self):
        assert index(RationalHN(h0=1, h=0, poles=(2.0,), residues=(1.0,))) == 3

    def test_index_inf0(self):
        assert index(Inf(0)) == -1

    def test_index_even(self):
        assert index(RationalHN(h0=0, h=2)) == 0

    def test_ell_rational(self):
        assert ell(RationalHN(h0=1, h=0)) == -1
        assert ell(RationalHN(h0=0, h=5, poles=(1.0,), residues=(2.0,))) == -1

    def test_ell_symbols(self):
        assert ell(Inf(2)) == 2
        assert ell(Inf(0)) == 0


class TestEvaluate:
    def test_affine(self):
        assert evaluate(RationalHN(h0=1, h=0), 5.0) == 5.0

    def test_single_pole(self):
        assert evaluate(RationalHN(h0=0, h=0, poles=(3.0,), residues=(1.0,)), 1.0) == 0.5

    def test_affine_negative(self):
        assert evaluate(RationalHN(h0=2, h=1), -1.0) == -1.0

    def test_pole_rejected(self):
        f = RationalHN(h0=0, h=0, poles=(3.0,), residues=(1.0,))
        with pytest.raises(PoleEvaluation):
            evaluate(f, 3.0)

    def test_derivative_positive(self):
        f = RationalHN(h0=0.5, h=-1, poles=(2.0, 5.0), residues=(1.0, 0.5))
        assert evaluate_derivative(f, 0.0) == 0.5 + 1.0 / 4 + 0.5 / 25


class TestPolyPair:
    def test_constant(self):
        pp = poly_pair(RationalHN(h0=0, h=2.5))
        assert pp.up == (2.5,)
        assert pp.down == (1.0,)

    def test_affine(self):
        pp = poly_pair(RationalHN(h0=1, h=0))
        assert pp.up == (0.0, 1.0)
        assert pp.down == (1.0,)

    def test_single_pole(self):
        pp = poly_pair(RationalHN(h0=0, h=0, poles=(3.0,), residues=(1.0,)))
        assert pp.up == (1.0,)
        assert pp.down == (3.0, -1.0)

    def test_reduces_to_function(self):
        f = RationalHN(h0=0.7, h=-2, poles=(1.0, 4.0), residues=(2.0, 0.3))
        pp = poly_pair(f)
        for lam in (-3.0, 0.5, 2.2, 7.7):
            assert pp.up_poly()(lam) / pp.down_poly()(lam) == pytest.approx(
                evaluate(f, lam), rel=1e-12)


class TestPoleHelpers:
    def test_smallest_pole(self):
        f = RationalHN(h0=0, h=0, poles=(3.0, 7.0), residues=(1.0, 1.0))
        assert smallest_pole(f) == 3.0

    def test_smallest_pole_affine(self):
        assert smallest_pole(RationalHN(h0=1, h=0)) == math.inf

    def test_smallest_pole_symbol(self):
        assert smallest_pole(Inf(4)) == math.inf

    def test_pole_count(self):
        f = RationalHN(h0=0, h=0, poles=(3.0, 7.0), residues=(1.0, 1.0))
        assert pole_count_upto(f, 5.0) == 1
        assert pole_count_upto(f, 7.0) == 2  # inclusive bound
        assert pole_count_upto(Inf(1), 100.0) == 0


class TestOmega:
    def test_symbol(self):
        w1, w2 = omega(Inf(1))
        assert w1 == pytest.approx(-1 / PI)
        assert w2 == pytest.approx(-1 / (2 * PI ** 2))

    def test_odd(self):
        assert omega(RationalHN(h0=2, h=1)) == (0.5, 0.5)

    def test_even(self):
        assert omega(RationalHN(h0=0, h=3)) == (-3.0, 0.0)

    def test_dirichlet_zero(self):
        assert omega(Inf(0)) == (0.0, 0.0)


class TestThetaHat:
    def test_affine(self):
        out = theta_hat(0.0, RationalHN(h0=1, h=0))
        assert boundary_close(out, RationalHN(h0=0, h=-1.0))

    def test_constant_becomes_dirichlet(self):
        assert theta_hat(0.3, RationalHN(h0=0, h=7.0)) == Inf(0)

    def test_symbol_ladder(self):
        assert theta_hat(5.0, Inf(1)) == Inf(2)

    def test_index_drop(self):
        f = RationalHN(h0=0.5, h=1, poles=(4.0, 9.0), residues=(1.0, 2.0))
        assert index(theta_hat(1.0, f)) == index(f) - 1

    def test_removable_value(self):
        # the transformed function extends through mu with value -1/f'(mu) - f(mu)
        f = RationalHN(h0=0.5, h=1, poles=(4.0, 9.0), residues=(1.0, 2.0))
        mu = 1.5
        fh = theta_hat(mu, f)
        expected = -1.0 / evaluate_derivative(f, mu) - evaluate(f, mu)
        assert evaluate(fh, mu) == pytest.approx(expected, rel=1e-9)

    def test_domain_violation(self):
        f = RationalHN(h0=0, h=0, poles=(2.0,), residues=(1.0,))
        with pytest.raises(DomainViolation):
            theta_hat(2.5, f)


class TestThetaTilde:
    def test_symbol_ladder(self):
        assert theta_tilde(0.0, 1.0, Inf(2)) == Inf(1)

    def test_dirichlet_to_constant(self):
        out = theta_tilde(0.0, 5.0, Inf(0))
        assert boundary_close(out, RationalHN(h0=0, h=-5.0))

    def test_constant_to_affine(self):
        c = 2.0
        out = theta_tilde(0.0, c + 1.0, RationalHN(h0=0, h=c))
        assert boundary_close(out, RationalHN(h0=1, h=-c - 1.0))
        assert index(out) == 1

    def test_tau_admissibility(self):
        f = RationalHN(h0=0, h=2.0)
        with pytest.raises(DomainViolation):
            theta_tilde(0.0, 1.5, f)  # tau <= f(mu)

    def test_any_tau_below_index_zero(self):
        # no tau constraint at index <= -1
        assert theta_tilde(0.0, -100.0, Inf(0)) == RationalHN(h0=0, h=100.0)


class TestRoundTrips:
    def test_affine(self):
        assert theta_roundtrip_check(0.0, RationalHN(h0=1, h=0))

    def test_symbol_via_tilde(self):
        assert theta_roundtrip_check(0.0, Inf(0), tau=1.0)

    def test_symbol_pure(self):
        assert theta_roundtrip_check(0.0, Inf(3))


def _random_rational(rng, max_d=3):
    h0 = 0.0 if rng.random() < 0.4 else rng.uniform(0.3, 2.5)
    h = rng.uniform(-2.5, 2.5)
    d = rng.integers(0, max_d + 1)
    poles = np.cumsum(rng.uniform(0.4, 2.0, size=d)) + rng.uniform(-1.0, 1.0)
    residues = rng.uniform(0.2, 3.0, size=d)
    return RationalHN(h0=h0, h=h, poles=tuple(poles), residues=tuple(residues))


def _random_boundary(rng):
    if rng.random() < 0.3:
        return Inf(int(rng.integers(0, 4)))
    return _random_rational(rng)


def test_randomized_roundtrips_and_invariants():
    rng = np.random.default_rng(20250810)
    for _ in range(300):
        f = _random_boundary(rng)
        mu = smallest_pole(f) - rng.uniform(0.5, 3.0)
        if not math.isfinite(mu):
            mu = rng.uniform(-3.0, 3.0)
        assert theta_roundtrip_check(mu, f, tol=1e-10)
        if isinstance(f, RationalHN):
            tau = evaluate(f, mu) + rng.uniform(0.1, 2.0)
            assert theta_roundtrip_check(mu, f, tau=tau, tol=1e-10)
        fh = theta_hat(mu, f)
        assert index(fh) == index(f) - 1
        if isinstance(f, RationalHN) and index(f) >= 3:
            # pole interlacing, with the smallest pole moving up
            assert isinstance(fh, RationalHN)
            assert smallest_pole(f) < smallest_pole(fh)
            merged = sorted([(p, 0) for p in f.poles] + [(p, 1) for p in fh.poles])
            owners = [o for _, o in merged]
            assert all(a != b for a, b in zip(owners, owners[1:]))


def test_tilde_interlacing():
    rng = np.random.default_rng(7)
    for _ in range(200):
        f = _random_rational(rng)
        if index(f) < 2:
            continue
        mu = smallest_pole(f) - rng.uniform(0.5, 2.0)
        tau = evaluate(f, mu) + rng.uniform(0.1, 2.0)
        ft = theta_tilde(mu, tau, f)
        assert index(ft) == index(f) + 1
        assert smallest_pole(f) > smallest_pole(ft)
        merged = sorted([(p, 0) for p in f.poles] + [(p, 1) for p in ft.poles])
        owners = [o for _, o in merged]
        assert all(a != b for a, b in zip(owners, owners[1:]))


def test_division_exactness():
    # the theta_hat numerators vanish at mu before the synthetic division
    rng = np.random.default_rng(42)
    for _ in range(100):
        f = _random_rational(rng)
        if index(f) < 1:
            continue
        mu = smallest_pole(f) - rng.uniform(0.5, 2.0)
        if not math.isfinite(mu):
            mu = rng.uniform(-3.0, 3.0)
        fm = evaluate(f, mu)
        pp = poly_pair(f)
        up, down = pp.up_poly(), pp.down_poly()
        lam = np.polynomial.Polynomial([0.0, 1.0])
        num_up = -fm * up - (lam - mu - fm * fm) * down
        num_down = up - fm * down
        scale = max(1.0, np.max(np.abs(num_up.coef)), np.max(np.abs(num_down.coef)))
        assert abs(num_up(mu)) <= 1e-10 * scale
        assert abs(num_down(mu)) <= 1e-10 * scale


@given(h0=st.floats(0.1, 3.0), h=st.floats(-3.0, 3.0),
       gap=st.floats(0.5, 2.0), delta=st.floats(0.1, 2.0),
       mu_off=st.floats(0.3, 3.0))
@settings(max_examples=100, deadline=None)
def test_theta_hat_preserves_herglotz_slope(h0, h, gap, delta, mu_off):
    f = RationalHN(h0=h0, h=h, poles=(0.0, gap), residues=(delta, delta))
    mu = -mu_off
    fh = theta_hat(mu, f)
    assert isinstance(fh, RationalHN)
    assert fh.h0 >= 0
    assert all(r > 0 for r in fh.residues)
    # strictly increasing between poles
    for lam in (mu - 0.5, mu + 0.1):
        if all(abs(lam - p) > 1e-6 for p in fh.poles):
            assert evaluate_derivative(fh, lam) > 0


def test_json_roundtrip():
    f = RationalHN(h0=0.5, h=-1, poles=(2.0, 5.0), residues=(1.0, 0.5))
    assert boundary_from_json(boundary_to_json(f)) == f
    assert boundary_from_json(boundary_to_json(Inf(2))) == Inf(2)


def test_validation_errors():
    with pytest.raises(ValueError):
        RationalHN(h0=-1.0)
    with pytest.raises(ValueError):
        RationalHN(poles=(1.0, 0.5), residues=(1.0, 1.0))
    with pytest.raises(ValueError):
        RationalHN(poles=(1.0,), residues=(-1.0,))
    with pytest.raises(ValueError):
        Inf(-1)
