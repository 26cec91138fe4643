import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qcurv.core import ConformalParams
from qcurv.errors import ConvergenceError, DivergenceError, DomainError
from qcurv.inteq import bubble_profile, power_profile
from qcurv.pohozaev import (PohozaevReport, bracket_boundary_term,
                            bracket_identity_check, feynman_check,
                            gm_product, gm_product_coefficient,
                            gm_recursive, gm_recursive_coefficient,
                            kazdan_warner, m0_integer,
                            pohozaev_limit_fractional, pohozaev_limit_integer,
                            q0_closed, q0_quadrature)

GRID = [(3, 0.5), (4, 0.3), (5, 0.75), (7, 0.9)]
INT_GRID = [(3, 1), (5, 1), (7, 2), (9, 3), (11, 4), (13, 5)]


# ---------------------------------------------------------------------------
# integer order: exact rational identity and the limit


def test_coefficient_hand_values():
    assert gm_product_coefficient(3, 1) == Fraction(1, 4)
    assert gm_product_coefficient(6, 2) == Fraction(9, 1)
    assert gm_recursive_coefficient(6, 2) == Fraction(9, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1,
                                                          max_value=40))
def test_recursion_equals_product_exactly(m, extra):
    n = 2 * m + extra
    assert gm_recursive_coefficient(n, m) == gm_product_coefficient(n, m)


def test_coefficient_rejects():
    with pytest.raises(DomainError):
        gm_product_coefficient(4, 2)  # n = 2m
    with pytest.raises(DomainError):
        gm_recursive_coefficient(5, 0)


def test_gm_values():
    assert gm_product(ConformalParams(3, 1.0), 1.0) == pytest.approx(
        math.pi, rel=1e-15)
    assert gm_recursive(ConformalParams(6, 2.0), 1.0) == pytest.approx(
        9.0 * math.pi ** 3, rel=1e-15)


def test_m0_integer():
    assert m0_integer(ConformalParams(3, 1.0), 0.25) == 1.0
    assert m0_integer(ConformalParams(5, 1.0), 3.0) == pytest.approx(
        0.75 ** 0.75, rel=1e-15)
    # scaling: m0(K) = m0(1) K^(-(n-2m)/(4m))
    p = ConformalParams(7, 2.0)
    assert m0_integer(p, 2.0) == pytest.approx(
        m0_integer(p, 1.0) * 2.0 ** (-3.0 / 8.0), rel=1e-14)


def test_integer_limit_frozen_example():
    rep = pohozaev_limit_integer(ConformalParams(3, 1.0), 0.25)
    assert rep.closed_value == pytest.approx(-2.0 * math.pi / 3.0, rel=1e-13)
    assert rep.sign_factor == pytest.approx(-2.0 / 3.0, rel=1e-15)
    assert rep.rel_error <= 1e-11


@pytest.mark.parametrize("n,m", INT_GRID)
def test_integer_sign_law(n, m):
    for k in (0.25, 1.0, 4.0):
        rep = pohozaev_limit_integer(ConformalParams(n, float(m)), k)
        assert rep.closed_value < 0.0
        assert abs(rep.sign_factor + 2.0 * m / n) <= 1e-12


# ---------------------------------------------------------------------------
# fractional order: Q0, bracket, limit


def test_q0_closed_is_minus_four():
    assert q0_closed(ConformalParams(3, 0.5), 1.0) == pytest.approx(
        -4.0, rel=1e-13)


@pytest.mark.parametrize("n,sigma", GRID)
def test_q0_two_routes(n, sigma):
    p = ConformalParams(n, sigma)
    closed = q0_closed(p, 1.0)
    assert closed < 0.0
    assert q0_quadrature(p, 1.0) == pytest.approx(closed, rel=1e-8)


def test_q0_amplitude_scaling():
    p = ConformalParams(4, 0.3)
    assert q0_closed(p, 3.0) == pytest.approx(9.0 * q0_closed(p, 1.0),
                                              rel=1e-15)


def test_bracket_identity():
    lhs, rhs = bracket_identity_check(ConformalParams(3, 0.5))
    assert lhs == pytest.approx(math.pi / 4.0, rel=1e-13)
    assert rhs == pytest.approx(lhs, rel=1e-10)
    for n, sigma in GRID[1:]:
        lhs, rhs = bracket_identity_check(ConformalParams(n, sigma))
        assert rhs == pytest.approx(lhs, rel=1e-10)


def test_bracket_boundary_term_limits():
    p = ConformalParams(3, 0.5)
    lhs, _ = bracket_identity_check(p)
    assert abs(bracket_boundary_term(p, 1e-8)) <= 1e-7
    assert bracket_boundary_term(p, 1.0) == pytest.approx(lhs, rel=1e-12)
    with pytest.raises(DomainError):
        bracket_boundary_term(p, 1.5)


def test_fractional_limit_two_paths():
    # K_inf = C2(3, 1/2) = 2/pi makes M0 = 1; both routes give -4/3
    rep = pohozaev_limit_fractional(ConformalParams(3, 0.5), 2.0 / math.pi)
    assert rep.m0 == pytest.approx(1.0, rel=1e-14)
    assert rep.closed_value == pytest.approx(-4.0 / 3.0, rel=1e-12)
    assert rep.oracle_value == pytest.approx(-4.0 / 3.0, rel=1e-12)


@pytest.mark.parametrize("n,sigma", GRID)
def test_fractional_sign_law(n, sigma):
    for k in (0.5, 1.0, 2.0):
        rep = pohozaev_limit_fractional(ConformalParams(n, sigma), k)
        assert rep.closed_value < 0.0
        assert abs(rep.sign_factor + 2.0 * sigma / n) <= 1e-12


def test_report_validation():
    p = ConformalParams(3, 0.5)
    with pytest.raises(DomainError):
        PohozaevReport(mode="weird", params=p, k_infinity=1.0, m0=1.0,
                       closed_value=-1.0, oracle_value=-1.0, rel_error=0.0,
                       sign_factor=-0.5, tolerance=1e-6)
    with pytest.raises(ConvergenceError):
        PohozaevReport(mode="fractional", params=p, k_infinity=1.0, m0=1.0,
                       closed_value=-1.0, oracle_value=-2.0, rel_error=0.5,
                       sign_factor=-0.5, tolerance=1e-6)
    with pytest.raises(ConvergenceError):
        # a nonnegative limit would contradict the nonexistence argument
        PohozaevReport(mode="fractional", params=p, k_infinity=1.0, m0=1.0,
                       closed_value=1.0, oracle_value=1.0, rel_error=0.0,
                       sign_factor=-0.5, tolerance=1e-6)


# ---------------------------------------------------------------------------
# Feynman parameter identity


def test_feynman_identity():
    # A^-mu B^-nu = Gamma(mu+nu)/(Gamma mu Gamma nu) int s^(mu-1)(1-s)^(nu-1)
    #               (sA + (1-s)B)^-(mu+nu) ds
    assert feynman_check(1.0, 1.0, 1.0, 1.0)[0] == pytest.approx(1.0)
    lhs, rhs = feynman_check(2.0, 3.0, 1.0, 1.0)
    assert lhs == pytest.approx(1.0 / 6.0, rel=1e-15)
    assert rhs == pytest.approx(lhs, rel=1e-12)
    lhs, rhs = feynman_check(0.7, 2.4, 1.25, 0.85)
    assert rhs == pytest.approx(lhs, rel=1e-12)


# ---------------------------------------------------------------------------
# Kazdan-Warner


def test_kazdan_warner_constant_k_is_exact_zero():
    prof = bubble_profile(ConformalParams(3, 0.5), 1e-3, 1e3, 2001)
    assert kazdan_warner(prof, lambda r: 0.0, ConformalParams(3, 0.5)) == 0.0


def test_kazdan_warner_linear_k_on_bubble():
    # K(r) = r, bubble with fast decay: the volume integral is
    # |S^2| int r^3 (1+r^2)^-3 dr = 4 pi / 4 = pi
    p = ConformalParams(3, 0.5)
    prof = bubble_profile(p, 1e-3, 1e3, 2001)
    value = kazdan_warner(prof, lambda r: 1.0, p)
    assert value == pytest.approx(math.pi, rel=1e-10)
    finer = kazdan_warner(bubble_profile(p, 1e-3, 1e3, 4001), lambda r: 1.0, p)
    assert value == pytest.approx(finer, rel=1e-6)


def test_kazdan_warner_kprime_linearity():
    p = ConformalParams(3, 0.5)
    prof = bubble_profile(p, 1e-3, 1e3, 1001)
    one = kazdan_warner(prof, lambda r: 1.0, p)
    two = kazdan_warner(prof, lambda r: 2.0, p)
    assert two == pytest.approx(2.0 * one, rel=1e-14)


def test_kazdan_warner_slow_tail_diverges():
    p = ConformalParams(3, 0.5)
    slow = power_profile(p)  # decay (n-2 sigma)/2: K' r^n u^q has a fat tail
    with pytest.raises(DivergenceError):
        kazdan_warner(slow, lambda r: 1.0, p)
    # but a K' that dies before the boundary keeps it finite
    compact = kazdan_warner(slow, lambda r: max(0.0, 50.0 - r), p)
    assert math.isfinite(compact) and compact > 0.0
