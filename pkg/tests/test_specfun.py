"""Gamma and Gauss hypergeometric checks.

scipy.special serves as a third-party cross-check here; the package itself
never imports it.
"""

import math

import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from qcurv import specfun
from qcurv.core import QuadratureSpec
from qcurv.errors import ConvergenceError, DivergenceError, DomainError
from qcurv.specfun import (Hyp2F1Args, eval_hyp2f1, eval_hyp2f1_near_one,
                           gamma, hyp2f1, hyp2f1_deriv, hyp2f1_ode_residual,
                           log_gamma, rgamma)


# ---------------------------------------------------------------------------
# gamma family


def test_gamma_integers_and_halves():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-13)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(2.5) == pytest.approx(1.5 * 0.5 * math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [1e-3, 0.17, 0.99, 1.5, 3.25, 11.0, 47.3,
                               101.25, 170.0, -0.5, -2.75, -13.2])
def test_gamma_against_scipy(x):
    assert gamma(x) == pytest.approx(float(sp.gamma(x)), rel=5e-14)


def test_gamma_poles_and_overflow():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(DomainError):
            gamma(x)
    with pytest.raises(OverflowError):
        gamma(200.0)


@settings(max_examples=150, deadline=None)
@given(st.floats(min_value=0.01, max_value=80.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99))
def test_gamma_reflection(x):
    assert gamma(x) * gamma(1.0 - x) == pytest.approx(
        math.pi / math.sin(math.pi * x), rel=1e-12)


def test_log_gamma_matches_lgamma():
    for x in (1e-4, 0.3, 1.0, 8.5, 300.0, 1e6):
        assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-13,
                                             abs=1e-12)
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_rgamma():
    # exact zeros at the poles, reciprocal elsewhere
    assert rgamma(0.0) == 0.0
    assert rgamma(-4.0) == 0.0
    assert rgamma(3.7) == pytest.approx(1.0 / gamma(3.7), rel=1e-15)
    # beyond the gamma overflow point it must still be finite
    assert 0.0 < rgamma(172.0) < 1e-300


# ---------------------------------------------------------------------------
# 2F1


def test_log_identity():
    # 2F1(1, 1; 2; z) = -ln(1-z)/z, covering series and integral branches
    for z in (-9.0, -2.5, -0.4, 0.05, 0.5, 0.7, 0.95):
        expect = -math.log1p(-z) / z
        assert eval_hyp2f1(1.0, 1.0, 2.0, z) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("a,b,c", [(0.5, 0.5, 1.5), (0.25, 1.75, 2.5),
                                   (1.2, 0.8, 3.0), (0.625, 0.625, 2.5)])
@pytest.mark.parametrize("z", [-8.0, -1.0, -0.3, 0.0, 0.45, 0.8, 0.99])
def test_against_scipy(a, b, c, z):
    assert eval_hyp2f1(a, b, c, z) == pytest.approx(
        float(sp.hyp2f1(a, b, c, z)), rel=1e-10)


def test_gauss_value_at_one():
    # closed form vs scipy and vs the Euler-integral limit route
    a, b, c = 0.625, 0.625, 2.5
    closed = eval_hyp2f1(a, b, c, 1.0)
    assert closed == pytest.approx(float(sp.hyp2f1(a, b, c, 1.0)), rel=1e-12)
    limit = eval_hyp2f1_near_one(a, b, c, 0.0)
    assert closed == pytest.approx(limit, rel=1e-8)


def test_near_one_continuity():
    a, b, c = 0.75, 0.75, 2.0
    at_one = eval_hyp2f1(a, b, c, 1.0)
    # F(1) - F(1 - w) scales like w^(c-a-b) = sqrt(w), with coefficient
    # Gamma(c) Gamma(a+b-c) / Gamma(a) Gamma(b) = -2.36 here; the creep is a
    # property of the function, not a defect of the quadrature
    for w in (1e-6, 1e-10):
        gap = abs(eval_hyp2f1_near_one(a, b, c, w) - at_one)
        assert 1.0 * math.sqrt(w) < gap < 5.0 * math.sqrt(w)
    # and the far branch agrees with plain evaluation
    assert eval_hyp2f1_near_one(a, b, c, 0.6) == pytest.approx(
        eval_hyp2f1(a, b, c, 0.4), rel=1e-12)


def test_divergence_at_one():
    with pytest.raises(DivergenceError):
        eval_hyp2f1(1.0, 1.5, 2.0, 1.0)  # c - a - b = -0.5
    with pytest.raises(DivergenceError):
        eval_hyp2f1_near_one(1.0, 1.0, 2.0, 0.0)


def test_domain_rejections():
    with pytest.raises(DomainError):
        eval_hyp2f1(0.5, 0.5, 1.5, 1.0000001)
    with pytest.raises(DomainError):
        eval_hyp2f1(0.5, 0.5, 1.5, -9.1)
    with pytest.raises(DomainError):
        eval_hyp2f1(0.5, 0.5, -2.0, 0.3)  # c nonpositive integer
    with pytest.raises(DomainError):
        eval_hyp2f1_near_one(0.5, 0.5, 1.5, -0.1)
    with pytest.raises(DomainError):
        Hyp2F1Args(0.5, 0.5, 1.5, 1.2)
    with pytest.raises(DomainError):
        Hyp2F1Args(0.5, 0.5, 0.0, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.1, max_value=3.0),
       st.floats(min_value=0.1, max_value=3.0),
       st.floats(min_value=-0.5, max_value=0.5))
def test_series_symmetric_in_a_b(a, b, z):
    # the Gauss series is symmetric in (a, b); on the series branch the
    # implementation preserves that exactly, not just approximately
    assert eval_hyp2f1(a, b, 3.5, z) == eval_hyp2f1(b, a, 3.5, z)


def test_deriv_contiguous_shift():
    args = Hyp2F1Args(0.625, 0.625, 1.5, 0.4)
    # compare against a central difference of the function itself
    h = 1e-6
    fd = (hyp2f1(Hyp2F1Args(0.625, 0.625, 1.5, 0.4 + h))
          - hyp2f1(Hyp2F1Args(0.625, 0.625, 1.5, 0.4 - h))) / (2.0 * h)
    assert hyp2f1_deriv(args) == pytest.approx(fd, rel=1e-8)
    with pytest.raises(DomainError):
        hyp2f1_deriv(Hyp2F1Args(0.625, 0.625, 1.5, 1.0))


@pytest.mark.parametrize("a,b,c,z", [(0.625, 0.625, 1.5, 0.35),
                                     (0.85, 0.85, 2.0, 0.6),
                                     (1.05, 1.05, 3.5, 0.9)])
def test_ode_residual(a, b, c, z):
    args = Hyp2F1Args(a, b, c, z)
    scale = abs(eval_hyp2f1(a, b, c, z))
    assert abs(hyp2f1_ode_residual(args)) <= 1e-9 * max(scale, 1.0)
    # perturbing F alone moves the residual by exactly -ab*offset
    offset = 0.01
    shifted = hyp2f1_ode_residual(args, f_offset=offset)
    base = hyp2f1_ode_residual(args)
    assert shifted - base == pytest.approx(-a * b * offset, rel=1e-12)


def test_series_respects_budget():
    # a tolerance too tight for the budget has to fail loudly, not silently
    tiny = QuadratureSpec(rel_tol=1e-10, max_levels=2)
    with pytest.raises((ConvergenceError, DomainError)):
        # z extremely close to the branch means the Euler integral needs
        # several refinement levels; 2 is not enough
        eval_hyp2f1(2.0, 2.0, 4.2, 0.9999999, tiny)
