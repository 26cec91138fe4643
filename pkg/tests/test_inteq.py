"""Cylindrical integral-equation engine: kernel, mass, solver, diagnostics.

Closed-form anchors used here: at (n, sigma) = (3, 1/2) the kernel is
J(t) = 2 pi ln coth(|t|/2) and its mass is pi^3; at sigma > 1/2 the value
J(0) is finite (e.g. 2 pi^2 at (5, 3/2)); for large t the kernel decays like
|S^(n-1)| e^(-t (n-2 sigma)/2).
"""

import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings, strategies as st

from qcurv.core import ConformalParams, QuadratureSpec, sphere_area
from qcurv.errors import DivergenceError, DomainError
from qcurv.inteq import (ConvergenceLog, CylProfile, RadialProfile,
                         bootstrap_exponent, bubble_profile, cyl_apply,
                         cyl_grid, kelvin_transform, kernel_J, kernel_mass,
                         log_coth_mass, moving_sphere_deficit, power_profile,
                         ray_monotonicity_W, solve_fixed_point)

P3 = ConformalParams(3, 0.5)

# kernel masses frozen from the quadrature oracle (stable to ~1e-14 under
# level refinement; see also the pi^3 closed form below)
MASS_TABLE = {
    (3, 0.25): 38.60302983099021,
    (4, 0.5): 36.079055898713385,
    (5, 1.5): 48.704545517001215,
    (7, 2.5): 57.37869089724029,
}


# ---------------------------------------------------------------------------
# kernel J


def test_kernel_closed_form_n3():
    for t in (0.25, 1.0, 3.0):
        expect = 2.0 * math.pi * math.log(1.0 / math.tanh(0.5 * t))
        assert kernel_J(P3, t) == pytest.approx(expect, rel=1e-12)


def test_kernel_symmetry_exact():
    for t in (0.3, 1.7, 5.0):
        assert kernel_J(P3, t) == kernel_J(P3, -t)


def test_kernel_center():
    # J(0) diverges (logarithmically) for sigma <= 1/2, is finite above
    with pytest.raises(DivergenceError):
        kernel_J(P3, 0.0)
    with pytest.raises(DivergenceError):
        kernel_J(ConformalParams(4, 0.25), 0.0)
    assert kernel_J(ConformalParams(5, 1.5), 0.0) == pytest.approx(
        2.0 * math.pi ** 2, rel=1e-12)


def test_kernel_two_dimensional_route():
    # n = 2 integrates over the circle directly; check against scipy.quad
    p2 = ConformalParams(2, 0.3)
    for t in (0.5, 2.0):
        expect, _ = scipy.integrate.quad(
            lambda th: (2.0 * math.cosh(t) - 2.0 * math.cos(th)) ** (-0.7),
            0.0, 2.0 * math.pi)
        assert kernel_J(p2, t) == pytest.approx(expect, rel=1e-10)


def test_kernel_large_t_decay():
    # J(t) ~ |S^(n-1)| e^(-p t), p = (n-2 sigma)/2, with O(e^(-2t)) corrections
    for n, sigma in ((3, 0.5), (5, 0.75)):
        p = ConformalParams(n, sigma)
        t = 40.0
        scaled = kernel_J(p, t) * math.exp(0.5 * (n - 2.0 * sigma) * t)
        assert scaled == pytest.approx(sphere_area(n), rel=1e-9)


# ---------------------------------------------------------------------------
# kernel mass


def test_mass_is_pi_cubed_two_routes():
    pi3 = math.pi ** 3
    assert kernel_mass(P3) == pytest.approx(pi3, rel=1e-10)
    assert log_coth_mass() == pytest.approx(pi3, rel=1e-10)


def test_mass_table():
    for (n, sigma), frozen in MASS_TABLE.items():
        assert kernel_mass(ConformalParams(n, sigma)) == pytest.approx(
            frozen, rel=1e-9)


def test_mass_stable_under_refinement():
    base = kernel_mass(ConformalParams(4, 0.5))
    finer = kernel_mass(ConformalParams(4, 0.5),
                        QuadratureSpec(rel_tol=1e-12, max_levels=13))
    assert base == pytest.approx(finer, rel=1e-11)


# ---------------------------------------------------------------------------
# discrete operator T


def test_constant_profile_is_fixed_point():
    # T[A] = K C A^tau = A for A = (K C)^(-1/(tau-1)); discretization must
    # reproduce it to machine precision because the weights sum to C exactly
    for n, sigma, k in ((3, 0.5, 1.0), (3, 0.5, 2.0), (5, 0.75, 1.0)):
        p = ConformalParams(n, sigma)
        a = (k * kernel_mass(p)) ** (-1.0 / (p.tau - 1.0))
        grid = cyl_grid(-10.0, 10.0, 0.05)
        out = cyl_apply(p, CylProfile(grid, np.full(grid.size, a)), k)
        assert float(np.max(np.abs(out.values - a))) <= 1e-13 * a


def test_small_constant_maps_below_itself():
    # for eps well below A the image is K C eps^tau << eps (tau > 1)
    p = ConformalParams(3, 0.5)
    eps = 1e-4
    grid = cyl_grid(-8.0, 8.0, 0.1)
    out = cyl_apply(p, CylProfile(grid, np.full(grid.size, eps)), 1.0)
    expect = kernel_mass(p) * eps ** p.tau
    assert out.values[grid.size // 2] == pytest.approx(expect, rel=1e-12)
    assert np.all(out.values < eps)


def test_translation_equivariance():
    # the kernel depends on t - s only, so shifting a localized bump must
    # shift the image; the grid is wide enough to cover the kernel support
    p = ConformalParams(3, 0.5)
    grid = cyl_grid(-60.0, 60.0, 0.05)
    a = (kernel_mass(p)) ** (-1.0 / (p.tau - 1.0))
    bump = a * (1.0 + 0.3 * np.exp(-((grid / 3.0) ** 2)))
    shift = 40  # 2.0 in t
    shifted = np.roll(bump - a, shift) + a
    out_a = cyl_apply(p, CylProfile(grid, bump), 1.0).values
    out_b = cyl_apply(p, CylProfile(grid, shifted), 1.0).values
    mid = np.abs(grid) <= 10.0
    dev = np.max(np.abs(np.roll(out_a - a, shift)[mid] - (out_b - a)[mid]))
    assert dev <= 1e-13 * a


def test_apply_validation():
    grid = cyl_grid(-5.0, 5.0, 0.1)
    prof = CylProfile(grid, np.full(grid.size, 0.1))
    with pytest.raises(DomainError):
        cyl_apply(P3, prof, 0.0)
    with pytest.raises(DomainError):
        cyl_apply(P3, prof, math.inf)


# ---------------------------------------------------------------------------
# fixed-point solver


def test_solver_reaches_constant_solution():
    a = math.pi ** -3
    grid = cyl_grid()
    initial = CylProfile(grid, np.full(grid.size, 1.1 * a))
    sol, log = solve_fixed_point(P3, 1.0, initial, damping=0.5,
                                 max_iters=500, tol=1e-10)
    assert log.converged
    assert log.iterations < 100
    assert float(np.max(np.abs(sol.values - a))) <= 1e-8 * a


def test_solver_at_the_fixed_point():
    a = math.pi ** -3
    grid = cyl_grid(-8.0, 8.0, 0.05)
    initial = CylProfile(grid, np.full(grid.size, a))
    _, log = solve_fixed_point(P3, 1.0, initial, tol=1e-10)
    assert log.converged and log.iterations <= 2


def test_solver_k_scaling():
    # V_K = K^(-1/(tau-1)) V_1 maps solutions to solutions
    grid = cyl_grid(-8.0, 8.0, 0.05)
    a1 = math.pi ** -3
    s1, _ = solve_fixed_point(P3, 1.0,
                              CylProfile(grid, np.full(grid.size, 1.05 * a1)),
                              tol=1e-10)
    s2, _ = solve_fixed_point(P3, 2.0,
                              CylProfile(grid, np.full(grid.size,
                                                       1.05 * a1 / 2.0)),
                              tol=1e-10)
    ratio = 2.0 ** (-1.0 / (P3.tau - 1.0))
    assert np.max(np.abs(s2.values - ratio * s1.values)) <= 1e-8 * a1


def test_solver_reports_nonconvergence():
    grid = cyl_grid(-6.0, 6.0, 0.1)
    initial = CylProfile(grid, np.full(grid.size, 1.1 * math.pi ** -3))
    _, log = solve_fixed_point(P3, 1.0, initial, max_iters=3, tol=1e-14)
    assert not log.converged
    assert log.iterations == 3


def test_solver_validation():
    grid = cyl_grid(-5.0, 5.0, 0.1)
    prof = CylProfile(grid, np.full(grid.size, 0.03))
    with pytest.raises(DomainError):
        solve_fixed_point(P3, 1.0, prof, damping=0.0)
    with pytest.raises(DomainError):
        solve_fixed_point(P3, 1.0, prof, damping=1.5)
    with pytest.raises(DomainError):
        solve_fixed_point(P3, 1.0, prof, max_iters=0)


# ---------------------------------------------------------------------------
# Kelvin transform and moving-sphere diagnostics


def test_kelvin_bubble_lambda_one():
    bub = bubble_profile(P3)
    k = kelvin_transform(bub, P3, 1.0)
    assert np.max(np.abs(k.values - bub.values) / bub.values) <= 1e-12
    assert k.extrapolated_indices == ()


def test_kelvin_power_invariance():
    pw = power_profile(P3, amplitude=0.7)
    for lam in (0.2, 0.5, 1.0, 3.0, 10.0):
        k = kelvin_transform(pw, P3, lam)
        assert np.max(np.abs(k.values - pw.values) / pw.values) <= 1e-12


def test_kelvin_involution():
    lam = 2.0
    bub = bubble_profile(P3)
    twice = kelvin_transform(kelvin_transform(bub, P3, lam), P3, lam)
    # the double reflection is exact only where the first image still has
    # grid data; restrict to the band the grid covers
    band = bub.radii >= (lam * lam / bub.radii[-1]) * (1.0 + 1e-9)
    assert np.max(np.abs(twice.values[band] - bub.values[band])) <= 1e-8


def test_kelvin_tail_and_flags():
    bub = bubble_profile(P3)
    k = kelvin_transform(bub, P3, 3.0)
    # reflecting the bubble turns its flat head into a fast-decay tail
    assert k.is_standard_tail(P3, rel_tol=0.01)
    # lam^2/r stays above r_min here (lam^2 >= r_min * r_max), so no flags
    assert k.extrapolated_indices == ()
    # a small sphere sends the outer radii below the covered range; exactly
    # those points are flagged
    lam = 0.3
    small = kelvin_transform(bub, P3, lam)
    flagged = small.extrapolated_indices
    assert len(flagged) > 0
    cut = lam * lam / bub.radii[0]
    assert all(bub.radii[i] > cut * (1.0 - 1e-9) for i in flagged)
    assert all(i in flagged for i in range(bub.radii.size)
               if bub.radii[i] > cut * (1.0 + 1e-9))
    with pytest.raises(DomainError):
        kelvin_transform(bub, P3, 0.0)


def test_moving_sphere_deficit():
    bub = bubble_profile(P3)
    assert abs(moving_sphere_deficit(bub, P3, 1.0)) <= 1e-12
    assert moving_sphere_deficit(bub, P3, 0.5) >= 0.0
    pw = power_profile(P3)
    assert moving_sphere_deficit(pw, P3, 2.0) >= -1e-12
    with pytest.raises(DomainError):
        moving_sphere_deficit(bub, P3, 1e-3)  # no radii inside


def test_ray_monotonicity():
    # W = r^((n-2s)/2) u: flat for the critical power, eventually decreasing
    # for the bubble (it rises to r = 1 and falls after), increasing for a
    # slow profile approaching its limit from below
    pw = power_profile(P3)
    assert abs(ray_monotonicity_W(pw, P3)) <= 1e-12
    bub = bubble_profile(P3)
    assert ray_monotonicity_W(bub, P3) < 0.0
    r = np.exp(np.linspace(math.log(0.5), math.log(100.0), 801))
    slow = RadialProfile(r, 0.7 / r * (1.0 + np.exp(-1.0 / r)),
                         tail_exponent=1.0, tail_amplitude=1.4)
    assert ray_monotonicity_W(slow, P3) > 0.0


# ---------------------------------------------------------------------------
# bootstrap exponent


def test_bootstrap_known_values():
    assert bootstrap_exponent(2.0, 1) == 1.0
    assert bootstrap_exponent(2.0, 5) == 31.0
    assert bootstrap_exponent(2.0, 10) == 1023.0


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1.05, max_value=3.5),
       st.integers(min_value=1, max_value=20))
def test_bootstrap_closed_form(tau, q):
    # the recurrence e -> tau e + 1 telescopes to (tau^q - 1)/(tau - 1)
    expect = (tau ** q - 1.0) / (tau - 1.0)
    assert bootstrap_exponent(tau, q) == pytest.approx(expect, rel=1e-11)


def test_bootstrap_guards():
    with pytest.raises(OverflowError):
        bootstrap_exponent(10.0, 400)
    with pytest.raises(DomainError):
        bootstrap_exponent(1.0, 3)
    with pytest.raises(DomainError):
        bootstrap_exponent(2.0, 0)


# ---------------------------------------------------------------------------
# containers


def test_radial_profile_validation():
    r = np.array([1.0, 2.0, 3.0])
    v = np.array([1.0, 0.5, 0.25])
    prof = RadialProfile(r, v, tail_exponent=1.0, tail_amplitude=1.0)
    assert prof.is_standard_tail(P3)  # (n-2s)/2 = 1
    assert not RadialProfile(r, v, 1.3, 1.0).is_standard_tail(P3)
    with pytest.raises(DomainError):
        RadialProfile(r[::-1].copy(), v, 1.0, 1.0)
    with pytest.raises(DomainError):
        RadialProfile(r, np.array([1.0, -0.5, 0.25]), 1.0, 1.0)
    with pytest.raises(DomainError):
        RadialProfile(r, v, math.inf, 1.0)
    with pytest.raises(DomainError):
        RadialProfile(np.array([0.0, 1.0, 2.0]), v, 1.0, 1.0)


def test_cyl_profile_validation():
    with pytest.raises(DomainError):
        CylProfile(np.array([0.0, 0.1, 0.3]), np.ones(3))  # uneven
    with pytest.raises(DomainError):
        CylProfile(np.array([0.0, 0.1, 0.2]), np.array([1.0, 0.0, 1.0]))
    grid = cyl_grid(-1.0, 1.0, 0.5)
    assert CylProfile(grid, np.ones(grid.size)).spacing == pytest.approx(0.5)


def test_grid_and_csv(tmp_path):
    grid = cyl_grid(-2.0, 2.0, 0.25)
    assert grid[0] == -2.0 and grid[-1] == 2.0
    assert np.allclose(np.diff(grid), 0.25)

    prof = bubble_profile(P3, 0.5, 2.0, 11)
    path = tmp_path / "prof.csv"
    prof.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,u"
    assert len(lines) == 12
    r0, u0 = map(float, lines[1].split(","))
    assert r0 == pytest.approx(0.5, rel=1e-15)
    assert u0 == pytest.approx(prof.values[0], rel=1e-15)

    log = ConvergenceLog((0.1, 0.01), False)
    log_path = tmp_path / "log.csv"
    log.to_csv(log_path)
    assert log_path.read_text().splitlines()[1] == "1,0.1"
    assert log.iterations == 2
