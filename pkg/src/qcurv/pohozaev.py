"""Pohozaev-type boundary integrals and their sign analysis.

For the critical equation with a coefficient K approaching a positive limit
K_inf at infinity, the boundary integral P(R) of the natural Pohozaev identity
has a finite R -> infinity limit along the slow-decay profile
u ~ M0 * r^(-(n-2*sigma)/2).  The limit splits into a surface term and a
bulk constant, and the whole point is its strict negativity: a nonnegative
limit would be forced for an actual solution, so the computed sign carries
the contradiction.

Integer order m (sigma = m, polyharmonic case): the limit is
g_m * ((n-2m)/n - 1) with g_m = M0^2 |S^(n-1)| prod_i ((n-2m+4i)/2)^2.  The
product coefficient satisfies a two-step recursion that this module runs in
exact rational arithmetic, so the product/recursion identity is checked as an
equality of Fractions rather than floats.

Fractional order sigma in (0, 1): the limit combines the surface term with
the extension-trace constant Q0, whose closed Gamma form is cross-checked
against a one-dimensional hypergeometric quadrature (``q0_quadrature``), with
the boundary bracket of the underlying integration by parts verified
separately (``bracket_identity_check``).

``feynman_check`` validates the parameter trick used to compute the weighted
Poisson integrals, and ``kazdan_warner`` evaluates the derivative-weighted
volume integral that must vanish for genuine solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import simpson

from .core import (DEFAULT_SPEC, ConformalParams, QuadratureSpec, integrate,
                   sphere_area)
from .errors import ConvergenceError, DivergenceError, DomainError
from .extension import (c0_constant, hyper_f, hyper_f_prime_regular,
                        neumann_normalization)
from .fraclap import c2_constant
from .inteq import RadialProfile
from .specfun import gamma

__all__ = [
    "PohozaevReport",
    "gm_product_coefficient", "gm_recursive_coefficient",
    "gm_product", "gm_recursive", "m0_integer", "pohozaev_limit_integer",
    "q0_closed", "q0_quadrature",
    "bracket_boundary_term", "bracket_identity_check",
    "pohozaev_limit_fractional", "feynman_check", "kazdan_warner",
]


@dataclass(frozen=True)
class PohozaevReport:
    """Validated two-route evaluation of a Pohozaev limit.

    Construction fails if the closed form and the independently assembled
    oracle disagree beyond ``tolerance``, or if the sign content of the
    contradiction argument (sign_factor < 0, closed_value < 0) is violated.
    """

    mode: str
    params: ConformalParams
    k_infinity: float
    m0: float
    closed_value: float
    oracle_value: float
    rel_error: float
    sign_factor: float
    tolerance: float

    def __post_init__(self):
        if self.mode not in ("integer", "fractional"):
            raise DomainError("mode must be 'integer' or 'fractional'")
        if not (self.rel_error <= self.tolerance):
            raise ConvergenceError(
                f"{self.mode} Pohozaev limit: closed form {self.closed_value!r} "
                f"and oracle {self.oracle_value!r} disagree "
                f"(rel {self.rel_error:.3e} > {self.tolerance:.1e})")
        if not (self.sign_factor < 0.0 and self.closed_value < 0.0):
            raise ConvergenceError(
                f"{self.mode} Pohozaev limit lost its negative sign: "
                f"factor {self.sign_factor!r}, value {self.closed_value!r}")


# ---------------------------------------------------------------------------
# integer order: exact rational coefficient arithmetic


def gm_product_coefficient(n: int, m: int) -> Fraction:
    """prod_{i=0}^{m-1} ((n - 2m + 4i)/2)^2 as an exact rational."""
    if m < 1 or n <= 2 * m:
        raise DomainError("need integers m >= 1 and n > 2m")
    coef = Fraction(1)
    for i in range(m):
        coef *= Fraction(n - 2 * m + 4 * i, 2) ** 2
    return coef


def gm_recursive_coefficient(n: int, m: int) -> Fraction:
    """Same coefficient through the two-step recursion
    g(m) = ((n-2m)/2)^2 ((n+2(m-2))/2)^2 g(m-2), grounded at
    g(1) = ((n-2)/2)^2 and g(2) = ((n/2)(n-4)/2)^2."""
    if m < 1 or n <= 2 * m:
        raise DomainError("need integers m >= 1 and n > 2m")
    if m == 1:
        return Fraction(n - 2, 2) ** 2
    if m == 2:
        return (Fraction(n, 2) * Fraction(n - 4, 2)) ** 2
    return (Fraction(n - 2 * m, 2) ** 2 * Fraction(n + 2 * (m - 2), 2) ** 2
            * gm_recursive_coefficient(n, m - 2))


def gm_product(params: ConformalParams, m0: float) -> float:
    """Boundary coefficient M0^2 |S^(n-1)| prod_i ((n-2m+4i)/2)^2."""
    m = params.require_integer_order()
    coef = gm_product_coefficient(params.n, m)
    return m0 * m0 * sphere_area(params.n) * float(coef)


def gm_recursive(params: ConformalParams, m0: float) -> float:
    """gm_product evaluated through the exact recursion instead of the
    product; the two rational coefficients are identical by construction."""
    m = params.require_integer_order()
    coef = gm_recursive_coefficient(params.n, m)
    return m0 * m0 * sphere_area(params.n) * float(coef)


def m0_integer(params: ConformalParams, k_infinity: float) -> float:
    """Amplitude M0 of the slow-decay profile fixed by the limit equation:
    M0^(4m/(n-2m)) = prod_i ((n-2m+4i)/2)^2 / K_inf."""
    m = params.require_integer_order()
    if not (k_infinity > 0.0):
        raise DomainError("k_infinity must be positive")
    coef = float(gm_product_coefficient(params.n, m))
    return (coef / k_infinity) ** ((params.n - 2 * m) / (4.0 * m))


def pohozaev_limit_integer(params: ConformalParams, k_infinity: float,
                           tolerance: float = 1e-11) -> PohozaevReport:
    """R -> infinity limit of the polyharmonic Pohozaev boundary integral.

    closed_value = gm * ((n-2m)/n - 1) < 0; the oracle reassembles the same
    limit from the surface term (n-2m)/n * M0^(2n/(n-2m)) |S^(n-1)| K_inf
    and the recursion route to gm.
    """
    m = params.require_integer_order()
    n = params.n
    m0 = m0_integer(params, k_infinity)
    g = gm_product(params, m0)
    closed = g * ((n - 2.0 * m) / n - 1.0)
    surface = ((n - 2.0 * m) / n * m0 ** (2.0 * n / (n - 2.0 * m))
               * sphere_area(n) * k_infinity)
    oracle = surface - gm_recursive(params, m0)
    rel = abs(closed - oracle) / abs(closed)
    return PohozaevReport("integer", params, k_infinity, m0, closed, oracle,
                          rel, closed / g, tolerance)


# ---------------------------------------------------------------------------
# fractional order: the Q0 constant and the boundary bracket


def q0_closed(params: ConformalParams, m0: float) -> float:
    """Closed Gamma form of the bulk constant Q0:
    -C0^2 M0^2 |S^(n-1)| Gamma^2(n/2) Gamma(sigma) Gamma(1-sigma)
    / (Gamma^2((n+2s)/4) Gamma^2((n-2s)/4))."""
    params.require_fractional()
    n, sig = params.n, params.sigma
    c0 = c0_constant(params)
    num = gamma(0.5 * n) ** 2 * gamma(sig) * gamma(1.0 - sig)
    den = gamma(0.25 * (n + 2.0 * sig)) ** 2 * gamma(0.25 * (n - 2.0 * sig)) ** 2
    return -c0 * c0 * m0 * m0 * sphere_area(n) * num / den


def _q0_integrand(params: ConformalParams,
                  spec: QuadratureSpec) -> Callable[[float], float]:
    # Written in u = 1-s so the quadrature hands the hypergeometric routines
    # the exact distance to the singular endpoint; F'(s)^2 is folded through
    # its regular factor H, F'(s) = u^(sigma-1) H(u), which keeps every power
    # of u explicit.
    n, sig = params.n, params.sigma
    p = 0.5 * (n - 2.0 * sig)

    def f(u: float) -> float:
        if u == 1.0:
            # exact limit at s = 0 (u rounds to 1 within half an ulp):
            # everything but the F^2 term dies, and that one only survives
            # the (1-u)^((n-2)/2) factor at n = 2.
            return p * p if n == 2 else 0.0
        fv = hyper_f(params, u, spec)
        hv = hyper_f_prime_regular(params, u, spec)
        return (math.exp(0.5 * (n - 2.0) * math.log1p(-u) - sig * math.log(u))
                * p * p * fv * fv
                + 4.0 * math.exp(0.5 * n * math.log1p(-u)
                                 + (sig - 1.0) * math.log(u)) * hv * hv)

    return f


def q0_quadrature(params: ConformalParams, m0: float,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Quadrature oracle for q0_closed:
    -(C0^2 M0^2 / 4) |S^(n-1)| int_0^1 s^((n-2)/2) (1-s)^(-sigma)
    [((n-2s)/2)^2 F^2 + 4 s (1-s) F'^2] ds, radius-independent by
    construction."""
    params.require_fractional()
    inner = QuadratureSpec(rel_tol=max(spec.rel_tol * 1e-2, 1e-13),
                           abs_tol=spec.abs_tol, max_levels=spec.max_levels)
    value, _ = integrate(_q0_integrand(params, inner), 0.0, 1.0, spec)
    c0 = c0_constant(params)
    return -0.25 * c0 * c0 * m0 * m0 * sphere_area(params.n) * value


def bracket_boundary_term(params: ConformalParams, s: float,
                          spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """The integration-by-parts bracket s^(n/2) (1-s)^(1-sigma) F(s) F'(s).

    The (1-s) powers cancel analytically against F' = (1-s)^(sigma-1) H, so
    the evaluated form s^(n/2) F H is finite all the way to s = 1.
    """
    params.require_fractional()
    if not (0.0 <= s <= 1.0):
        raise DomainError("s must lie in [0, 1]")
    u = 1.0 - s
    return (s ** (0.5 * params.n) * hyper_f(params, u, spec)
            * hyper_f_prime_regular(params, u, spec))


def bracket_identity_check(params: ConformalParams,
                           spec: QuadratureSpec = DEFAULT_SPEC
                           ) -> Tuple[float, float]:
    """Boundary bracket limit versus its defining integral.

    lhs = Gamma^2(n/2) Gamma(sigma) Gamma(1-sigma) /
          (Gamma^2((n-2s)/4) Gamma^2((n+2s)/4)), the s -> 1 limit of the
    bracket (the s -> 0 end vanishes); rhs = int_0^1 s^(n/2-1) (1-s)^(-sigma)
    (s (1-s) F'^2 + ((n-2s)/4)^2 F^2) ds.
    """
    params.require_fractional()
    n, sig = params.n, params.sigma
    lhs = (gamma(0.5 * n) ** 2 * gamma(sig) * gamma(1.0 - sig)
           / gamma(0.25 * (n - 2.0 * sig)) ** 2
           / gamma(0.25 * (n + 2.0 * sig)) ** 2)
    a = 0.25 * (n - 2.0 * sig)
    inner = QuadratureSpec(rel_tol=max(spec.rel_tol * 1e-2, 1e-13),
                           abs_tol=spec.abs_tol, max_levels=spec.max_levels)

    def f(u: float) -> float:
        if u == 1.0:
            return a * a if n == 2 else 0.0
        fv = hyper_f(params, u, inner)
        hv = hyper_f_prime_regular(params, u, inner)
        return (math.exp((0.5 * n - 1.0) * math.log1p(-u) - sig * math.log(u))
                * a * a * fv * fv
                + math.exp(0.5 * n * math.log1p(-u)
                           + (sig - 1.0) * math.log(u)) * hv * hv)

    rhs, _ = integrate(f, 0.0, 1.0, spec)
    return lhs, rhs


def pohozaev_limit_fractional(params: ConformalParams, k_infinity: float,
                              tolerance: float = 1e-5,
                              spec: QuadratureSpec = DEFAULT_SPEC
                              ) -> PohozaevReport:
    """R -> infinity limit of the fractional Pohozaev boundary integral.

    The amplitude is pinned by M0^(4 sigma/(n-2 sigma)) = C2/K_inf.  The
    closed form is M0^2 C0 |S^(n-1)| Gamma(1-sigma) Gamma(n/2) /
    Gamma^2((n-2s)/4) * ((n-2s)/n - 1) < 0; the oracle adds the surface term
    N_{n,sigma} (n-2s)/(2n) |S^(n-1)| K_inf M0^(2n/(n-2s)) to the Q0
    quadrature, so the two routes share no Gamma-identity shortcuts.
    """
    params.require_fractional()
    if not (k_infinity > 0.0):
        raise DomainError("k_infinity must be positive")
    n, sig = params.n, params.sigma
    m0 = (c2_constant(params) / k_infinity) ** ((n - 2.0 * sig) / (4.0 * sig))
    bracket = ((n - 2.0 * sig) / n - 1.0)
    scale = (m0 * m0 * c0_constant(params) * sphere_area(n)
             * gamma(1.0 - sig) * gamma(0.5 * n)
             / gamma(0.25 * (n - 2.0 * sig)) ** 2)
    closed = scale * bracket
    surface = (neumann_normalization(params) * (n - 2.0 * sig) / (2.0 * n)
               * sphere_area(n) * k_infinity
               * m0 ** (2.0 * n / (n - 2.0 * sig)))
    oracle = surface + q0_quadrature(params, m0, spec)
    rel = abs(closed - oracle) / abs(closed)
    return PohozaevReport("fractional", params, k_infinity, m0, closed,
                          oracle, rel, bracket, tolerance)


# ---------------------------------------------------------------------------
# auxiliary identities


def feynman_check(a: float, b: float, mu: float, nu: float,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> Tuple[float, float]:
    """Feynman parameter identity A^-mu B^-nu =
    (Gamma(mu+nu)/(Gamma(mu)Gamma(nu))) int_0^1 s^(mu-1)(1-s)^(nu-1)
    [sA+(1-s)B]^-(mu+nu) ds; returns (lhs, rhs)."""
    if min(a, b, mu, nu) <= 0.0:
        raise DomainError("feynman_check needs strictly positive arguments")
    lhs = a ** (-mu) * b ** (-nu)
    mt = mu + nu

    def from_zero(s: float) -> float:
        return s ** (mu - 1.0) * (1.0 - s) ** (nu - 1.0) \
            * (s * a + (1.0 - s) * b) ** (-mt)

    def from_one(v: float) -> float:
        return (1.0 - v) ** (mu - 1.0) * v ** (nu - 1.0) \
            * ((1.0 - v) * a + v * b) ** (-mt)

    p1, _ = integrate(from_zero, 0.0, 0.5, spec)
    p2, _ = integrate(from_one, 0.0, 0.5, spec)
    rhs = gamma(mt) / (gamma(mu) * gamma(nu)) * (p1 + p2)
    return lhs, rhs


def kazdan_warner(profile: RadialProfile, kprime: Callable[[float], float],
                  params: ConformalParams) -> float:
    """Kazdan-Warner volume integral
    |S^(n-1)| int_0^inf r K'(r) u(r)^(2n/(n-2*sigma)) r^(n-1) dr.

    Grid part by Simpson in t = ln r; below the grid the integrand is frozen
    at its first sample; beyond it the tail model
    u ~ tail_amplitude * r^(-tail_exponent) with K' frozen at the last grid
    point gives a closed form.  A tail too slow to be integrable (exponent
    * 2n/(n-2*sigma) <= n+1, e.g. the invariant power (n-2*sigma)/2) raises
    unless K' already vanishes at the grid edge.
    """
    q = 2.0 * params.n / (params.n - 2.0 * params.sigma)
    n = params.n
    r = profile.radii
    u = profile.values
    kp = np.array([float(kprime(float(ri))) for ri in r])
    if not np.all(np.isfinite(kp)):
        raise DomainError("K' must be finite on the grid")

    area = sphere_area(n)
    grid_part = float(simpson(np.power(r, n + 1) * kp * np.power(u, q),
                              x=np.log(r)))

    head = area * kp[0] * u[0] ** q * r[0] ** (n + 1) / (n + 1.0)

    decay = profile.tail_exponent * q
    kp_edge = kp[-1]
    if kp_edge == 0.0:
        tail = 0.0
    elif decay <= n + 1.0:
        raise DivergenceError(
            f"tail exponent {profile.tail_exponent!r} decays too slowly: the "
            f"Kazdan-Warner integrand is non-integrable (needs exponent * q "
            f"> n+1 = {n + 1})")
    else:
        tail = (area * kp_edge * profile.tail_amplitude ** q
                * r[-1] ** (n + 1.0 - decay) / (decay - n - 1.0))
    return head + area * grid_part + tail
