"""Gamma functions and the real Gauss hypergeometric function.

Evaluation strategy for 2F1(a, b; c; z), real z in [-9, 1]:

* |z| <= 1/2: Gauss power series, stopped when three consecutive terms fall
  below the requested relative tolerance (cap 10,000 terms).
* z in (1/2, 1) and z < -1/2: Euler integral
  B(b, c-b)^{-1} * int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt,
  valid for c > b > 0, evaluated by double-exponential quadrature in log
  space. The series is *not* used below -1/2: its radius of convergence is
  |z| = 1, so points like z = -9 are out of reach no matter the term cap,
  while the integral representation remains valid on the whole half-line.
* z = 1: Gauss's closed form Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b)),
  finite only for c - a - b > 0.

`eval_hyp2f1_near_one` accepts 1 - z directly so callers probing the z -> 1
boundary layer keep full relative accuracy in the distance to 1; it always
takes the integral route, which makes it an evaluation path independent of
the closed form at z = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._backend import kernels
from .core import DEFAULT_SPEC, QuadratureSpec
from .errors import ConvergenceError, DivergenceError, DomainError

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# gamma(x) last representable just below 171.6244; beyond that it overflows
GAMMA_OVERFLOW_X = 171.624376956302725

# Stirling asymptotic series coefficients for x >= _STIRLING_MIN_X:
# ln Gamma(x) ~ (x-1/2) ln x - x + ln(2 pi)/2 + sum c_k / x^(2k-1)
_STIRLING_MIN_X = 18.0
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def _stirling_tail(x: float) -> float:
    ix2 = 1.0 / (x * x)
    total = 0.0
    p = 1.0 / x
    for ck in _STIRLING_COEF:
        total += ck * p
        p *= ix2
    return total


def _sinpi(x: float) -> float:
    """sin(pi*x) with exact argument reduction at integers."""
    k = round(x)
    r = x - k
    s = math.sin(math.pi * r)
    return -s if (k % 2) else s


def _lanczos_sum(z: float) -> float:
    total = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        total += _LANCZOS_COEF[i] / (z + i)
    return total


def gamma(x: float) -> float:
    """Real gamma function.

    Raises DomainError at the poles (nonpositive integers) and OverflowError
    above ~171.62 where the value exceeds double precision; use log_gamma
    there instead.
    """
    if math.isnan(x):
        raise DomainError("gamma: argument is NaN")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma: pole at nonpositive integer x={x!r}")
    if x < 0.5:
        # reflection: gamma(x) = pi / (sin(pi x) * gamma(1 - x))
        return math.pi / (_sinpi(x) * gamma(1.0 - x))
    if x > GAMMA_OVERFLOW_X:
        raise OverflowError(
            f"gamma overflows double precision for x={x!r} > {GAMMA_OVERFLOW_X}; "
            "use log_gamma")
    if x >= _STIRLING_MIN_X:
        # split power keeps the result in range and, unlike exp(log_gamma),
        # avoids amplifying the ~700*eps rounding of the log by exp
        p = math.pow(x, 0.5 * x - 0.25) * math.exp(-0.5 * x)
        value = _SQRT_TWO_PI * math.exp(_stirling_tail(x)) * p * p
    else:
        z = x - 1.0
        t = z + _LANCZOS_G + 0.5
        p = math.pow(t, 0.5 * z + 0.25) * math.exp(-0.5 * t)
        value = _SQRT_TWO_PI * _lanczos_sum(z) * p * p
    if math.isinf(value):
        raise OverflowError(f"gamma overflows double precision for x={x!r}")
    return value


def log_gamma(x: float) -> float:
    """ln(gamma(x)) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got x={x!r}")
    if x >= _STIRLING_MIN_X:
        return (math.log(_SQRT_TWO_PI) + (x - 0.5) * math.log(x) - x
                + _stirling_tail(x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return (math.log(_SQRT_TWO_PI) + (z + 0.5) * math.log(t) - t
            + math.log(_lanczos_sum(z)))


def rgamma(x: float) -> float:
    """1/gamma(x), finite everywhere; exactly 0.0 at the poles of gamma."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > GAMMA_OVERFLOW_X:
        return math.exp(-log_gamma(x))
    return 1.0 / gamma(x)


@dataclass(frozen=True)
class Hyp2F1Args:
    """Arguments of 2F1(a, b; c; z) on the principal interval z in [0, 1]."""

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self) -> None:
        if self.c <= 0.0 and self.c == math.floor(self.c):
            raise DomainError(
                f"hyp2f1 undefined for c a nonpositive integer, got c={self.c!r}")
        if not 0.0 <= self.z <= 1.0:
            raise DomainError(
                f"Hyp2F1Args restricts z to [0, 1], got z={self.z!r}; "
                "eval_hyp2f1 accepts z in [-9, 1]")


def _gauss_value_at_one(a: float, b: float, c: float) -> float:
    if c - a - b <= 0.0:
        raise DivergenceError(
            f"2F1(a,b;c;1) diverges for c-a-b={c - a - b!r} <= 0")
    # rgamma absorbs poles of the denominator (the limit value is then 0)
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def _series(a: float, b: float, c: float, z: float, spec: QuadratureSpec) -> float:
    # terms are geometric with ratio <= |z| <= 1/2 here, so running the sum
    # down to machine precision costs a handful of extra terms; the caller's
    # tolerance stays an upper bound on the error, never the target
    value = kernels.hyp2f1_series(a, b, c, z, min(spec.rel_tol, 1e-15), 10000)
    if math.isnan(value):
        raise ConvergenceError(
            f"hypergeometric series did not settle within 10000 terms at z={z!r}")
    return value


def _euler_integral(a: float, b: float, c: float, one_minus_z: float,
                    spec: QuadratureSpec) -> float:
    if not c > b > 0.0:
        raise DomainError(
            f"Euler-integral path needs c > b > 0, got b={b!r}, c={c!r}")
    raw, _err = kernels.hyp2f1_euler(a, b, c, one_minus_z, spec.rel_tol,
                                     spec.abs_tol, spec.max_levels)
    if math.isnan(raw):
        raise ConvergenceError(
            "Euler-integral quadrature for 2F1 did not converge at "
            f"1-z={one_minus_z!r}")
    pref = math.exp(log_gamma(c) - log_gamma(b) - log_gamma(c - b))
    return pref * raw


def eval_hyp2f1(a: float, b: float, c: float, z: float,
                spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """2F1(a, b; c; z) for real z in [-9, 1]."""
    if c <= 0.0 and c == math.floor(c):
        raise DomainError(
            f"hyp2f1 undefined for c a nonpositive integer, got c={c!r}")
    # the lower bound gets a few ulp of slack: the Pfaff map z/(z-1) of 0.9
    # rounds to just below -9
    if math.isnan(z) or z < -9.000000001 or z > 1.0:
        raise DomainError(f"eval_hyp2f1 supports z in [-9, 1], got z={z!r}")
    if z == 1.0:
        return _gauss_value_at_one(a, b, c)
    if abs(z) <= 0.5:
        return _series(a, b, c, z, spec)
    return _euler_integral(a, b, c, 1.0 - z, spec)


def eval_hyp2f1_near_one(a: float, b: float, c: float, one_minus_z: float,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """2F1 at z = 1 - one_minus_z with the distance to 1 taken exactly.

    Always evaluates through the Euler integral (never the closed form), so
    at one_minus_z = 0.0 it provides the independent limit value against
    which the Gauss formula can be checked. Diverges there unless
    c - a - b > 0.
    """
    if math.isnan(one_minus_z) or one_minus_z < 0.0 or one_minus_z > 10.0:
        raise DomainError(
            f"eval_hyp2f1_near_one supports 1-z in [0, 10], got {one_minus_z!r}")
    if c <= 0.0 and c == math.floor(c):
        raise DomainError(
            f"hyp2f1 undefined for c a nonpositive integer, got c={c!r}")
    if one_minus_z == 0.0 and c - a - b <= 0.0:
        raise DivergenceError(
            f"2F1(a,b;c;1) diverges for c-a-b={c - a - b!r} <= 0")
    if one_minus_z >= 0.5:
        # far from the boundary layer; 1 - one_minus_z is exact enough
        return eval_hyp2f1(a, b, c, 1.0 - one_minus_z, spec)
    return _euler_integral(a, b, c, one_minus_z, spec)


def hyp2f1(args: Hyp2F1Args, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """2F1 on the principal interval, closed form at z = 1."""
    return eval_hyp2f1(args.a, args.b, args.c, args.z, spec)


def hyp2f1_deriv(args: Hyp2F1Args, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z), z in [0, 1)."""
    if args.z == 1.0:
        raise DomainError("hyp2f1_deriv requires z in [0, 1)")
    lift = (args.a * args.b) / args.c
    return lift * eval_hyp2f1(args.a + 1.0, args.b + 1.0, args.c + 1.0,
                              args.z, spec)


def hyp2f1_ode_residual(args: Hyp2F1Args, spec: QuadratureSpec = DEFAULT_SPEC,
                        f_offset: float = 0.0) -> float:
    """Residual of the hypergeometric equation at z in (0, 1).

    Returns z(1-z) F'' + (c - (a+b+1) z) F' - ab F with both derivatives
    taken from the contiguous-shift formula, so a zero residual is a
    three-route consistency statement rather than a tautology. `f_offset`
    perturbs the F value only, which by linearity must shift the residual
    by exactly -ab*f_offset.
    """
    a, b, c, z = args.a, args.b, args.c, args.z
    if not 0.0 < z < 1.0:
        raise DomainError(f"ode residual defined for z in (0, 1), got z={z!r}")
    f0 = eval_hyp2f1(a, b, c, z, spec) + f_offset
    f1 = (a * b / c) * eval_hyp2f1(a + 1.0, b + 1.0, c + 1.0, z, spec)
    f2 = (a * b / c) * ((a + 1.0) * (b + 1.0) / (c + 1.0)) \
        * eval_hyp2f1(a + 2.0, b + 2.0, c + 2.0, z, spec)
    return z * (1.0 - z) * f2 + (c - (a + b + 1.0) * z) * f1 - a * b * f0
