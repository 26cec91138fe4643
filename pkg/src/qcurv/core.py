"""Shared numeric core: parameter records and deterministic 1-D quadrature.

The integrator is the oracle for every closed form in the package, so it is
kept in plain Python: fixed node ordering, fixed refinement schedule, and no
state that could make two identical calls disagree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

from .errors import ConvergenceError, DomainError

_HALF_PI = math.pi / 2.0

# Node tables stop once the unit-interval endpoint distance underflows the
# comfortable double range; beyond this the weights are zero anyway.
_TS_Y_MAX = 345.0
_TS_T_MAX = math.asinh(_TS_Y_MAX / _HALF_PI)
_ES_Y_MAX = 690.0
_ES_T_MAX = math.asinh(_ES_Y_MAX / _HALF_PI)


class Scheme(enum.Enum):
    """Quadrature scheme selector."""

    DOUBLE_EXPONENTIAL = "double-exponential"
    ADAPTIVE_SUBDIVISION = "adaptive-subdivision"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget knobs shared by every quadrature-backed routine."""

    scheme: Scheme = Scheme.DOUBLE_EXPONENTIAL
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_levels: int = 12
    max_subdivisions: int = 4000

    def __post_init__(self):
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not (self.rel_tol > 0.0):
            raise DomainError("rel_tol must be positive")
        if not (self.abs_tol > 0.0):
            raise DomainError("abs_tol must be positive")
        if int(self.max_levels) != self.max_levels or self.max_levels < 2:
            raise DomainError("max_levels must be an integer >= 2")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class ConformalParams:
    """Dimension and operator order (n, sigma) with the derived exponents.

    sigma may be any real in (0, n/2); integer sigma selects the polyharmonic
    regime and is exposed through ``m``.
    """

    n: int
    sigma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("dimension n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not (0.0 < self.sigma < self.n / 2.0):
            raise DomainError("sigma must lie in (0, n/2)")

    @property
    def tau(self) -> float:
        """Critical nonlinearity exponent (n + 2 sigma)/(n - 2 sigma)."""
        return (self.n + 2.0 * self.sigma) / (self.n - 2.0 * self.sigma)

    @property
    def b(self) -> float:
        """Extension weight exponent 1 - 2 sigma (meaningful for sigma in (0,1))."""
        return 1.0 - 2.0 * self.sigma

    @property
    def m(self) -> Optional[int]:
        """Integer order when sigma is a whole number, else None."""
        k = int(round(self.sigma))
        return k if self.sigma == k and k >= 1 else None

    def require_integer_order(self) -> int:
        if self.m is None:
            raise DomainError(f"sigma={self.sigma} is not a positive integer order")
        return self.m

    def require_fractional(self) -> None:
        if not (0.0 < self.sigma < 1.0):
            raise DomainError(f"sigma={self.sigma} must lie in (0, 1) here")


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n: 2 pi^{n/2}/Gamma(n/2)."""
    if int(n) != n or n < 1:
        raise DomainError("sphere_area needs an integer dimension n >= 1")
    n = int(n)
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


# ---------------------------------------------------------------------------
# double-exponential node tables, cached per refinement level


@lru_cache(maxsize=None)
def _ts_level(level: int) -> Tuple[Tuple[float, float, float], ...]:
    """tanh-sinh nodes for one refinement level.

    Returns (t, dd, wf) triples where dd is the exact distance of the unit
    node to the nearer endpoint (1 - |tanh(y)|) and wf = (pi/2) cosh(t) *
    dd * (2 - dd) is the weight factor before the h and half-width scaling.
    Level 0 holds all integer multiples of h=1 (including t=0); level L > 0
    holds the odd multiples of h = 2^-L.
    """
    h = 0.5 ** level
    ks = range(0, int(_TS_T_MAX / h) + 1) if level == 0 else \
        range(1, int(_TS_T_MAX / h) + 1, 2)
    out = []
    for k in ks:
        t = k * h
        y = _HALF_PI * math.sinh(t)
        e = math.exp(-2.0 * y)
        dd = 2.0 * e / (1.0 + e)
        if dd == 0.0:
            break
        wf = _HALF_PI * math.cosh(t) * dd * (2.0 - dd)
        out.append((t, dd, wf))
    return tuple(out)


@lru_cache(maxsize=None)
def _es_level(level: int) -> Tuple[Tuple[float, float, float], ...]:
    """exp-sinh nodes for one level: (t, e^y, wf) with wf = (pi/2) cosh(t) e^y."""
    h = 0.5 ** level
    ks = range(0, int(_ES_T_MAX / h) + 1) if level == 0 else \
        range(1, int(_ES_T_MAX / h) + 1, 2)
    out = []
    for k in ks:
        t = k * h
        y = _HALF_PI * math.sinh(t)
        if abs(y) > _ES_Y_MAX:
            break
        ey = math.exp(y)
        out.append((t, ey, _HALF_PI * math.cosh(t) * ey))
    return tuple(out)


def _check_sample(fx: float, x: float) -> float:
    if not math.isfinite(fx):
        raise DomainError(f"integrand returned a non-finite value at x={x!r}")
    return fx


def _de_levels(eval_level: Callable[[int, float], float], spec: QuadratureSpec,
               scale: float) -> Tuple[float, float]:
    """Shared refinement driver: halve h until two level estimates agree."""
    value = eval_level(0, 0.0)  # h = 1 at level 0
    prev = value
    diff = math.inf
    for level in range(1, spec.max_levels + 1):
        h = 0.5 ** level
        value = 0.5 * prev + h * eval_level(level, abs(prev))
        diff = abs(value - prev)
        if level >= 2 and diff <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            return value * scale, diff * abs(scale)
        prev = value
    raise ConvergenceError(
        f"double-exponential quadrature did not converge in {spec.max_levels} levels",
        best_estimate=prev * scale, err_estimate=diff * abs(scale))


def _tanh_sinh(f: Callable[[float], float], a: float, b: float,
               spec: QuadratureSpec) -> Tuple[float, float]:
    hw = 0.5 * (b - a)
    tiny_streak_cap = 16

    def eval_level(level: int, running: float) -> float:
        acc = 0.0
        streak = 0
        h = 0.5 ** level
        thr = 0.01 * max(spec.abs_tol, spec.rel_tol * running) / (h * hw)
        for t, dd, wf in _ts_level(level):
            d = hw * dd
            if t == 0.0:
                term = wf * _check_sample(f(a + d), a + d)  # midpoint: dd == 1
            else:
                xl = a + d
                xr = b - d
                term = wf * (_check_sample(f(xl), xl) + _check_sample(f(xr), xr))
            acc += term
            if abs(term) < thr:
                streak += 1
                if streak >= tiny_streak_cap:
                    break
            else:
                streak = 0
        return acc

    return _de_levels(eval_level, spec, hw)


def _exp_sinh(f: Callable[[float], float], a: float, sign: float,
              spec: QuadratureSpec) -> Tuple[float, float]:
    """Map (a, +inf) via x = a + e^y (sign=+1) or (-inf, a) via x = a - e^y.

    Both orientations integrate with positive measure, so the returned value
    needs no sign flip.
    """
    tiny_streak_cap = 16

    def eval_level(level: int, running: float) -> float:
        acc = 0.0
        streak = 0
        h = 0.5 ** level
        thr = 0.01 * max(spec.abs_tol, spec.rel_tol * running) / h
        for t, ey, wf in _es_level(level):
            if t == 0.0:
                x = a + sign * ey
                term = wf * _check_sample(f(x), x)
            else:
                xn = a + sign / ey
                xf = a + sign * ey
                term = wf / (ey * ey) * _check_sample(f(xn), xn) \
                    + wf * _check_sample(f(xf), xf)
            acc += term
            if abs(term) < thr:
                streak += 1
                if streak >= tiny_streak_cap:
                    break
            else:
                streak = 0
        return acc

    return _de_levels(eval_level, spec, 1.0)


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod subdivision (alternative scheme)

_XGK = (0.991455371120813, 0.949107912342759, 0.864864423359769,
        0.741531185599394, 0.586087235467691, 0.405845151377397,
        0.207784955007898, 0.0)
_WGK = (0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728)
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119,
       0.417959183673469)


def _gk15(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    mid = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    fc = _check_sample(f(mid), mid)
    k = _WGK[7] * fc
    g = _WG[3] * fc
    for i in range(7):
        x = hw * _XGK[i]
        fl = _check_sample(f(mid - x), mid - x)
        fr = _check_sample(f(mid + x), mid + x)
        k += _WGK[i] * (fl + fr)
        if i % 2 == 1:
            g += _WG[i // 2] * (fl + fr)
    return k * hw, abs(k - g) * abs(hw)


def _adaptive_gk(f: Callable[[float], float], a: float, b: float,
                 spec: QuadratureSpec) -> Tuple[float, float]:
    whole, _ = _gk15(f, a, b)
    tol = max(spec.abs_tol, spec.rel_tol * abs(whole))
    span = b - a
    total = 0.0
    total_err = 0.0
    stack = [(a, b)]
    used = 0
    while stack:
        lo, hi = stack.pop()
        val, err = _gk15(f, lo, hi)
        if err <= tol * (hi - lo) / span or (hi - lo) < 1e-15 * span:
            total += val
            total_err += err
            continue
        used += 1
        if used > spec.max_subdivisions:
            raise ConvergenceError(
                f"adaptive subdivision exceeded {spec.max_subdivisions} splits",
                best_estimate=total + val, err_estimate=total_err + err)
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi))
        stack.append((lo, mid))
    return total, total_err


def _map_half_line(f: Callable[[float], float], a: float, sign: float):
    def g(u: float) -> float:
        w = 1.0 - u
        x = a + sign * u / w
        return f(x) / (w * w)
    return g


def integrate(f: Callable[[float], float], a: float, b: float,
              spec: QuadratureSpec = DEFAULT_SPEC) -> Tuple[float, float]:
    """Integrate f over (a, b) and return (value, err_estimate).

    Either endpoint may be infinite; doubly infinite ranges are split at 0.
    Endpoint power/log singularities are handled by the double-exponential
    scheme. A strong singularity is resolved most accurately when it sits at
    an endpoint equal to 0.0, where node offsets are exact floats.
    Raises ConvergenceError (carrying the best estimate) when the refinement
    budget runs out and DomainError on non-finite samples.
    """
    if not isinstance(spec, QuadratureSpec):
        raise DomainError("spec must be a QuadratureSpec")
    if math.isnan(a) or math.isnan(b) or b == -math.inf or a == math.inf:
        raise DomainError("integration bounds must satisfy a < b")
    if not a < b:
        raise DomainError("integration bounds must satisfy a < b")

    lo_inf = a == -math.inf
    hi_inf = b == math.inf
    if lo_inf and hi_inf:
        v1, e1 = integrate(f, a, 0.0, spec)
        v2, e2 = integrate(f, 0.0, b, spec)
        return v1 + v2, e1 + e2

    if spec.scheme is Scheme.DOUBLE_EXPONENTIAL:
        if hi_inf:
            return _exp_sinh(f, a, 1.0, spec)
        if lo_inf:
            return _exp_sinh(f, b, -1.0, spec)
        return _tanh_sinh(f, a, b, spec)

    if hi_inf:
        return _adaptive_gk(_map_half_line(f, a, 1.0), 0.0, 1.0, spec)
    if lo_inf:
        # x = b - u/(1-u) walks from b down to -inf; the orientation flip
        # cancels the negative Jacobian, so no sign change is needed.
        return _adaptive_gk(_map_half_line(f, b, -1.0), 0.0, 1.0, spec)
    return _adaptive_gk(f, a, b, spec)
