"""Radial and cylindrical integral-equation engine.

This module treats the critical-exponent integral equation

    u(x) = K(|x|) * integral of u(y)^tau / |x-y|^(n-2*sigma) dy

in its radial form.  After the substitution t = ln r, V(t) = r^((n-2*sigma)/2) u(r),
the equation becomes a convolution against a one-dimensional kernel J(t) whose
total mass C(n, sigma) controls the limit constant of bounded monotone
solutions.  The pieces provided here:

* ``RadialProfile`` / ``CylProfile``: immutable sampled profiles with CSV output.
* ``kernel_J`` and ``kernel_mass``: the kernel and its mass, with
  ``log_coth_mass`` as a second, independent route to C(3, 1/2) = pi^3.
* ``cyl_apply`` / ``solve_fixed_point``: the discrete convolution operator on a
  uniform t-grid and a damped fixed-point iteration around the constant
  solution A = (K_inf * C(n, sigma))^(-1/(tau-1)).
* ``kelvin_transform`` and the moving-sphere / ray-monotonicity diagnostics.
* ``bootstrap_exponent``: the geometric-sum exponent (tau^q - 1)/(tau - 1)
  produced by iterating the lower-bound argument q times.

The kernel quadrature is delegated to the active backend (compiled or pure
Python); everything else is plain numpy.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import core
from ._backend import kernels
from .core import (DEFAULT_SPEC, ConformalParams, QuadratureSpec, integrate,
                   sphere_area)
from .errors import ConvergenceError, DivergenceError, DomainError

__all__ = [
    "RadialProfile", "CylProfile", "ConvergenceLog",
    "bubble_profile", "power_profile", "cyl_grid",
    "kernel_J", "kernel_mass", "log_coth_mass",
    "cyl_apply", "solve_fixed_point",
    "kelvin_transform", "moving_sphere_deficit", "ray_monotonicity_W",
    "bootstrap_exponent",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    if out.ndim != 1:
        raise DomainError("profile arrays must be one-dimensional")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RadialProfile:
    """A radial function sampled on an increasing grid, with tail metadata.

    ``tail_exponent`` and ``tail_amplitude`` describe the asymptotic model
    u(r) ~ tail_amplitude * r^(-tail_exponent) used beyond ``radii[-1]``.
    ``extrapolated_indices`` flags grid points whose values were produced by
    extrapolation below the covered range (see ``kelvin_transform``).
    """

    radii: np.ndarray
    values: np.ndarray
    tail_exponent: float
    tail_amplitude: float
    extrapolated_indices: Tuple[int, ...] = ()

    def __post_init__(self):
        r = _readonly(self.radii)
        v = _readonly(self.values)
        if r.size < 2 or r.size != v.size:
            raise DomainError("need matching radii/values arrays with >= 2 points")
        if not np.all(np.isfinite(r)) or r[0] <= 0.0 or np.any(np.diff(r) <= 0.0):
            raise DomainError("radii must be finite, positive and strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise DomainError("values must be finite and nonnegative")
        if not (math.isfinite(self.tail_exponent) and math.isfinite(self.tail_amplitude)):
            raise DomainError("tail metadata must be finite")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "extrapolated_indices",
                           tuple(int(i) for i in self.extrapolated_indices))

    def is_standard_tail(self, params: ConformalParams, rel_tol: float = 1e-12) -> bool:
        """Whether the tail exponent is one of the two standard decay classes.

        Slow decay e = (n-2*sigma)/2 (the moving-sphere-invariant power) or
        fast decay e = n-2*sigma (bubble type).  Other exponents are allowed
        but mark the profile as outside the standard classification.
        """
        p = params.n - 2.0 * params.sigma
        return any(abs(self.tail_exponent - e) <= rel_tol * e for e in (0.5 * p, p))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("r,u\n")
            for r, v in zip(self.radii, self.values):
                fh.write(f"{float(r)!r},{float(v)!r}\n")


@dataclass(frozen=True)
class CylProfile:
    """A positive function V(t) on a uniform grid in t = ln r."""

    t_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = _readonly(self.t_grid)
        v = _readonly(self.values)
        if t.size < 2 or t.size != v.size:
            raise DomainError("need matching t_grid/values arrays with >= 2 points")
        d = np.diff(t)
        if not np.all(np.isfinite(t)) or d[0] <= 0.0:
            raise DomainError("t_grid must be finite and increasing")
        if np.max(np.abs(d - d[0])) > 1e-9 * d[0]:
            raise DomainError("t_grid must be uniformly spaced")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise DomainError("cylindrical values must be finite and positive")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,V\n")
            for t, v in zip(self.t_grid, self.values):
                fh.write(f"{float(t)!r},{float(v)!r}\n")


@dataclass(frozen=True)
class ConvergenceLog:
    """Per-iteration sup-norm residuals of the fixed-point iteration."""

    residuals: Tuple[float, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,residual\n")
            for i, res in enumerate(self.residuals, start=1):
                fh.write(f"{i},{float(res)!r}\n")


# ---------------------------------------------------------------------------
# grid and profile constructors


def cyl_grid(t_min: float = -12.0, t_max: float = 12.0,
             spacing: float = 0.05) -> np.ndarray:
    """Uniform grid in t = ln r; the default range makes the kernel truncation
    error exponentially small for every admissible (n, sigma)."""
    if not (t_max > t_min and spacing > 0.0):
        raise DomainError("need t_max > t_min and positive spacing")
    count = int(round((t_max - t_min) / spacing)) + 1
    return np.linspace(t_min, t_max, count)


def _log_radii(r_min: float, r_max: float, num: int) -> np.ndarray:
    if not (0.0 < r_min < r_max) or num < 2:
        raise DomainError("need 0 < r_min < r_max and num >= 2")
    return np.exp(np.linspace(math.log(r_min), math.log(r_max), num))


def bubble_profile(params: ConformalParams, r_min: float = 1e-2,
                   r_max: float = 1e2, num: int = 1201) -> RadialProfile:
    """The standard bubble (1 + r^2)^(-(n-2*sigma)/2) on a log-spaced grid.

    Fast-decay tail: exponent n - 2*sigma, amplitude 1.
    """
    p = params.n - 2.0 * params.sigma
    r = _log_radii(r_min, r_max, num)
    u = np.exp(-0.5 * p * np.log1p(r * r))
    return RadialProfile(r, u, tail_exponent=p, tail_amplitude=1.0)


def power_profile(params: ConformalParams, amplitude: float = 1.0,
                  r_min: float = 1e-2, r_max: float = 1e2,
                  num: int = 1201) -> RadialProfile:
    """The moving-sphere-invariant power A * r^(-(n-2*sigma)/2) (slow decay)."""
    if amplitude <= 0.0:
        raise DomainError("amplitude must be positive")
    p = params.n - 2.0 * params.sigma
    r = _log_radii(r_min, r_max, num)
    u = amplitude * np.power(r, -0.5 * p)
    return RadialProfile(r, u, tail_exponent=0.5 * p, tail_amplitude=amplitude)


# ---------------------------------------------------------------------------
# the kernel J and its mass


def kernel_J(params: ConformalParams, t: float,
             spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Angular kernel J(t) of the cylindrical convolution form.

    For n >= 3 this is |S^(n-2)| * int_{-1}^{1} (1-w^2)^((n-3)/2)
    (2 cosh t - 2 w)^(-(n-2*sigma)/2) dw; for n = 2 the full angular integral
    int_0^{2 pi} (2 cosh t - 2 cos theta)^(-(1-sigma)) d theta (the measure
    density degenerates at n = 2, so no (1-w^2) factor appears).  Even in t.

    The inner quadrature regularizes the w -> 1 corner through the term
    2 cosh t - 2 ~ t^2, so it can only resolve |t| down to roughly 1e-140;
    below that (and sigma <= 1/2) it reports non-convergence.  Callers that
    integrate over t should substitute away from such depths (see
    ``kernel_mass``).
    """
    t = float(t)
    if t == 0.0 and params.sigma <= 0.5:
        raise DivergenceError(
            "J(t) diverges at t=0 for sigma <= 1/2 (it stays integrable)")
    if params.n >= 3:
        value, _err = kernels.kernel_j_w(params.n, params.sigma, abs(t),
                                         spec.rel_tol, spec.abs_tol,
                                         spec.max_levels)
        if math.isnan(value):
            raise ConvergenceError(f"kernel quadrature failed at t={t!r}")
        return sphere_area(params.n - 1) * value
    value, _err = kernels.kernel_j_theta(params.sigma, abs(t), spec.rel_tol,
                                         spec.abs_tol, spec.max_levels)
    if math.isnan(value):
        raise ConvergenceError(f"kernel quadrature failed at t={t!r}")
    return value


def kernel_mass(params: ConformalParams,
                spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Total kernel mass C(n, sigma) = 2 * int_0^inf J(t) dt.

    The split at t = 1 keeps the integrable t -> 0 singularity (power type for
    sigma < 1/2, logarithmic at sigma = 1/2) inside a finite interval where
    the double-exponential nodes absorb it.
    """
    inner = QuadratureSpec(rel_tol=max(spec.rel_tol * 1e-2, 1e-13),
                           abs_tol=spec.abs_tol,
                           max_levels=spec.max_levels)

    def j(t: float) -> float:
        return kernel_J(params, t, inner)

    # Head in the variable t = x^(1/4): the quarter-power pullback keeps the
    # double-exponential nodes above the t-resolution floor of the kernel
    # quadrature while leaving a plain power singularity at x = 0 for them
    # to absorb (x^(-3/4) = t/x exactly, since t^4 = x).
    def head_integrand(x: float) -> float:
        t = x ** 0.25
        return 0.25 * j(t) * t / x

    head, _ = integrate(head_integrand, 0.0, 1.0, spec)
    tail, _ = integrate(j, 1.0, math.inf, spec)
    return 2.0 * (head + tail)


def log_coth_mass(spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Second route to C(3, 1/2): the kernel there is 2 pi ln coth(t/2), so
    C = 8 pi int_0^inf ln coth(u) du (= pi^3 analytically)."""
    value, _ = integrate(lambda u: -math.log(math.tanh(u)), 0.0, math.inf, spec)
    return 8.0 * math.pi * value


# ---------------------------------------------------------------------------
# discrete convolution operator on the cylinder
#
# T[V](t) = K_inf * int J(s) V^tau(t - s) ds is discretized once per
# (params, grid spacing) pair: fixed double-exponential nodes in s on (0, 1)
# and (1, inf), J cached at the nodes, and each node's weight distributed onto
# the two neighbouring grid offsets by linear hats.  The resulting symmetric
# weight table turns every application into a single discrete correlation.

_WEIGHTS_LOCK = threading.Lock()
_WEIGHTS_CACHE: Dict[Tuple, np.ndarray] = {}

_S_LEVEL = 6          # fixed refinement: node spacing 2^-6 in the DE variable
_DROP_FACTOR = 1e-20  # node contributions below this (relative) are discarded


def _s_nodes(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """Positions and weights of the fixed s-quadrature on (0, 1) u (1, inf).

    The (0, 1) piece carries the same s = x^(1/4) pullback as kernel_mass so
    that no node asks the kernel quadrature for a sub-resolvable t.
    """
    h = 0.5 ** level
    pos, wgt = [], []
    for lv in range(level + 1):
        for t, dd, wf in core._ts_level(lv):
            xs = (0.5 * dd,) if t == 0.0 else (0.5 * dd, 1.0 - 0.5 * dd)
            for x in xs:
                s = x ** 0.25
                pos.append(s)
                wgt.append(h * 0.5 * wf * 0.25 * s / x)
        for t, ey, wf in core._es_level(lv):
            if t == 0.0:
                pos.append(1.0 + ey)
                wgt.append(h * wf)
                continue
            pos.append(1.0 + ey)
            wgt.append(h * wf)
            pos.append(1.0 + 1.0 / ey)
            wgt.append(h * wf / (ey * ey))
    return np.asarray(pos), np.asarray(wgt)


def _conv_weights(params: ConformalParams, h_grid: float,
                  spec: QuadratureSpec) -> np.ndarray:
    key = (params.n, params.sigma, h_grid, spec.rel_tol, spec.abs_tol,
           spec.max_levels)
    with _WEIGHTS_LOCK:
        got = _WEIGHTS_CACHE.get(key)
    if got is not None:
        return got

    inner = QuadratureSpec(rel_tol=max(spec.rel_tol * 1e-2, 1e-13),
                           abs_tol=spec.abs_tol, max_levels=spec.max_levels)
    pos, wgt = _s_nodes(_S_LEVEL)
    contrib = wgt * np.array([kernel_J(params, s, inner) for s in pos])
    keep = contrib >= _DROP_FACTOR * float(np.sum(contrib))
    pos, contrib = pos[keep], contrib[keep]

    frac = pos / h_grid
    upper = np.ceil(frac).astype(int)
    f = upper - frac
    dmax = int(upper.max())
    half = np.zeros(dmax + 1)
    np.add.at(half, upper, contrib * (1.0 - f))
    np.add.at(half, upper - 1, contrib * f)

    full = np.zeros(2 * dmax + 1)
    full[dmax:] += half
    full[dmax::-1] += half
    full.setflags(write=False)
    with _WEIGHTS_LOCK:
        _WEIGHTS_CACHE.setdefault(key, full)
    return full


def cyl_apply(params: ConformalParams, V: CylProfile, k_infinity: float,
              spec: QuadratureSpec = DEFAULT_SPEC) -> CylProfile:
    """One application of T[V](t) = K_inf * int J(s) V^tau(t-s) ds.

    V is constant-extended beyond its grid, matching the bounded monotone
    limit structure the operator is used to probe.
    """
    if not (k_infinity > 0.0 and math.isfinite(k_infinity)):
        raise DomainError("k_infinity must be positive and finite")
    full = _conv_weights(params, V.spacing, spec)
    pad = (full.size - 1) // 2
    vt = np.power(V.values, params.tau)
    padded = np.pad(vt, pad, mode="edge")
    out = kernels.cyl_convolve(np.ascontiguousarray(padded),
                               np.ascontiguousarray(full), vt.size)
    return CylProfile(V.t_grid, k_infinity * np.asarray(out))


def solve_fixed_point(params: ConformalParams, k_infinity: float,
                      initial: CylProfile, damping: float = 0.5,
                      max_iters: int = 500, tol: float = 1e-6,
                      spec: QuadratureSpec = DEFAULT_SPEC
                      ) -> Tuple[CylProfile, ConvergenceLog]:
    """Damped fixed-point iteration for V = T[V] around the constant solution.

    The raw Picard map V <- (1-theta) V + theta T[V] is repelling at the
    fixed point (linearized multiplier 1 + theta (tau - 1) > 1 for the
    supercritical power tau > 1), so the damping is applied to the
    equivalent rearranged update V <- (1-theta) V + theta V^2 / T[V], whose
    constant-mode multiplier 1 - theta (tau - 1) contracts for
    theta < 2/(tau - 1).  The reported residual stays the honest
    sup-norm defect |T[V] - V| of the original equation.

    Divergence (50 consecutive residual increases) returns the current
    iterate with ``converged=False`` rather than raising.  Note that the
    trivial profile is also a sup-norm fixed point: initial data far outside
    the basin of the constant A can collapse toward zero and report
    convergence there; the returned profile shows which limit was reached.
    """
    if not (0.0 < damping <= 1.0):
        raise DomainError("damping must lie in (0, 1]")
    if max_iters < 1:
        raise DomainError("max_iters must be >= 1")
    v = initial.values.copy()
    residuals = []
    converged = False
    prev = math.inf
    growth = 0
    for _ in range(max_iters):
        tv = cyl_apply(params, CylProfile(initial.t_grid, v), k_infinity,
                       spec).values
        resid = float(np.max(np.abs(tv - v)))
        residuals.append(resid)
        if resid <= tol:
            converged = True
            break
        growth = growth + 1 if resid > prev else 0
        if growth >= 50:
            break
        prev = resid
        v = (1.0 - damping) * v + damping * v * v / tv
    profile = CylProfile(initial.t_grid, v)
    return profile, ConvergenceLog(tuple(residuals), converged)


# ---------------------------------------------------------------------------
# Kelvin transform and the moving-sphere diagnostics


def kelvin_transform(profile: RadialProfile, params: ConformalParams,
                     lam: float) -> RadialProfile:
    """Kelvin reflection u_lam(r) = (lam/r)^(n-2*sigma) * u(lam^2/r).

    Evaluation of u at lam^2/r uses monotone cubic interpolation on log-log
    axes inside the grid and the tail model beyond it.  Queries below the
    grid use a secant extension of the first two points and are flagged in
    ``extrapolated_indices`` of the result.
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise DomainError("lambda must be positive and finite")
    if np.any(profile.values <= 0.0):
        raise DomainError("log-log interpolation needs strictly positive values")
    p = params.n - 2.0 * params.sigma
    ln_r = np.log(profile.radii)
    ln_u = np.log(profile.values)
    interp = PchipInterpolator(ln_r, ln_u, extrapolate=False)

    ln_q = 2.0 * math.log(lam) - ln_r[::-1]   # ln(lam^2 / r), increasing
    # the log/exp round-trip jitters end queries by an ulp; snap those back
    # onto the covered range so exact-boundary points are not misclassified
    snap = 1e-12 * max(1.0, abs(ln_r[0]), abs(ln_r[-1]))
    np.copyto(ln_q, ln_r[0], where=(ln_q >= ln_r[0] - snap) & (ln_q < ln_r[0]))
    np.copyto(ln_q, ln_r[-1], where=(ln_q <= ln_r[-1] + snap) & (ln_q > ln_r[-1]))
    ln_uq = np.empty_like(ln_q)
    inside = (ln_q >= ln_r[0]) & (ln_q <= ln_r[-1])
    ln_uq[inside] = interp(ln_q[inside])

    above = ln_q > ln_r[-1]
    if np.any(above):
        if profile.tail_amplitude <= 0.0:
            raise DomainError("tail extrapolation needs a positive amplitude")
        ln_uq[above] = (math.log(profile.tail_amplitude)
                        - profile.tail_exponent * ln_q[above])

    head_slope = (ln_u[1] - ln_u[0]) / (ln_r[1] - ln_r[0])
    below = ln_q < ln_r[0]
    if np.any(below):
        ln_uq[below] = ln_u[0] + head_slope * (ln_q[below] - ln_r[0])

    ln_out = p * (math.log(lam) - ln_r) + ln_uq[::-1]
    flagged = tuple(int(i) for i in np.nonzero(below[::-1])[0])

    # The output tail (r -> inf) probes u near zero, where the profile looks
    # like u(r_min) * (q/r_min)^head_slope; folding that through the
    # reflection gives exponent p + head_slope.
    tail_e = p + head_slope
    tail_a = math.exp((p + 2.0 * head_slope) * math.log(lam)
                      + ln_u[0] - head_slope * ln_r[0])
    return RadialProfile(profile.radii, np.exp(ln_out), tail_exponent=tail_e,
                         tail_amplitude=tail_a, extrapolated_indices=flagged)


def moving_sphere_deficit(profile: RadialProfile, params: ConformalParams,
                          lam: float) -> float:
    """min over grid radii r < lam of (u_lam(r) - u(r)); >= 0 certifies the
    inside-the-sphere comparison u_lam >= u at grid resolution."""
    reflected = kelvin_transform(profile, params, lam)
    mask = profile.radii < lam
    if not np.any(mask):
        raise DomainError("no grid radii inside the sphere radius lambda")
    return float(np.min(reflected.values[mask] - profile.values[mask]))


def ray_monotonicity_W(profile: RadialProfile, params: ConformalParams) -> float:
    """min over consecutive grid pairs of W(r_{i+1}) - W(r_i) for the
    invariant combination W = r^((n-2*sigma)/2) u(r); >= 0 certifies
    monotone W at grid resolution."""
    w = np.power(profile.radii, 0.5 * (params.n - 2.0 * params.sigma)) \
        * profile.values
    return float(np.min(np.diff(w)))


# ---------------------------------------------------------------------------
# bootstrap exponent


def bootstrap_exponent(tau: float, q: int) -> float:
    """Exponent (tau^q - 1)/(tau - 1) reached after q lower-bound bootstrap
    steps, built by the defining recurrence e <- tau*e + 1 so that
    bootstrap_exponent(tau, q+1) == tau * bootstrap_exponent(tau, q) + 1
    holds exactly in floating arithmetic.
    """
    if not (tau > 1.0 and math.isfinite(tau)):
        raise DomainError("tau must be a finite real > 1")
    if int(q) != q or q < 1:
        raise DomainError("q must be an integer >= 1")
    e = 1.0
    for _ in range(int(q) - 1):
        e = tau * e + 1.0
        if math.isinf(e):
            raise OverflowError(
                f"bootstrap exponent overflows double precision at q={q}")
    return e
