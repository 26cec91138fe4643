"""Pure-Python/numpy fallback for the hot kernels.

Mirrors the compiled module `_kernels` function for function. Node sums are
evaluated in log space (contribution = exp(log-weight + log-integrand)) so
strongly singular endpoints neither overflow nor lose the endpoint distance,
which is carried exactly through the tanh-sinh `dd` tables.
"""

from __future__ import annotations

import math
from typing import Dict, Tuple

import numpy as np

BACKEND_NAME = "python"

_HALF_PI = math.pi / 2.0
_TS_T_MAX = math.asinh(345.0 / _HALF_PI)

_NAN = float("nan")

# per-level tanh-sinh tables, k = 0 excluded: (dd, ln_wf, ln(dd/2), log1p(-dd/2))
_TS_CACHE: Dict[int, Tuple[np.ndarray, ...]] = {}


def _ts_arrays(level: int) -> Tuple[np.ndarray, ...]:
    got = _TS_CACHE.get(level)
    if got is not None:
        return got
    h = 0.5 ** level
    ks = range(1, int(_TS_T_MAX / h) + 1) if level == 0 else \
        range(1, int(_TS_T_MAX / h) + 1, 2)
    dd_list = []
    wf_list = []
    for k in ks:
        t = k * h
        y = _HALF_PI * math.sinh(t)
        e = math.exp(-2.0 * y)
        dd = 2.0 * e / (1.0 + e)
        if dd == 0.0:
            break
        dd_list.append(dd)
        wf_list.append(_HALF_PI * math.cosh(t) * dd * (2.0 - dd))
    dd = np.asarray(dd_list)
    lnwf = np.log(np.asarray(wf_list))
    entry = (dd, lnwf, np.log(0.5 * dd), np.log1p(-0.5 * dd))
    _TS_CACHE[level] = entry
    return entry


def hyp2f1_series(a: float, b: float, c: float, z: float,
                  rel_tol: float, max_terms: int) -> float:
    """Gauss series sum; returns NaN when the three-small-terms rule fails."""
    term = 1.0
    total = 1.0
    small = 0
    for s in range(max_terms):
        term *= (a + s) * (b + s) / ((c + s) * (s + 1.0)) * z
        total += term
        if abs(term) <= rel_tol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    return _NAN


def hyp2f1_euler(a: float, b: float, c: float, one_minus_z: float,
                 rel_tol: float, abs_tol: float, max_levels: int
                 ) -> Tuple[float, float]:
    """tanh-sinh value of int_0^1 t^(b-1) (1-t)^(c-b-1) (1-z t)^(-a) dt.

    `one_minus_z` is taken exactly, so arguments arbitrarily close to z = 1
    (including z = 1 itself) keep full relative accuracy near the t = 1
    endpoint. No Beta prefactor is applied here.
    """
    omz = one_minus_z
    z = 1.0 - omz
    pb = b - 1.0
    pc = c - b - 1.0
    # midpoint node t = 1/2: ln t = ln(1-t) = ln 1/2, 1 - z t = (1 + omz)/2
    ln_half = math.log(0.5)
    mid = math.exp(pb * ln_half + pc * ln_half
                   - a * math.log(0.5 * (1.0 + omz)) + math.log(_HALF_PI))
    value = _NAN
    prev = _NAN
    diff = _NAN
    for level in range(0, max_levels + 1):
        dd, lnwf, l_half, l1m_half = _ts_arrays(level)
        # node on the left half: t = dd/2;  right half: 1 - t = dd/2
        lv_left = np.log1p(-0.5 * dd * z)
        lv_right = np.log(0.5 * dd + (1.0 - 0.5 * dd) * omz)
        s = float(np.sum(np.exp(pb * l_half + pc * l1m_half - a * lv_left + lnwf))
                  + np.sum(np.exp(pb * l1m_half + pc * l_half - a * lv_right + lnwf)))
        if level == 0:
            value = s + mid
        else:
            value = 0.5 * prev + (0.5 ** level) * s
            diff = abs(value - prev)
            if level >= 2 and diff <= max(abs_tol, rel_tol * abs(value)):
                return 0.5 * value, 0.5 * diff
        prev = value
    return _NAN, _NAN


def _log_base(tt: float, w: np.ndarray) -> np.ndarray:
    """log(2 cosh t - 2 w), stable for any t >= 0 and w in [-1, 1]."""
    if tt > 300.0:
        emt = math.exp(-tt)
        return tt + np.log1p((emt - 2.0 * w) * emt)
    ch2 = 4.0 * math.sinh(0.5 * tt) ** 2  # 2 cosh t - 2
    return np.log(ch2 + 2.0 * (1.0 - w))


def kernel_j_w(n: int, sigma: float, t: float, rel_tol: float, abs_tol: float,
               max_levels: int) -> Tuple[float, float]:
    """tanh-sinh value of int_{-1}^{1} (1-w^2)^((n-3)/2) (2 cosh t - 2w)^(-(n-2s)/2) dw."""
    tt = abs(t)
    q1 = 0.5 * (n - 3.0)
    q2 = 0.5 * (n - 2.0 * sigma)
    ch2 = 4.0 * math.sinh(0.5 * tt) ** 2 if tt <= 300.0 else _NAN
    # midpoint w = 0
    mid = math.exp(-q2 * float(_log_base(tt, np.array([0.0]))[0]) + math.log(_HALF_PI))
    value = _NAN
    prev = _NAN
    diff = _NAN
    for level in range(0, max_levels + 1):
        dd, lnwf, _, _ = _ts_arrays(level)
        lq = np.log(dd * (2.0 - dd))
        if tt > 300.0:
            emt = math.exp(-tt)
            lb_right = tt + np.log1p((emt - 2.0 + 2.0 * dd) * emt)
            lb_left = tt + np.log1p((emt + 2.0 - 2.0 * dd) * emt)
        else:
            lb_right = np.log(ch2 + 2.0 * dd)           # w = 1 - dd
            lb_left = np.log(ch2 + 4.0 - 2.0 * dd)      # w = -1 + dd
        s = float(np.sum(np.exp(q1 * lq - q2 * lb_right + lnwf))
                  + np.sum(np.exp(q1 * lq - q2 * lb_left + lnwf)))
        if level == 0:
            value = s + mid
        else:
            value = 0.5 * prev + (0.5 ** level) * s
            diff = abs(value - prev)
            if level >= 2 and diff <= max(abs_tol, rel_tol * abs(value)):
                return value, diff
        prev = value
    return _NAN, _NAN


def kernel_j_theta(sigma: float, t: float, rel_tol: float, abs_tol: float,
                   max_levels: int) -> Tuple[float, float]:
    """Full-angle kernel for n = 2: int_0^{2 pi} (2 cosh t - 2 cos th)^(sigma-1) d th."""
    tt = abs(t)
    q2 = 1.0 - sigma
    big = tt > 300.0
    emt = math.exp(-tt) if big else 0.0
    ch2 = 4.0 * math.sinh(0.5 * tt) ** 2 if not big else _NAN

    def level_sum(level: int) -> float:
        dd, lnwf, _, _ = _ts_arrays(level)
        sin_half = np.sin(_HALF_PI * dd)  # sin(theta/2) at theta = pi*dd
        if big:
            lb = tt + np.log1p((emt - 2.0 + 4.0 * sin_half ** 2) * emt)
        else:
            lb = np.log(ch2 + 4.0 * sin_half ** 2)
        # theta and 2 pi - theta give equal integrands
        return 2.0 * float(np.sum(np.exp(-q2 * lb + lnwf)))

    # midpoint theta = pi: base = 2 cosh t + 2
    if big:
        lb_mid = tt + math.log1p((emt + 2.0) * emt)
    else:
        lb_mid = math.log(ch2 + 4.0)
    mid = math.exp(-q2 * lb_mid + math.log(_HALF_PI))
    value = _NAN
    prev = _NAN
    diff = _NAN
    for level in range(0, max_levels + 1):
        s = level_sum(level)
        if level == 0:
            value = s + mid
        else:
            value = 0.5 * prev + (0.5 ** level) * s
            diff = abs(value - prev)
            if level >= 2 and diff <= max(abs_tol, rel_tol * abs(value)):
                return math.pi * value, math.pi * diff
        prev = value
    return _NAN, _NAN


def cyl_convolve(v_padded: np.ndarray, weights: np.ndarray, n_out: int) -> np.ndarray:
    """out[i] = sum_q weights[q] * v_padded[i + q] for i in range(n_out)."""
    out = np.correlate(v_padded, weights, mode="valid")
    if out.shape[0] != n_out:
        raise ValueError("padded profile length does not match the weight table")
    return out
