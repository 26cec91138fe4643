"""Action of integer and fractional Laplacian powers on radial power profiles.

Everything here is a closed form in gamma functions or a finite product; the
quadrature oracles that justify these formulas live in the extension module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ConformalParams
from .errors import DomainError
from .specfun import gamma, rgamma


@dataclass(frozen=True)
class PowerProfile:
    """The profile amplitude * r**(-s) on r > 0."""

    s: float
    amplitude: float

    def __post_init__(self) -> None:
        if not self.s > 0.0:
            raise DomainError(f"PowerProfile needs s > 0, got s={self.s!r}")
        if not self.amplitude > 0.0:
            raise DomainError(
                f"PowerProfile needs amplitude > 0, got {self.amplitude!r}")

    def __call__(self, r: float) -> float:
        if not r > 0.0:
            raise DomainError(f"PowerProfile defined for r > 0, got r={r!r}")
        return self.amplitude * r ** (-self.s)


def poly_power_constant(params: ConformalParams, s: float) -> float:
    """F(s, m) with (-Lap)^m r^(-s) = F(s, m) r^(-s-2m), as an exact product."""
    m = params.require_integer_order()
    if not s > 0.0:
        raise DomainError(f"poly_power_constant needs s > 0, got s={s!r}")
    value = 1.0
    for i in range(1, m + 1):
        value *= (s + 2 * i - 2) * (params.n - 2 * i - s)
    return value


def neumann_poly_coefficient(params: ConformalParams, s: float) -> float:
    """Coefficient of r^(-(s+2m-1)) in the outward normal derivative of
    (-Lap)^(m-1) r^(-s) on a sphere: -(s+2m-2) * F(s, m-1)."""
    m = params.require_integer_order()
    if not s > 0.0:
        raise DomainError(f"neumann_poly_coefficient needs s > 0, got s={s!r}")
    fprev = 1.0
    for i in range(1, m):
        fprev *= (s + 2 * i - 2) * (params.n - 2 * i - s)
    return -(s + 2 * m - 2) * fprev


def frac_power_constant(params: ConformalParams, s: float) -> float:
    """lambda(s) with (-Lap)^sigma r^(-s) = lambda(s) r^(-s-2sigma).

    Gamma-ratio form, valid on 0 < s <= n - 2 sigma. The upper endpoint is
    admitted because lambda vanishes there (the Riesz-kernel power is
    sigma-harmonic away from the origin) and the reciprocal gamma makes
    that zero exact rather than a 0*inf fight.
    """
    n, sigma = params.n, params.sigma
    if not 0.0 < s <= n - 2.0 * sigma:
        raise DomainError(
            f"frac_power_constant needs 0 < s <= n - 2*sigma = {n - 2 * sigma!r}, "
            f"got s={s!r}")
    return (2.0 ** (2.0 * sigma) * gamma((s + 2.0 * sigma) / 2.0)
            * gamma((n - s) / 2.0) * rgamma(s / 2.0)
            * rgamma((n - 2.0 * sigma - s) / 2.0))


def c2_constant(params: ConformalParams) -> float:
    """lambda at the bubble decay exponent s = (n - 2 sigma)/2.

    Equals 2^(2 sigma) * Gamma((n+2 sigma)/4)^2 / Gamma((n-2 sigma)/4)^2,
    and is positive on the whole admissible (n, sigma) range.
    """
    return frac_power_constant(params, (params.n - 2.0 * params.sigma) / 2.0)


def fundamental_exponent(params: ConformalParams) -> float:
    """The decay power n - 2 sigma where lambda vanishes."""
    return params.n - 2.0 * params.sigma


def _check_example() -> None:
    # quick self-consistency used during development; kept cheap
    p = ConformalParams(9, 2.0)
    assert math.isclose(poly_power_constant(p, 2.5), 2025.0 / 16.0)


if __name__ == "__main__":  # pragma: no cover
    _check_example()
