"""Numerical verification toolkit for conformally invariant integral and
differential identities built around radial power profiles.

Subpackage layout:

- ``core``      tanh-sinh / Gauss-Kronrod quadrature engine
- ``specfun``   gamma and Gauss hypergeometric evaluation
- ``fraclap``   fractional and polyharmonic Laplacians of radial powers
- ``extension`` weighted harmonic extension of the standard bubble
- ``pohozaev``  Pohozaev-type boundary integrals and balance checks
- ``inteq``     radial integral equation: kernels, fixed point, Kelvin maps
- ``verify``    named verification suites used by the CLI
"""

from ._backend import backend_name
from .core import ConformalParams, QuadratureSpec, Scheme, integrate, sphere_area
from .errors import ConvergenceError, DivergenceError, DomainError, ExtrapolationError

__version__ = "0.1.0"

__all__ = [
    "ConformalParams",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "ExtrapolationError",
    "QuadratureSpec",
    "Scheme",
    "backend_name",
    "integrate",
    "sphere_area",
    "__version__",
]
