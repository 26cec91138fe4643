"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
numpy fallback is used. Set ``QCURV_BACKEND=python`` (or ``py``) to force the
fallback, ``QCURV_BACKEND=compiled`` (or ``c``/``cython``) to require the
extension and fail loudly when it is missing. Any other value means auto.
"""

from __future__ import annotations

import os

_requested = os.environ.get("QCURV_BACKEND", "").strip().lower()

if _requested in ("python", "py"):
    from . import _kernels_py as kernels
elif _requested in ("compiled", "c", "cython"):
    from . import _kernels as kernels  # type: ignore[no-redef]
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND_NAME: str = kernels.BACKEND_NAME


def backend_name() -> str:
    """Name of the kernel backend in use: "compiled" or "python"."""
    return BACKEND_NAME
