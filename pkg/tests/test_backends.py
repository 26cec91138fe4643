"""Parity between the compiled kernels and the numpy fallback, plus the
environment-variable selection switch."""

import os
import subprocess
import sys

import numpy as np
import pytest

from qcurv import _backend, _kernels_py

compiled = pytest.importorskip("qcurv._kernels",
                               reason="compiled extension not built")


def test_backend_names():
    assert _kernels_py.BACKEND_NAME == "python"
    assert compiled.BACKEND_NAME == "compiled"
    assert _backend.backend_name() in ("python", "compiled")


def test_series_parity():
    for a, b, c, z in ((0.5, 0.5, 1.5, 0.3), (0.625, 0.625, 2.5, -0.49),
                       (1.3, 0.2, 4.0, 0.5)):
        x = compiled.hyp2f1_series(a, b, c, z, 1e-15, 10000)
        y = _kernels_py.hyp2f1_series(a, b, c, z, 1e-15, 10000)
        assert x == pytest.approx(y, rel=1e-14)


def test_kernel_j_parity():
    for n, sigma, t in ((3, 0.5, 0.7), (5, 0.75, 2.0), (7, 0.9, 0.05)):
        xc, _ = compiled.kernel_j_w(n, sigma, t, 1e-10, 1e-14, 12)
        xp, _ = _kernels_py.kernel_j_w(n, sigma, t, 1e-10, 1e-14, 12)
        assert xc == pytest.approx(xp, rel=1e-12)
    tc, _ = compiled.kernel_j_theta(0.3, 1.1, 1e-10, 1e-14, 12)
    tp, _ = _kernels_py.kernel_j_theta(0.3, 1.1, 1e-10, 1e-14, 12)
    assert tc == pytest.approx(tp, rel=1e-12)


def test_convolve_parity():
    rng = np.random.default_rng(11)
    weights = rng.random(301)
    v = rng.random(200 + 300)
    a = compiled.cyl_convolve(v, weights, 200)
    b = _kernels_py.cyl_convolve(v, weights, 200)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_convolve_accepts_readonly():
    w = np.ones(5)
    v = np.ones(10)
    w.setflags(write=False)
    v.setflags(write=False)
    for mod in (compiled, _kernels_py):
        out = mod.cyl_convolve(v, w, 6)
        assert np.allclose(out, 5.0)


def test_convolve_length_check():
    for mod in (compiled, _kernels_py):
        with pytest.raises(ValueError):
            mod.cyl_convolve(np.ones(8), np.ones(5), 6)


@pytest.mark.parametrize("request_value,expect", [("python", "python"),
                                                  ("compiled", "compiled"),
                                                  ("", None)])
def test_env_selection(request_value, expect):
    env = dict(os.environ, QCURV_BACKEND=request_value)
    out = subprocess.run(
        [sys.executable, "-c",
         "from qcurv._backend import backend_name; print(backend_name())"],
        env=env, capture_output=True, text=True, check=True)
    got = out.stdout.strip()
    if expect is None:
        assert got in ("python", "compiled")  # auto mode
    else:
        assert got == expect
