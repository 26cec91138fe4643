"""Compare the compiled kernels against the pure-numpy fallback.

Times the three hot paths (hypergeometric series, cylindrical kernel
quadrature, banded convolution) on realistic workloads and prints the
per-call time of each backend plus the speedup.  The fallback module is
imported directly so both implementations run in one process regardless of
which backend the package itself selected.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from qcurv import _kernels_py

try:
    from qcurv import _kernels
except ImportError:
    _kernels = None


def best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def work_series(mod):
    def run():
        acc = 0.0
        for z in np.linspace(-0.5, 0.5, 400):
            acc += mod.hyp2f1_series(0.625, 0.625, 2.5, float(z), 1e-15, 10000)
        return acc
    return run


def work_kernel(mod):
    ts = np.linspace(0.05, 8.0, 100)

    def run():
        acc = 0.0
        for t in ts:
            val, _ = mod.kernel_j_w(3, 0.5, float(t), 1e-10, 1e-14, 12)
            acc += val
        return acc
    return run


def work_convolve(mod):
    rng = np.random.default_rng(7)
    n_out = 481
    weights = rng.random(889)
    v = rng.random(n_out + weights.size - 1)

    def run():
        out = None
        for _ in range(50):
            out = mod.cyl_convolve(v, weights, n_out)
        return out
    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats, best is kept (default 5)")
    args = ap.parse_args()

    jobs = [("hyp2f1 series x400", work_series),
            ("kernel J(t) quadrature x100", work_kernel),
            ("convolution 481x889 x50", work_convolve)]

    print(f"{'workload':32s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for label, make in jobs:
        t_py = best_of(args.repeats, make(_kernels_py))
        if _kernels is None:
            print(f"{label:32s} {t_py * 1e3:10.2f}ms {'n/a':>12s} {'n/a':>9s}")
            continue
        # sanity: both backends must agree before their timings mean anything
        ref, new = make(_kernels_py)(), make(_kernels)()
        err = np.max(np.abs(np.asarray(ref) - np.asarray(new)))
        rel = err / max(np.max(np.abs(np.asarray(ref))), 1e-300)
        if rel > 1e-12:
            raise AssertionError(f"{label}: backends disagree, rel {rel!r}")
        t_c = best_of(args.repeats, make(_kernels))
        print(f"{label:32s} {t_py * 1e3:10.2f}ms {t_c * 1e3:10.2f}ms "
              f"{t_py / t_c:8.1f}x")

    if _kernels is None:
        print("\ncompiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
