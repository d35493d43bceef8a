"""Benchmark the compiled kernel lane against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

The numpy lane leans on BLAS for the dense products, so the interesting
comparison is the Jacobi eigensolver (tight rotation loops) versus the
GEMM-shaped kernels where BLAS is already close to optimal.
"""

import argparse
import time

import numpy as np

from momentumlab import _pykernels

try:
    from momentumlab import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled lane unavailable; rebuild with the extension to compare")
        return

    rng = np.random.default_rng(0)
    cases = []

    m, n, d = 4000, 128, 64
    W = rng.normal(size=(m, d))
    a = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    X = rng.normal(size=(n, d))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    delta = rng.normal(size=n)
    cases.append(("relu_forward (m=%d n=%d d=%d)" % (m, n, d), "relu_forward", (W, a, X)))
    cases.append(("relu_grad    (m=%d n=%d d=%d)" % (m, n, d), "relu_grad", (W, a, X, delta)))
    cases.append(("gram_counts  (m=%d n=%d d=%d)" % (m, n, d), "gram_counts", (W, X)))

    for order in (60, 150, 300):
        S = rng.normal(size=(order, order))
        S = 0.5 * (S + S.T)
        cases.append(("jacobi_extremes (n=%d)" % order, "jacobi_extremes", (S,)))

    print("%-36s %12s %12s %9s" % ("kernel", "pure [ms]", "compiled [ms]", "speedup"))
    for label, name, fnargs in cases:
        tp = _time(getattr(_pykernels, name), fnargs, args.repeats)
        tc = _time(getattr(_ckernels, name), fnargs, args.repeats)
        print("%-36s %12.3f %12.3f %8.1fx" % (label, tp * 1e3, tc * 1e3, tp / tc))


if __name__ == "__main__":
    main()
