"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--reps N]

Prints one line per kernel with the median wall time of each backend and
the speedup.  The first numba call (compilation) is excluded.
"""

import argparse
import time
from statistics import median

import numpy as np

from fractels import kernels
from fractels.digit_eval import _j_stack


def _median_s(fn, reps):
    fn()  # warm-up / jit
    ts = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return median(ts)


def cases(rng):
    n = 4097
    idx = rng.integers(0, n - 1, n)
    wt = rng.uniform(0, 1, n)
    s = np.full(n, 0.5)
    lam = rng.normal(size=n)
    y0 = np.zeros(n)
    J = _j_stack(10, 6, "float64")
    digits = rng.integers(0, 10, 200)
    v = rng.normal(size=7)
    c = rng.normal(size=7)
    return {
        "rb_iterate (4097 pts, 60 sweeps)": lambda be: be.rb_iterate(idx, wt, s, lam, y0, 60, 0.0),
        "digit_chain (deg 6, 200 digits)": lambda be: be.digit_chain(J, digits, v),
        "horner (deg 6)": lambda be: be.horner(c, 1.23),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if kernels.numba_backend is None:
        raise SystemExit("numba is not importable; nothing to compare")
    nb, npb = kernels.get_backend("numba"), kernels.get_backend("numpy")
    print(f"{'kernel':34s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}")
    for name, fn in cases(np.random.default_rng(args.seed)).items():
        a = _median_s(lambda: fn(nb), args.reps)
        b = _median_s(lambda: fn(npb), args.reps)
        print(f"{name:34s} {a * 1e6:10.1f}us {b * 1e6:10.1f}us {b / a:7.1f}x")


if __name__ == "__main__":
    main()
