"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported in the same process (kernels.NUMBA / kernels.NUMPY),
so the env flag is not needed here. Compile time is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from spacinglab import kernels
from spacinglab._accel import HAVE_NUMBA
from spacinglab.clump import SpacingFunction, _pair_weights


def _best(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    batch = rng.random((2000, 256))
    xs = np.sort(rng.random((2000, 64)) * 64, axis=1)
    l, r, v = SpacingFunction.indicator(1.0).arrays()
    w = _pair_weights(1, 64)
    x = np.array([np.sqrt(2) - 1, np.sqrt(3) - 1, np.sqrt(5) - 2])
    lo, hi = np.zeros(3), np.full(3, 0.5)
    return {
        "ks_circle 2000xN=256": lambda k: k.ks_circle(batch),
        "pair_sums 2000xN=64": lambda k: k.pair_sums(xs, w, l, r, v),
        "box_average 2e5 steps": lambda k: k.box_average(x, lo, hi, -1e4, 0.1, 200_000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print("%-24s %12s %12s %8s" % ("kernel", "numba [s]", "numpy [s]", "speedup"))
    for name, fn in cases(rng).items():
        tn = _best(lambda: fn(kernels.NUMBA), args.repeat)
        tp = _best(lambda: fn(kernels.NUMPY), args.repeat)
        print("%-24s %12.2e %12.2e %8.1f" % (name, tn, tp, tp / tn))


if __name__ == "__main__":
    main()
