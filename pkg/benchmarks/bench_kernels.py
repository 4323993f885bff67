"""Time each hot kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [n]
"""
import sys
import timeit

import numpy as np

from randstab import _kernels as K


def inputs(n, rng):
    u = np.pi * (1 - rng.random(n))
    v = np.pi * (rng.random(n) - 0.5)
    e = rng.standard_exponential(n)
    counts = rng.geometric(0.25, n // 4)
    vals = rng.random(counts.sum())
    a, b = np.sort(rng.random(n)), np.sort(rng.random(n))
    s = np.geomspace(0.01, 10, 16)
    return {
        "kanter_positive_stable": (u, e, 0.5),
        "cms_symmetric_stable": (v, e, 1.5),
        "segment_sum": (vals, counts),
        "ks_statistic": (a, b),
        "empirical_lt": (e, s),
    }


def main(n=1_000_000, repeat=5):
    args = inputs(n, np.random.default_rng(0))
    backends = [K.NUMPY] + ([K.NUMBA] if K.NUMBA is not None else [])
    for ns in backends:  # compile outside the timed region
        for name, a in args.items():
            getattr(ns, name)(*a)
    print(f"n = {n}, best of {repeat}")
    print(f"{'kernel':<24}" + "".join(f"{ns.name:>12}" for ns in backends) + f"{'speedup':>10}")
    for name, a in args.items():
        times = [min(timeit.repeat(lambda: getattr(ns, name)(*a), number=1, repeat=repeat))
                 for ns in backends]
        row = f"{name:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000)
