"""Timing comparison of the numpy and numba backends on the hot kernels.

Run from the repository root:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --points 4000000 --repeats 7

The first numba call includes jit compilation; a warmup call is made
before timing so the table reports steady-state numbers.
"""

import argparse
import statistics
import time

import numpy as np

from gvflat import get_backend, set_backend
from gvflat._backend import _numba_importable
from gvflat.genus0 import _resummed_double_sum
from gvflat.kernelquad import _kernel_vals, _pde_residual_vals


def _time(fn, repeats):
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def _cases(points):
    rng = np.random.default_rng(0)
    eps = rng.uniform(0.1, 3.0, size=points)
    sigma = rng.uniform(0.01, 10.0, size=points)
    return [
        ("kernel_vals", lambda: _kernel_vals(0.35, sigma)),
        ("pde_residual_vals", lambda: _pde_residual_vals(eps, sigma)),
        ("resummed_double_sum", lambda: _resummed_double_sum(
            0.3, 0.3, 1.0, 400, 400)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="benchmark the numpy vs numba hot-kernel backends")
    parser.add_argument("--points", type=int, default=2_000_000,
                        help="array length for the pointwise kernels")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed runs per case (median reported)")
    args = parser.parse_args(argv)

    cases = _cases(args.points)
    backends = ["numpy"]
    if _numba_importable():
        backends.append("numba")
    else:
        print("numba not importable; timing numpy only")

    results = {}
    for backend in backends:
        set_backend(backend)
        assert get_backend() == backend
        for name, fn in cases:
            fn()  # warmup; compiles on first call under numba
            results[(backend, name)] = _time(fn, args.repeats)

    width = max(len(name) for name, _ in cases)
    header = f"{'case':<{width}}  {'numpy':>10}"
    if "numba" in backends:
        header += f"  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, _ in cases:
        t_np = results[("numpy", name)]
        line = f"{name:<{width}}  {t_np * 1e3:>8.2f}ms"
        if "numba" in backends:
            t_nb = results[("numba", name)]
            line += f"  {t_nb * 1e3:>8.2f}ms  {t_np / t_nb:>7.2f}x"
        print(line)

    set_backend("auto")


if __name__ == "__main__":
    main()
