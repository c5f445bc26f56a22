"""Benchmark the filter kernels: numba @njit build vs pure-numpy build.

The numpy path is what you get with SGF_BACKEND=numpy (or without numba
installed); the numba path is the default when numba imports. Workload
matches the pipeline's hot loop: an 80-frame 128x128 spike-count stack
pushed through the two-stage filter.
"""

import time

import numpy as np

from sgf._backend import HAS_NUMBA
from sgf import _kernels

FRAMES = 80
SIDE = 128
REPEATS = 20
PARAMS = (1, 2, 2, 2)  # delta_s, theta_s, delta_t, theta_t


def timeit(fn, *args, repeats=REPEATS):
    fn(*args)  # warmup (and JIT compile on the numba path)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append((time.perf_counter() - start) * 1000)
    return np.mean(times), np.std(times)


def main():
    rng = np.random.Generator(np.random.Philox(key=1))
    stack = rng.poisson(0.06, (FRAMES, SIDE, SIDE)).astype(np.int64)
    grid = stack[0]

    print(f"stack {FRAMES}x{SIDE}x{SIDE}, {REPEATS} repeats, params {PARAMS}")
    print(f"numba available: {HAS_NUMBA}")
    print()

    rows = []
    mean, std = timeit(_kernels._window_sum_numpy, grid, PARAMS[0])
    rows.append(("window_sum", "numpy", mean, std))
    mean, std = timeit(_kernels._st_filter_stack_numpy, stack, *PARAMS)
    rows.append(("st_filter_stack", "numpy", mean, std))

    if HAS_NUMBA:
        mean, std = timeit(_kernels._window_sum_numba, grid, PARAMS[0])
        rows.append(("window_sum", "numba", mean, std))
        mean, std = timeit(_kernels._st_filter_stack_numba, stack, *PARAMS)
        rows.append(("st_filter_stack", "numba", mean, std))
        ref = _kernels._st_filter_stack_numpy(stack, *PARAMS)
        got = _kernels._st_filter_stack_numba(stack, *PARAMS)
        assert np.array_equal(ref, got), "backends disagree"

    print(f"{'kernel':<17} {'backend':<7} {'mean':>9} {'std':>8}")
    for kernel, backend, mean, std in rows:
        print(f"{kernel:<17} {backend:<7} {mean:8.3f}ms {std:7.3f}ms")

    by_kernel = {}
    for kernel, backend, mean, _ in rows:
        by_kernel.setdefault(kernel, {})[backend] = mean
    print()
    for kernel, backends in by_kernel.items():
        if "numba" in backends:
            speedup = backends["numpy"] / backends["numba"]
            print(f"{kernel}: numba is {speedup:.1f}x the numpy build")


if __name__ == "__main__":
    main()
