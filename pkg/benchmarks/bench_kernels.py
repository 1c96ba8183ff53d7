"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

The first numba call (compilation, or loading the on-disk cache) is reported separately.
"""

import argparse
import time

import numpy as np

from conerigid import kernels
from conerigid.enumeration import Bounds, _build_rows, _chunks
from conerigid.nfi import ResolutionGraph, all_graphs


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def scan_rows(bounds):
    nmax = bounds.N_max
    return [(_build_rows(bounds, n, cfg, nmax), nmax) for n, cfg in _chunks(bounds)]


def bench_scan(batches, use_numba):
    for rows, nmax in batches:
        kernels.scan_kernel(rows, nmax, use_numba=use_numba)


def bench_paths(adjs, use_numba):
    for adj, n in adjs:
        for top in range(1, n + 1):
            kernels.path_counts_kernel(adj, top, use_numba=use_numba)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    bounds = Bounds(3, 3, 2, 2)
    batches = scan_rows(bounds)
    nrows = sum(r.shape[0] for r, _ in batches)
    adjs = [(ResolutionGraph(N, N, arrows, (1,) * N).adjacency(), N)
            for N in range(1, 8) for arrows in all_graphs(N)]

    backends = [False] + ([True] if kernels.NUMBA_AVAILABLE else [])
    if kernels.NUMBA_AVAILABLE:
        t0 = time.perf_counter()
        kernels.scan_kernel(batches[0][0][:1], batches[0][1], use_numba=True)
        kernels.path_counts_kernel(adjs[0][0], 1, use_numba=True)
        print(f"first numba call (compile or cache load): {time.perf_counter() - t0:.2f} s")
    else:
        print("numba not installed; numpy fallback only")

    print(f"scan: {nrows} rows over {len(batches)} chunks; paths: {len(adjs)} graphs with N <= 7")
    for use_numba in backends:
        name = "numba" if use_numba else "numpy"
        ts = best_of(lambda: bench_scan(batches, use_numba), args.repeat)
        tp = best_of(lambda: bench_paths(adjs, use_numba), args.repeat)
        print(f"{name:>6}: scan {ts:.3f} s ({nrows / ts:,.0f} rows/s), path counts {tp:.3f} s")

    if kernels.NUMBA_AVAILABLE:
        for rows, nmax in batches:
            assert np.array_equal(kernels.scan_kernel(rows, nmax, use_numba=True),
                                  kernels.scan_kernel(rows, nmax, use_numba=False))
        print("backends agree on every scanned row")


if __name__ == "__main__":
    main()
