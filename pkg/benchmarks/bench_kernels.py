#!/usr/bin/env python3
"""Benchmark the compiled Cython kernels against the pure-numpy fallback.

Runs each hot kernel on realistic workloads (the sizes the symbol grids
and torus extractions actually use) and prints the speedup.  The two
implementations are imported side by side, so this works regardless of
which one the package selected at import time.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from husimi_kit import _kernels_py

try:
    from husimi_kit import _kernels
except ImportError:
    _kernels = None


def bench(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_case(name, args_py, args_cy):
    t_py = bench(getattr(_kernels_py, name), *args_py)
    if _kernels is None:
        print(f"{name:30s}  python {t_py * 1e3:8.2f} ms   (no compiled kernels)")
        return
    t_cy = bench(getattr(_kernels, name), *args_cy)
    out_py = getattr(_kernels_py, name)(*args_py)
    out_cy = getattr(_kernels, name)(*args_cy)
    agree = np.abs(np.asarray(out_py) - np.asarray(out_cy)).max()
    print(f"{name:30s}  python {t_py * 1e3:8.2f} ms   compiled "
          f"{t_cy * 1e3:8.2f} ms   speedup {t_py / t_cy:5.1f}x   "
          f"max diff {agree:.1e}")


def main():
    rng = np.random.default_rng(0)

    # Weyl-transform workload: oscillator eigenfunctions on an
    # (nx x ny) kernel slab at dim 96.
    x = rng.uniform(-20, 20, size=32 * 1024)
    run_case("hermite_functions", (x, 95), (x, 95))

    # Husimi-grid workload: coherent amplitudes on a 256^2 grid at dim 96.
    z = (rng.uniform(-8, 8, 256 * 256) + 1j * rng.uniform(-8, 8, 256 * 256)) \
        / np.sqrt(2)
    run_case("coherent_amplitudes", (z, 96), (z, 96))

    # torus-extraction workload: small batches, called many times
    z_small = z[:4096]
    run_case("coherent_amplitudes", (z_small, 32), (z_small, 32))


if __name__ == "__main__":
    main()
