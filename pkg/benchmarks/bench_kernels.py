#!/usr/bin/env python3
"""Benchmark the compiled update kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--side 32] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from onphase.lattice.geometry import geometry
from onphase.lattice.kernels import (
    available_backends,
    backend_context,
    metropolis_sweep_kernel,
    wolff_update_kernel,
)
from onphase.lattice.model import hot_lattice


def time_case(label, backend, fn, repeats):
    with backend_context(backend):
        fn()  # warm up
        best = min(_timed(fn) for _ in range(repeats))
    print(f"  {label:<38} {backend:<9} {best * 1e3:9.3f} ms")
    return best


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def bench(side, repeats):
    rng = np.random.default_rng(0)
    cases = [
        ("Ising metropolis sweep (2D)", 2, side, 1, 2.27, "metropolis"),
        ("Ising wolff update x20 (2D, T~Tc)", 2, side, 1, 2.27, "wolff"),
        ("O(3) metropolis sweep (2D)", 2, side, 3, 1.0, "metropolis"),
        ("O(3) wolff update x20 (2D)", 2, side, 3, 1.0, "wolff"),
    ]
    results = {}
    for label, d, L, ncomp, temp, sampler in cases:
        print(f"{label}, side={L}:")
        for backend in available_backends():
            lat = hot_lattice(d, L, ncomp, np.random.default_rng(1))
            geom = geometry(d, L)
            chain = np.random.default_rng(2)
            if sampler == "metropolis":
                fn = lambda: metropolis_sweep_kernel(lat.spins, geom, 1.0, temp, 1.0, chain)
            else:
                fn = lambda: [
                    wolff_update_kernel(lat.spins, geom, 1.0, temp, chain) for _ in range(20)
                ]
            results[(label, backend)] = time_case(label, backend, fn, repeats)
        if len(available_backends()) == 2:
            speedup = results[(label, "python")] / results[(label, "compiled")]
            print(f"  {'speedup (compiled over python)':<38} {'':<9} {speedup:8.1f}x")
    return results


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--side", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"available backends: {available_backends()}")
    bench(args.side, args.repeats)
