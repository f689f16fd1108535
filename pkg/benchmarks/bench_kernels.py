"""Benchmark: compiled extension kernels vs the pure-numpy fallback.

Times the raw elementwise kernels and a full production-size evolution with
each backend.  Run as ``python benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from spinshuttle import (EvolutionConfig, StaProtocol, build_grid, evolve,
                         initial_state)
from spinshuttle import kernels
from spinshuttle.core import PhysicalScales


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(n_points, inner=200, repeats=5):
    grid = build_grid(-15.0, 25.0, n_points, 1e-3, 8.0)
    rng = np.random.default_rng(0)
    up = rng.normal(size=n_points) + 1j * rng.normal(size=n_points)
    down = rng.normal(size=n_points) + 1j * rng.normal(size=n_points)
    kin_phase = np.exp(-1j * 5e-4 * grid.k ** 2)
    rows = {}
    for name in kernels.available_backends():
        mod = kernels._BACKENDS[name]

        def potential():
            for _ in range(inner):
                mod.potential_half_step(up, down, grid.x, 1.0, 2.5e-4, 2.5e-4)

        def kinetic():
            for _ in range(inner):
                mod.kinetic_soc_step(up, down, kin_phase, grid.k, 1e-3)

        rows[name] = (time_call(potential, repeats) / inner * 1e6,
                      time_call(kinetic, repeats) / inner * 1e6)
    return rows


def bench_evolve(n_points, t_f=8.0, gN=0.5, repeats=3):
    grid = build_grid(-15.0, 25.0, n_points, 1e-3, t_f)
    protocol = StaProtocol(d=10.0, t_f=t_f)
    start = initial_state(grid, PhysicalScales())
    cfg = EvolutionConfig(gN=gN, sample_every=10 ** 9)
    rows = {}
    original = kernels.backend_name()
    try:
        for name in kernels.available_backends():
            kernels.use_backend(name)
            rows[name] = time_call(
                lambda: evolve(start, protocol, cfg), repeats)
    finally:
        kernels.use_backend(original)
    return rows, grid.n_steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-points", type=int, default=2048)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"backends available: {', '.join(kernels.available_backends())}")
    print(f"\nelementwise kernels, n = {args.n_points} (best of 5, per call):")
    rows = bench_kernels(args.n_points)
    for name, (pot, kin) in sorted(rows.items()):
        print(f"  {name:9s} potential_half_step {pot:7.1f} us   "
              f"kinetic_soc_step {kin:7.1f} us")

    rows, n_steps = bench_evolve(args.n_points, repeats=args.repeats)
    print(f"\nfull evolution, {n_steps} steps, n = {args.n_points}, gN = 0.5 "
          f"(best of {args.repeats}):")
    for name, wall in sorted(rows.items()):
        print(f"  {name:9s} {wall:6.2f} s   ({wall / n_steps * 1e6:6.1f} us/step)")
    if len(rows) == 2:
        print(f"\nspeedup (pure / compiled): "
              f"{rows['pure'] / rows['compiled']:.2f}x")


if __name__ == "__main__":
    main()
