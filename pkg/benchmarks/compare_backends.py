"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/compare_backends.py [--sizes 1024,4096,8192] [--reps 9]

Prints one table for the raw FFT kernel and one for the full pipeline
(normalize, decompose, correlate) per engine, plus speedups.
"""

import argparse
import statistics
import time

import numpy as np

from decorr import backend
from decorr.bench import exponents, run_bench


def time_fft(name, n, reps):
    kern = backend.get(name)
    x = np.random.default_rng(n).normal(size=n) + 0j
    kern.fft(x)
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        kern.fft(x)
        samples.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1024,2048,4096,8192,16384")
    parser.add_argument("--reps", type=int, default=9)
    parser.add_argument("--m", type=int, default=4)
    args = parser.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    names = backend.available()
    if "compiled" not in names:
        print("compiled extension not built; only the fallback is timed")

    print("FFT kernel, median ms per transform of length 2N")
    print(f"{'N':>7} " + " ".join(f"{n:>10}" for n in names))
    for N in sizes:
        print(f"{N:>7} " + " ".join(f"{time_fft(n, 2 * N, args.reps):>10.3f}" for n in names))

    records = run_bench(sizes, args.m, ("fft", "naive"), args.reps, names)
    table = {(r.backend, r.engine, r.N): r.median_ms for r in records}
    print(f"\nPipeline, M={args.m}, median ms")
    cols = [(n, e) for n in names for e in ("fft", "naive")]
    print(f"{'N':>7} " + " ".join(f"{n + '/' + e:>16}" for n, e in cols))
    for N in sizes:
        print(f"{N:>7} " + " ".join(f"{table[n, e, N]:>16.3f}" for n, e in cols))

    print()
    for (engine, name), slope in sorted(exponents(records).items()):
        print(f"growth exponent {name}/{engine}: {slope:.2f}")
    if len(names) > 1:
        for engine in ("fft", "naive"):
            gains = [table["python", engine, N] / table["compiled", engine, N] for N in sizes]
            print(f"compiled speedup, {engine}: " + ", ".join(f"{g:.1f}x" for g in gains))


if __name__ == "__main__":
    main()
