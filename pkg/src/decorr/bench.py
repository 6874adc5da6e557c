"""Timing harness for the compare pipeline and growth-exponent fits."""

from __future__ import annotations

import statistics
import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import backend as _backend
from .errors import InputError
from .seqcore import decompose, normalize
from .synth import gen_uniform
from .xcorr import coincidence

MIN_REPS = 5


@dataclass(frozen=True)
class BenchRecord:
    N: int
    M: int
    engine: str
    backend: str
    repetitions: int
    median_ms: float
    mean_ms: float

    @classmethod
    def header(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return list(astuple(self))


def pipeline(a, b, engine, backend=None):
    """The timed unit: normalize, decompose, correlate, sum."""
    s, q = normalize(a, b)
    return coincidence(decompose(s), decompose(q), engine, backend=backend)


def time_pipeline(N, M=4, engine="fft", reps=9, seed=0, backend=None) -> BenchRecord:
    if reps < MIN_REPS:
        raise InputError(f"need at least {MIN_REPS} repetitions, got {reps}")
    a = gen_uniform(N, M, [seed, N, 0])
    b = gen_uniform(N, M, [seed, N, 1])
    pipeline(a, b, engine, backend)  # warm caches (twiddles, bit reversal)
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        pipeline(a, b, engine, backend)
        samples.append((time.perf_counter() - t0) * 1e3)
    name = _backend.get(backend).NAME
    return BenchRecord(N, M, engine, name, reps, statistics.median(samples),
                       statistics.fmean(samples))


def run_bench(sizes, M=4, engines=("fft", "naive"), reps=9, backends=(None,), seed=0):
    return [time_pipeline(N, M, engine, reps, seed, backend)
            for backend in backends for engine in engines for N in sizes]


def growth_exponent(records) -> float:
    """Least-squares slope of log(median time) against log(N)."""
    N = np.array([r.N for r in records], dtype=np.float64)
    t = np.array([r.median_ms for r in records], dtype=np.float64)
    if N.size < 2 or np.unique(N).size < 2:
        raise InputError("need at least two distinct sizes to fit an exponent")
    slope, _ = np.polyfit(np.log(N), np.log(t), 1)
    return float(slope)


def exponents(records) -> dict:
    """Growth exponent per ``(engine, backend)`` group."""
    groups = {}
    for r in records:
        groups.setdefault((r.engine, r.backend), []).append(r)
    return {key: growth_exponent(rs) for key, rs in groups.items() if len(rs) > 1}
