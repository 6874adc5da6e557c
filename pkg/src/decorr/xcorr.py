"""Channel correlation and the coincidence signal.

Displacement convention used throughout::

    k[p] = sum_i b[i] * c[i + p],   p = -(Ns - 1) .. Nq - 1

so a positive ``p`` probes the second sequence ``p`` positions to the right
of the first. Results are stored with ``offset = Ns - 1`` (the array index of
``p = 0``).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend as _backend
from .errors import (AlphabetMismatch, EmptyInput, FftSizeOverflow, InputError,
                     RoundingResidualExceeded)
from .seqcore import ChannelSet, NormalizedSequence

ENGINES = ("fft", "naive")

#: Largest transform length accepted by the FFT engine.
MAX_FFT_SIZE = 1 << 25

#: Rounded counts whose raw FFT value is this far from an integer are rejected.
RESIDUAL_LIMIT = 0.25


@dataclass(frozen=True)
class ChannelCorrelation:
    values: np.ndarray
    offset: int
    channel: int | None = None

    @property
    def displacements(self) -> np.ndarray:
        return np.arange(self.values.size) - self.offset

    def at(self, p: int):
        return self.values[p + self.offset]


@dataclass(frozen=True)
class CoincidenceSignal:
    """Coincidence counts indexed by displacement.

    ``values[p + offset]`` is the number of positions ``i`` with
    ``s[i] == q[i + p]`` (or the smoothed equivalent when ``smoothed``).
    """

    values: np.ndarray
    offset: int
    Ns: int
    Nq: int
    M: int
    smoothed: bool = False

    def __post_init__(self):
        if self.values.size != self.Ns + self.Nq - 1 or self.offset != self.Ns - 1:
            raise InputError("signal length/offset inconsistent with Ns, Nq")

    @property
    def displacements(self) -> np.ndarray:
        return np.arange(-(self.Ns - 1), self.Nq)

    def at(self, p: int):
        return self.values[p + self.offset]

    def __len__(self):
        return int(self.values.size)


def displacement_range(Ns: int, Nq: int) -> tuple[int, int]:
    """Inclusive ``(lowest, highest)`` displacement."""
    return -(Ns - 1), Nq - 1


def overlap(Ns: int, Nq: int) -> np.ndarray:
    """Number of compared position pairs at each displacement."""
    p = np.arange(-(Ns - 1), Nq)
    return np.minimum(np.minimum(Ns, Nq), np.minimum(Nq - p, Ns + p))


def fft_size(length: int) -> int:
    """Smallest power of two >= ``length``."""
    n = 1 << max(0, int(length) - 1).bit_length()
    if n > MAX_FFT_SIZE:
        raise FftSizeOverflow(f"transform length {n} exceeds the cap {MAX_FFT_SIZE}")
    return n


def _as_binary(x, name):
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise EmptyInput(f"{name} must be a non-empty 1-D array")
    if x.dtype != np.uint8 or x.max() > 1:
        if np.any((x != 0) & (x != 1)):
            raise InputError(f"{name} must be binary")
        x = x.astype(np.uint8)
    return x


def _check_engine(engine):
    if engine not in ENGINES:
        raise InputError(f"unknown engine {engine!r}; choose from {ENGINES}")


def round_counts(raw: np.ndarray) -> np.ndarray:
    """Round FFT output to integer counts, refusing large residuals."""
    rounded = np.rint(raw)
    if raw.size:
        residual = float(np.max(np.abs(raw - rounded)))
        if not residual < RESIDUAL_LIMIT:
            raise RoundingResidualExceeded(residual)
    return rounded.astype(np.int64)


def _pair_spectrum(b, c, n, kern):
    """``conj(FFT(b)) * FFT(c)`` for real ``b``, ``c`` using one complex FFT.

    Packs ``z = b + i c``; the two real spectra are recovered from the
    Hermitian symmetry of real transforms.
    """
    z = np.zeros(n, dtype=np.complex128)
    z.real[:b.size] = b
    z.imag[:c.size] = c
    Z = kern.fft(z)
    Zr = np.conj(Z[-np.arange(n) % n])
    B = 0.5 * (Z + Zr)
    C = -0.5j * (Z - Zr)
    return np.conj(B) * C


def _unwrap(circular, Ns, Nq):
    # circular[p mod n] -> linear order p = -(Ns-1) .. Nq-1
    n = circular.size
    return np.concatenate([circular[n - (Ns - 1):], circular[:Nq]]) if Ns > 1 else circular[:Nq].copy()


def _fft_correlate_raw(pairs, Ns, Nq, kern, threads=1):
    """Sum of the linear correlations of ``(b, c)`` pairs, unrounded."""
    n = fft_size(Ns + Nq - 1)
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            spectra = list(pool.map(lambda bc: _pair_spectrum(bc[0], bc[1], n, kern), pairs))
    else:
        spectra = [_pair_spectrum(b, c, n, kern) for b, c in pairs]
    total = spectra[0]
    for spec in spectra[1:]:
        total = total + spec
    return _unwrap(kern.fft(total, inverse=True).real, Ns, Nq)


def correlate_channel_naive(b, c, channel=None, backend=None) -> ChannelCorrelation:
    """Direct O(Ns*Nq) evaluation of ``k[p] = sum_i b[i] c[i+p]``."""
    b = _as_binary(b, "b")
    c = _as_binary(c, "c")
    kern = _backend.get(backend)
    return ChannelCorrelation(kern.correlate_u8(b, c), b.size - 1, channel)


def correlate_channel_fft(b, c, channel=None, backend=None) -> ChannelCorrelation:
    """Same result as :func:`correlate_channel_naive`, computed with a
    zero-padded power-of-two FFT and rounded to integers.

    Raises
    ------
    FftSizeOverflow
        ``Ns + Nq - 1`` needs a transform longer than :data:`MAX_FFT_SIZE`.
    RoundingResidualExceeded
        Some raw value is 0.25 or more away from the nearest integer.
    """
    b = _as_binary(b, "b")
    c = _as_binary(c, "c")
    kern = _backend.get(backend)
    raw = _fft_correlate_raw([(b, c)], b.size, c.size, kern)
    return ChannelCorrelation(round_counts(raw), b.size - 1, channel)


def coincidence(sc: ChannelSet, qc: ChannelSet, engine="fft", threads=1,
                backend=None) -> CoincidenceSignal:
    """Sum of the per-channel correlations: exact match counts per displacement.

    With the FFT engine the channel spectra are accumulated before a single
    inverse transform; by linearity this equals summing the per-channel
    correlations. ``threads > 1`` spreads channels over a thread pool without
    changing any output value.
    """
    _check_engine(engine)
    if sc.M != qc.M:
        raise AlphabetMismatch(f"alphabet sizes differ: {sc.M} vs {qc.M}")
    if sc.N == 0 or qc.N == 0:
        raise EmptyInput("empty channel set")
    Ns, Nq = sc.N, qc.N
    kern = _backend.get(backend)
    pairs = list(zip(sc.channels, qc.channels))
    if engine == "fft":
        values = round_counts(_fft_correlate_raw(pairs, Ns, Nq, kern, threads))
    elif threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda bc: kern.correlate_u8(*bc), pairs))
        values = np.sum(parts, axis=0)
    else:
        values = np.zeros(Ns + Nq - 1, dtype=np.int64)
        for b, c in pairs:
            values += kern.correlate_u8(b, c)
    return CoincidenceSignal(values, Ns - 1, Ns, Nq, sc.M)


def correlate_real(a, b, engine="fft", backend=None) -> np.ndarray:
    """Unrounded linear correlation of real arrays, same convention."""
    _check_engine(engine)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("cannot correlate empty arrays")
    kern = _backend.get(backend)
    if engine == "naive":
        return kern.correlate_f64(a, b)
    return _fft_correlate_raw([(a, b)], a.size, b.size, kern)


def numeric_xcorr(s: NormalizedSequence, q: NormalizedSequence, engine="fft",
                  backend=None) -> np.ndarray:
    """Plain cross-correlation of the code values, without decomposition.

    This is the conventional operator the coincidence signal is contrasted
    with. Inputs are integers, so the FFT result is rounded like the counts.
    """
    raw = correlate_real(s.codes, q.codes, engine, backend)
    if engine == "fft":
        raw = round_counts(raw)
    return raw.astype(np.float64)
