"""Rectangular low-pass enhancement.

A unit-height rectangle of continuous width ``w`` is discretized by the
measure of each unit cell ``[k - 1/2, k + 1/2]`` it covers, so the taps sum
to ``w``. Two ways of applying it are offered:

``mode="channels"`` (default)
    Smooth every binary channel, then correlate and sum. This equals the
    unsmoothed coincidence signal convolved with the kernel autocorrelation.
``mode="codes"``
    Smooth the code sequences themselves, re-quantize the smoothed values
    onto a fresh alphabet (distinct-rank) and count exact matches of those.
    Contiguous shared blocks keep matching while isolated chance matches
    mostly disappear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatch, NonPositiveWidth
from .seqcore import ChannelSet, NormalizedSequence, Sequence, decompose, normalize
from .xcorr import CoincidenceSignal, _fft_correlate_raw, _check_engine, coincidence
from . import backend as _backend

SMOOTH_MODES = ("channels", "codes")

# smoothed code values are rounded to this many decimals before re-quantizing
_CODE_DECIMALS = 9


@dataclass(frozen=True)
class RectKernel:
    w: float
    taps: np.ndarray

    @property
    def radius(self) -> int:
        return (self.taps.size - 1) // 2

    @property
    def is_identity(self) -> bool:
        return self.taps.size == 1 and self.taps[0] == 1.0


def rect_kernel(w: float) -> RectKernel:
    """Unit-height rectangle of width ``w`` sampled by unit-cell integration.

    >>> rect_kernel(1.5).taps
    array([0.25, 1.  , 0.25])
    """
    w = float(w)
    if not (w > 0 and math.isfinite(w)):
        raise NonPositiveWidth(f"kernel width must be positive, got {w}")
    half = w / 2
    radius = math.ceil(half + 0.5)
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.clip(np.minimum(k + 0.5, half) - np.maximum(k - 0.5, -half), 0.0, 1.0)
    nz = np.nonzero(taps > 1e-15)[0]
    r = max(radius - nz[0], nz[-1] - radius)
    taps = taps[radius - r:radius + r + 1]
    taps = 0.5 * (taps + taps[::-1])
    taps.setflags(write=False)
    return RectKernel(w, taps)


def kernel_autocorrelation(kernel: RectKernel) -> np.ndarray:
    """Self-correlation of the taps (a triangle-like profile, odd length)."""
    return np.correlate(kernel.taps, kernel.taps, mode="full")


def smooth_channels(ch: ChannelSet, kernel: RectKernel, trim=True) -> ChannelSet:
    """Convolve each channel with the kernel (zero boundary).

    With ``trim`` the result is cut back to the channel length, centred;
    otherwise the full ``N + len(taps) - 1`` support is kept.
    """
    data = np.asarray(ch.channels, dtype=np.float64)
    full = np.array([np.convolve(row, kernel.taps, mode="full") for row in data])
    full = full.reshape(data.shape[0], -1)
    if trim:
        r = kernel.radius
        full = full[:, r:r + data.shape[1]]
    return ChannelSet(full)


def smooth_codes(s: NormalizedSequence, q: NormalizedSequence, kernel: RectKernel):
    """Smooth the code values and map the results onto a shared alphabet."""
    if s.M != q.M:
        raise AlphabetMismatch(f"alphabet sizes differ: {s.M} vs {q.M}")

    def _smooth(x):
        ch = ChannelSet(x.codes.astype(np.float64)[None, :])
        return np.round(smooth_channels(ch, kernel).channels[0], _CODE_DECIMALS)

    # distinct-rank over the rounded smoothed values; scaled to integers so
    # normalize() sees exact symbols
    scale = 10 ** _CODE_DECIMALS
    ss = Sequence(np.rint(_smooth(s) * scale).astype(np.int64))
    qs = Sequence(np.rint(_smooth(q) * scale).astype(np.int64))
    return normalize(ss, qs)


def smoothed_coincidence(s, q, w, engine="fft", mode="channels", threads=1,
                         backend=None) -> CoincidenceSignal:
    """Coincidence signal of the low-pass filtered sequences.

    ``s`` and ``q`` are channel sets for ``mode="channels"`` and normalized
    sequences for ``mode="codes"``. The result covers the same displacement
    range as the unsmoothed signal and is flagged ``smoothed``.
    """
    _check_engine(engine)
    kernel = w if isinstance(w, RectKernel) else rect_kernel(w)
    if mode == "codes":
        if not isinstance(s, NormalizedSequence):
            raise TypeError("mode='codes' needs NormalizedSequence inputs")
        ss, qs = smooth_codes(s, q, kernel)
        E = coincidence(decompose(ss), decompose(qs), engine, threads, backend)
        return CoincidenceSignal(E.values, E.offset, E.Ns, E.Nq, E.M, smoothed=True)
    if mode != "channels":
        raise ValueError(f"unknown smoothing mode {mode!r}; choose from {SMOOTH_MODES}")
    if isinstance(s, NormalizedSequence):
        s, q = decompose(s), decompose(q)
    if s.M != q.M:
        raise AlphabetMismatch(f"alphabet sizes differ: {s.M} vs {q.M}")

    Ns, Nq = s.N, q.N
    if kernel.is_identity:
        E = coincidence(s, q, engine, threads, backend)
        return CoincidenceSignal(E.values.astype(np.float64), E.offset, Ns, Nq, s.M, True)

    # full support keeps the result equal to E convolved with the kernel
    # autocorrelation; the displacement axis is unchanged by the symmetric pad
    pad = kernel.taps.size - 1
    fs = smooth_channels(s, kernel, trim=False).channels
    fq = smooth_channels(q, kernel, trim=False).channels
    kern = _backend.get(backend)
    if engine == "fft":
        full = _fft_correlate_raw(list(zip(fs, fq)), Ns + pad, Nq + pad, kern, threads)
    else:
        full = np.zeros(Ns + Nq - 1 + 2 * pad)
        for a, b in zip(fs, fq):
            full += kern.correlate_f64(a, b)
    values = np.maximum(full[pad:pad + Ns + Nq - 1], 0.0)
    return CoincidenceSignal(values, Ns - 1, Ns, Nq, s.M, smoothed=True)
