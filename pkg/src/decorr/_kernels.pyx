# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: radix-2 FFT and direct linear correlation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()

NAME = "compiled"

cdef dict _twiddle_cache = {}


cdef _twiddles(Py_ssize_t n, bint inverse):
    # exp(-+2 pi i k / n) for k < n/2, computed directly (no recurrence drift)
    key = (n, inverse)
    tw = _twiddle_cache.get(key)
    if tw is None:
        k = np.arange(n // 2, dtype=np.float64)
        tw = np.exp((2j if inverse else -2j) * np.pi * k / n)
        tw.setflags(write=False)
        _twiddle_cache[key] = tw
    return tw


cdef void _fft_core(double[::1] a, const double[::1] tw, bint inverse) noexcept nogil:
    # a and tw are interleaved (re, im) pairs; butterflies use explicit real
    # arithmetic because C99 complex multiply goes through __muldc3
    cdef Py_ssize_t n = a.shape[0] // 2
    cdef Py_ssize_t i, j, bit, size, half, step, start, k, lo, hi
    cdef double wr, wi, xr, xi, vr, vi, tmp, scale

    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        if i < j:
            tmp = a[2 * i]
            a[2 * i] = a[2 * j]
            a[2 * j] = tmp
            tmp = a[2 * i + 1]
            a[2 * i + 1] = a[2 * j + 1]
            a[2 * j + 1] = tmp

    size = 2
    while size <= n:
        half = size >> 1
        step = n // size
        start = 0
        while start < n:
            for k in range(half):
                wr = tw[2 * k * step]
                wi = tw[2 * k * step + 1]
                lo = 2 * (start + k)
                hi = lo + 2 * half
                xr = a[hi]
                xi = a[hi + 1]
                vr = xr * wr - xi * wi
                vi = xr * wi + xi * wr
                a[hi] = a[lo] - vr
                a[hi + 1] = a[lo + 1] - vi
                a[lo] += vr
                a[lo + 1] += vi
            start += size
        size <<= 1

    if inverse:
        scale = 1.0 / n
        for i in range(2 * n):
            a[i] *= scale


def fft(x, bint inverse=False):
    """Radix-2 decimation-in-time FFT of a power-of-two length array.

    Returns a new complex128 array; the inverse transform includes the 1/n
    factor.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] a = np.array(x, dtype=np.complex128, copy=True).ravel()
    cdef Py_ssize_t n = a.shape[0]
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"FFT length must be a power of two, got {n}")
    if n == 1:
        return a
    cdef const double[::1] tw = _twiddles(n, inverse).view(np.float64)
    cdef double[::1] view = a.view(np.float64)
    with nogil:
        _fft_core(view, tw, inverse)
    return a


def correlate_u8(b, c):
    """Full linear correlation of two uint8 arrays.

    ``out[p + len(b) - 1] = sum_i b[i] * c[i + p]`` for
    ``p = -(len(b) - 1) .. len(c) - 1``.
    """
    cdef const unsigned char[::1] bv = np.ascontiguousarray(b, dtype=np.uint8)
    cdef const unsigned char[::1] cv = np.ascontiguousarray(c, dtype=np.uint8)
    cdef Py_ssize_t ns = bv.shape[0], nq = cv.shape[0], i, j, base
    out = np.zeros(ns + nq - 1, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    cdef cnp.int64_t bi
    with nogil:
        for i in range(ns):
            bi = bv[i]
            base = ns - 1 - i
            for j in range(nq):
                ov[base + j] += bi * cv[j]
    return out


def correlate_f64(a, b):
    """Same as :func:`correlate_u8` for float64 inputs."""
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t ns = av.shape[0], nq = bv.shape[0], i, j, base
    out = np.zeros(ns + nq - 1, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double ai
    with nogil:
        for i in range(ns):
            ai = av[i]
            base = ns - 1 - i
            for j in range(nq):
                ov[base + j] += ai * bv[j]
    return out
