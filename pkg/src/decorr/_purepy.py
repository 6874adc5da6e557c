"""Pure-Python (numpy) fallback for the compiled kernels.

Same functions and contracts as ``_kernels``; used when the extension is not
built or when ``DECORR_BACKEND=python`` is set.
"""

from functools import lru_cache

import numpy as np

NAME = "python"


def _check_pow2(n):
    if n < 1 or n & (n - 1):
        raise ValueError(f"FFT length must be a power of two, got {n}")


@lru_cache(maxsize=64)
def _bit_reverse(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _twiddles(n):
    tw = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    tw.setflags(write=False)
    return tw


def fft(x, inverse=False):
    """Iterative radix-2 decimation-in-time FFT, one vectorized pass per stage."""
    a = np.array(x, dtype=np.complex128).ravel()
    n = a.size
    _check_pow2(n)
    if n == 1:
        return a
    a = a[_bit_reverse(n)]
    tw_all = _twiddles(n)
    if inverse:
        tw_all = tw_all.conj()
    size = 2
    while size <= n:
        half = size // 2
        tw = tw_all[:: n // size]
        blocks = a.reshape(-1, size)
        u = blocks[:, :half]
        v = blocks[:, half:] * tw
        a = np.concatenate([u + v, u - v], axis=1).ravel()
        size *= 2
    if inverse:
        a /= n
    return a


def _correlate(b, c, dtype):
    # numpy's direct-sum correlation (not FFT based) keeps this O(Ns*Nq)
    return np.correlate(c.astype(dtype), b.astype(dtype), mode="full")


def correlate_u8(b, c):
    """``out[p + len(b) - 1] = sum_i b[i] * c[i + p]`` over the full linear range."""
    b = np.ascontiguousarray(b, dtype=np.uint8)
    c = np.ascontiguousarray(c, dtype=np.uint8)
    return _correlate(b.astype(np.int64), c, np.int64)


def correlate_f64(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return _correlate(a, b, np.float64)
