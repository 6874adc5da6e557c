"""Sequences, shared-alphabet normalization and binary channel decomposition.

Two raw integer sequences are first mapped onto one alphabet ``{1, ..., M}``
and then split into ``M`` binary indicator channels, channel ``j`` holding a 1
wherever the sequence carries symbol ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import AlphabetTooLarge, DegenerateRange, EmptySequence, InputError

#: Largest supported alphabet.
MAX_ALPHABET = 256

DISTINCT_RANK = "distinct-rank"
AFFINE_QUANTIZE = "affine-quantize"


def code_dtype(M: int) -> np.dtype:
    """Smallest unsigned dtype able to hold the codes ``1..M``."""
    return np.dtype(np.uint8) if M <= np.iinfo(np.uint8).max else np.dtype(np.uint16)


@dataclass(frozen=True)
class Sequence:
    """Finite array of raw integer symbols."""

    values: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.values)
        if raw.ndim != 1:
            raise InputError("a sequence must be one-dimensional")
        if raw.size and raw.dtype.kind == "f":
            if not np.all(np.isfinite(raw)) or np.any(raw != np.round(raw)):
                raise InputError("sequence values must be finite integers")
        elif raw.size and raw.dtype.kind not in "iub":
            raise InputError(f"unsupported symbol dtype {raw.dtype}")
        values = raw.astype(np.int64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.length


@dataclass(frozen=True)
class AlphabetSpec:
    """How raw symbols are mapped onto ``{1..M}``.

    ``M`` is only consulted in affine-quantize mode; in distinct-rank mode it
    follows from the data. ``symbol_table`` maps external tokens (FASTA
    letters) to raw integers and is carried along for I/O.
    """

    mode: str = DISTINCT_RANK
    M: Optional[int] = None
    symbol_table: Optional[Mapping[str, int]] = None

    def __post_init__(self):
        if self.mode not in (DISTINCT_RANK, AFFINE_QUANTIZE):
            raise InputError(f"unknown alphabet mode {self.mode!r}")
        if self.mode == AFFINE_QUANTIZE:
            if self.M is None or self.M < 1:
                raise InputError("affine-quantize mode needs M >= 1")
            if self.M > MAX_ALPHABET:
                raise AlphabetTooLarge(f"M={self.M} exceeds {MAX_ALPHABET}")


@dataclass(frozen=True)
class NormalizedSequence:
    codes: np.ndarray
    M: int
    origin: AlphabetSpec = field(default_factory=AlphabetSpec)

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.ndim != 1 or codes.size == 0:
            raise EmptySequence("normalized sequence must be a non-empty 1-D array")
        if not 1 <= self.M <= MAX_ALPHABET:
            raise AlphabetTooLarge(f"M={self.M} outside 1..{MAX_ALPHABET}")
        if codes.min() < 1 or codes.max() > self.M:
            raise InputError(f"codes must lie in 1..{self.M}")
        codes = codes.astype(code_dtype(self.M))
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @property
    def length(self) -> int:
        return int(self.codes.size)

    def __len__(self):
        return self.length


@dataclass(frozen=True)
class ChannelSet:
    """``M`` binary channels of length ``N``, stored as an ``(M, N)`` uint8 array."""

    channels: np.ndarray

    @property
    def M(self) -> int:
        return int(self.channels.shape[0])

    @property
    def N(self) -> int:
        return int(self.channels.shape[1])

    def popcounts(self) -> np.ndarray:
        return self.channels.sum(axis=1, dtype=np.int64)


def normalize(a: Sequence, b: Sequence, spec: AlphabetSpec = AlphabetSpec()):
    """Map two sequences onto one shared alphabet ``{1..M}``.

    The alphabet is built from the pooled values of both sequences so equal
    raw symbols always receive equal codes.

    distinct-rank
        The sorted distinct pooled values receive ranks ``1..M``. This is
        a bijection, so identity between symbols is preserved exactly.
    affine-quantize
        ``v -> round((v - min) * (M - 1) / (max - min)) + 1`` with halves
        rounded up; ``M = 1`` maps everything to 1.

    Returns a pair of :class:`NormalizedSequence`.
    """
    a = a if isinstance(a, Sequence) else Sequence(a)
    b = b if isinstance(b, Sequence) else Sequence(b)
    if a.length == 0 or b.length == 0:
        raise EmptySequence("cannot normalize an empty sequence")

    pooled = np.concatenate([a.values, b.values])
    if spec.mode == DISTINCT_RANK:
        distinct = np.unique(pooled)
        M = int(distinct.size)
        if M > MAX_ALPHABET:
            raise AlphabetTooLarge(f"{M} distinct symbols exceed the limit of {MAX_ALPHABET}")
        ca = np.searchsorted(distinct, a.values) + 1
        cb = np.searchsorted(distinct, b.values) + 1
    else:
        M = spec.M
        lo, hi = int(pooled.min()), int(pooled.max())
        if M == 1:
            ca = np.ones(a.length, dtype=np.int64)
            cb = np.ones(b.length, dtype=np.int64)
        else:
            if hi == lo:
                raise DegenerateRange(
                    "all values are equal; use distinct-rank mode or M = 1")
            if M > hi - lo + 1:
                raise InputError(f"M={M} exceeds the value range L={hi - lo + 1}")
            scale = (M - 1) / (hi - lo)
            ca = np.floor((a.values - lo) * scale + 0.5).astype(np.int64) + 1
            cb = np.floor((b.values - lo) * scale + 0.5).astype(np.int64) + 1
    return NormalizedSequence(ca, M, spec), NormalizedSequence(cb, M, spec)


def decompose(x: NormalizedSequence) -> ChannelSet:
    """Split ``x`` into ``M`` binary channels (channel ``j`` is ``x == j + 1``)."""
    symbols = np.arange(1, x.M + 1, dtype=x.codes.dtype)
    return ChannelSet((x.codes[None, :] == symbols[:, None]).astype(np.uint8))


def recompose(ch: ChannelSet) -> np.ndarray:
    """Inverse of :func:`decompose`: the code carried at each position."""
    return np.argmax(ch.channels, axis=0).astype(np.int64) + 1
