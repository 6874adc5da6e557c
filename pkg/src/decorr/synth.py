"""Synthetic inputs: uniform random sequences and planted shared blocks.

A planted pair is a uniform random sequence ``s`` and a copy ``q`` with a few
pieces cut out. Every stretch of ``s`` between two cuts reappears in ``q``
shifted left by the total length removed before it, i.e. at displacement
``-removed`` under the ``s[i] == q[i + p]`` convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidSpec
from .seqcore import Sequence


@dataclass(frozen=True)
class PlantedSpec:
    """Layout of a planted pair.

    ``deletions`` holds ``(position, length)`` pieces removed from the copy.
    The block ``[block_start, block_start + block_length)`` must survive
    untouched.
    """

    N: int
    M: int
    block_length: int
    deletions: Tuple[Tuple[int, int], ...] = ()
    seed: int = 0
    block_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "deletions",
                           tuple(sorted((int(p), int(n)) for p, n in self.deletions)))
        self.validate()

    def validate(self):
        if self.N < 1 or self.M < 1:
            raise InvalidSpec("N and M must be >= 1")
        if self.block_length < 0 or self.block_start < 0 \
                or self.block_start + self.block_length > self.N:
            raise InvalidSpec("planted block does not fit inside the sequence")
        block_end = self.block_start + self.block_length
        prev_end = 0
        for pos, length in self.deletions:
            if length < 1 or pos < 0 or pos + length > self.N:
                raise InvalidSpec(f"deletion {(pos, length)} outside 0..{self.N}")
            if pos < prev_end:
                raise InvalidSpec("deletions overlap")
            if pos < block_end and pos + length > self.block_start and self.block_length:
                raise InvalidSpec(f"deletion {(pos, length)} cuts the planted block")
            prev_end = pos + length
        if self.N - sum(n for _, n in self.deletions) < 1:
            raise InvalidSpec("deletions remove the whole sequence")


def gen_uniform(N: int, M: int, seed=None) -> Sequence:
    """``N`` i.i.d. symbols drawn uniformly from ``1..M``."""
    if N < 1 or M < 1:
        raise InvalidSpec("N and M must be >= 1")
    rng = np.random.default_rng(seed)
    return Sequence(rng.integers(1, M + 1, size=N))


def shared_segments(N: int, deletions) -> list[tuple[int, int]]:
    """``(displacement, length)`` of every stretch that survives the cuts."""
    truth = []
    cursor = removed = 0
    for pos, length in sorted(deletions):
        if pos > cursor:
            truth.append((-removed, pos - cursor))
        removed += length
        cursor = pos + length
    if N > cursor:
        truth.append((-removed, N - cursor))
    return truth


def gen_planted(spec: PlantedSpec):
    """Return ``(s, q, ground_truth)`` for a planted layout."""
    s = gen_uniform(spec.N, spec.M, spec.seed)
    keep = np.ones(spec.N, dtype=bool)
    for pos, length in spec.deletions:
        keep[pos:pos + length] = False
    q = Sequence(s.values[keep])
    return s, q, shared_segments(spec.N, spec.deletions)


def random_planted_spec(N=512, M=4, block_length=130, n_deletions=4, seed=0,
                        min_deletion=2, max_deletion=16) -> PlantedSpec:
    """Draw a layout with ``n_deletions`` cuts around one planted block.

    Cuts are placed directly against both ends of the block (when there is
    room), so the block survives as a shared stretch of exactly
    ``block_length``. Cut lengths are at least ``min_deletion``; with the
    default of 2, neighbouring stretches never land on adjacent
    displacements. The layout is drawn from a stream independent of the
    symbol stream used by :func:`gen_planted`.
    """
    if n_deletions < 0 or not 1 <= min_deletion <= max_deletion:
        raise InvalidSpec("bad deletion parameters")
    if not 0 <= block_length <= N:
        raise InvalidSpec("block does not fit")
    if n_deletions == 0:
        return PlantedSpec(N, M, block_length, (), seed, 0)

    rng = np.random.default_rng([int(seed), 0x5EED])
    lengths = rng.integers(min_deletion, max_deletion + 1, size=n_deletions)

    if n_deletions == 1:
        if block_length + lengths[0] > N:
            raise InvalidSpec("no room for a deletion next to the block")
        return PlantedSpec(N, M, block_length, ((block_length, int(lengths[0])),), seed, 0)

    left, right = int(lengths[0]), int(lengths[1])
    lo, hi = left, N - block_length - right
    if hi < lo:
        raise InvalidSpec("no room for deletions on both sides of the block")
    start = int(rng.integers(lo, hi + 1))
    end = start + block_length
    cuts = [(start - left, left), (end, right)]

    # each extra cut needs its length plus one separating kept element
    for length in lengths[2:]:
        length = int(length)
        for _ in range(1000):
            pos = int(rng.integers(0, N - length + 1))
            taken = cuts + [(start, block_length)]
            if all(pos + length < p or pos > p + n for p, n in taken):
                cuts.append((pos, length))
                break
        else:
            raise InvalidSpec("could not place all deletions; lower n_deletions or lengths")
    return PlantedSpec(N, M, block_length, tuple(cuts), seed, start)
