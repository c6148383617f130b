"""Seeded randomness from the splitmix64 recurrence.

The generator is spelled out here rather than taken from a library so that
any implementation, in any language, reproduces the exact same instances
and experiment streams from the same 64-bit seed:

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
    output z XOR (z >> 31)

Bounded draws use rejection sampling, so they are exactly uniform.
"""

from __future__ import annotations

from typing import Sequence

from .sets import Subset

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit stream; every draw method is exactly uniform."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next(self) -> int:
        """Next raw 64-bit output."""
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), via rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        threshold = ((1 << 64) // bound) * bound
        while True:
            v = self.next()
            if v < threshold:
                return v % bound

    def bits(self, count: int) -> int:
        """Integer with ``count`` independent fair random bits."""
        if count < 0:
            raise ValueError(f"count must be non-negative, got {count}")
        out = 0
        filled = 0
        while filled < count:
            out |= self.next() << filled
            filled += 64
        return out & ((1 << count) - 1)

    def sample(self, seq: Sequence[int], k: int) -> list[int]:
        """Uniform size-k subset of ``seq`` (as a sorted list), partial shuffle."""
        if not 0 <= k <= len(seq):
            raise ValueError(f"cannot sample {k} of {len(seq)} items")
        pool = list(seq)
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])

    def subset_of(self, carrier: Subset) -> Subset:
        """Uniform subset of ``carrier``: each member kept independently at 1/2."""
        members = carrier.indices()
        keep = self.bits(len(members))
        picked = 0
        for pos, idx in enumerate(members):
            if (keep >> pos) & 1:
                picked |= 1 << idx
        return Subset(carrier.size, picked)

    def spawn_seeds(self, count: int) -> list[int]:
        """Independent child seeds, e.g. one per experiment trial."""
        return [self.next() for _ in range(count)]
