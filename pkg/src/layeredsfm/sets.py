"""Ground-set configuration and exact subset algebra on bit vectors.

Elements are plain indices 0..n-1.  A :class:`Subset` is an immutable bit
vector over those indices; every operation is exact and total.  Any
"arbitrary" choice made elsewhere in the package (dummy elements, canonical
commits) follows lowest-index-first order so runs reproduce exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

# Bit-vector capacity; large enough for every experiment in the harness.
MAX_GROUND_SIZE = 1024

# Hard cap on full power-set enumeration, to prevent accidental 2^n blowups.
EXHAUSTIVE_CAP = 24


class Relation(Enum):
    """How one subset sits relative to another."""

    EQUAL = "equal"
    STRICT_SUBSET = "strict_subset"
    STRICT_SUPERSET = "strict_superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class GroundConfig:
    """A ground set of ``n`` elements carved into layers of width ``2*r``.

    ``layer_count`` is ``n // (2r)``; when ``2r`` does not divide ``n`` the
    trailing ``n - effective_size`` elements are dummies that no constructed
    function ever depends on.
    """

    n: int
    r: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"ground size must be positive, got {self.n}")
        if self.n > MAX_GROUND_SIZE:
            raise ValueError(f"ground size {self.n} exceeds capacity {MAX_GROUND_SIZE}")
        if self.r < 1:
            raise ValueError(f"layer half-width must be positive, got {self.r}")
        if 2 * self.r > self.n:
            raise ValueError(f"need 2*r <= n, got r={self.r}, n={self.n}")

    @property
    def layer_count(self) -> int:
        return self.n // (2 * self.r)

    @property
    def effective_size(self) -> int:
        """Size of the active prefix of the ground set (a multiple of 2r)."""
        return 2 * self.r * self.layer_count

    @property
    def divides_evenly(self) -> bool:
        return self.effective_size == self.n

    def pool_size(self, layer: int) -> int:
        """Number of still-unclassified elements when ``layer`` (1-based) opens."""
        if not 1 <= layer <= self.layer_count:
            raise ValueError(f"layer must be in 1..{self.layer_count}, got {layer}")
        return self.effective_size - 2 * self.r * (layer - 1)


class Subset:
    """Immutable subset of ``{0, .., size-1}`` stored as an integer bit mask."""

    __slots__ = ("bits", "size")

    def __init__(self, size: int, bits: int = 0):
        if not 0 <= size <= MAX_GROUND_SIZE:
            raise ValueError(f"size must be in 0..{MAX_GROUND_SIZE}, got {size}")
        if bits < 0 or bits >> size:
            raise ValueError(f"bits 0x{bits:x} out of range for size {size}")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Subset is immutable")

    @classmethod
    def from_indices(cls, size: int, indices: Iterable[int]) -> "Subset":
        bits = 0
        for i in indices:
            if not 0 <= i < size:
                raise ValueError(f"index {i} out of range for size {size}")
            bits |= 1 << i
        return cls(size, bits)

    @classmethod
    def full(cls, size: int) -> "Subset":
        return cls(size, (1 << size) - 1)

    def indices(self) -> list[int]:
        return [i for i in range(self.size) if (self.bits >> i) & 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.size and bool((self.bits >> i) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subset)
            and self.size == other.size
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.size, self.bits))

    def __repr__(self) -> str:
        return f"Subset({self.size}, {{{', '.join(map(str, self.indices()))}}})"

    def _check_peer(self, other: "Subset") -> None:
        if not isinstance(other, Subset):
            raise TypeError(f"expected Subset, got {type(other).__name__}")
        if self.size != other.size:
            raise ValueError(f"mismatched ground sizes: {self.size} vs {other.size}")

    def union(self, other: "Subset") -> "Subset":
        self._check_peer(other)
        return Subset(self.size, self.bits | other.bits)

    def intersection(self, other: "Subset") -> "Subset":
        self._check_peer(other)
        return Subset(self.size, self.bits & other.bits)

    def difference(self, other: "Subset") -> "Subset":
        self._check_peer(other)
        return Subset(self.size, self.bits & ~other.bits)

    def complement(self) -> "Subset":
        return Subset(self.size, ((1 << self.size) - 1) & ~self.bits)

    def is_subset_of(self, other: "Subset") -> bool:
        self._check_peer(other)
        return self.bits & ~other.bits == 0

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def to_json(self) -> list[int]:
        """Sorted index list, the wire format used everywhere."""
        return self.indices()

    @classmethod
    def from_json(cls, size: int, data: Iterable[int]) -> "Subset":
        return cls.from_indices(size, data)


def relate(s: Subset, t: Subset) -> Relation:
    """Exact containment relation between two subsets of the same ground set."""
    s._check_peer(t)
    if s.bits == t.bits:
        return Relation.EQUAL
    if s.bits & ~t.bits == 0:
        return Relation.STRICT_SUBSET
    if t.bits & ~s.bits == 0:
        return Relation.STRICT_SUPERSET
    return Relation.INCOMPARABLE


def enumerate_subsets(n: int) -> Iterator[Subset]:
    """Yield all 2^n subsets in increasing integer-encoding order.

    Refuses n above :data:`EXHAUSTIVE_CAP`; the callers that need a full
    power set (brute-force oracles, exhaustive property scans) are all
    desk-scale by design.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"refusing to enumerate 2^{n} subsets (cap is n={EXHAUSTIVE_CAP})")
    for bits in range(1 << n):
        yield Subset(n, bits)
