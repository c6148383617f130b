"""Executable structure checks: submodularity, range, minimizer, witnesses.

Two equivalent submodularity checkers are kept deliberately: the pairwise
inequality scan is the ground truth, and the marginal-form scan exists
because the two definitions must agree, which is itself a checkable
property.  Witness search order is canonical (increasing integer
encoding), so any failure reproduces exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .family import (
    LayeredInstance,
    block_value,
    evaluate_closed_form,
    submodularizer,
    true_minimizer,
)
from .rationals import ExactValue, format_value
from .rng import SplitMix64
from .sets import GroundConfig, Subset

EXHAUSTIVE_PAIR_CAP = 12

SetFunction = Callable[[Subset], ExactValue]


@dataclass(frozen=True)
class ViolationWitness:
    """A concrete, re-verifiable failure of submodularity.

    Pair form (``element`` is None): lhs = F(X) + F(Y) fell strictly below
    rhs = F(X u Y) + F(X n Y).  Marginal form: X lies inside Y, ``element``
    is outside Y, and lhs = marginal at Y strictly exceeds rhs = marginal
    at X.
    """

    x: Subset
    y: Subset
    element: int | None
    lhs: ExactValue
    rhs: ExactValue

    def to_json(self) -> dict:
        return {
            "X": self.x.to_json(),
            "Y": self.y.to_json(),
            "element": self.element,
            "lhs": format_value(self.lhs),
            "rhs": format_value(self.rhs),
        }

    def reverify(self, fn: SetFunction) -> bool:
        """Recompute the four values and confirm the recorded violation."""
        if self.element is None:
            lhs = fn(self.x) + fn(self.y)
            rhs = fn(self.x | self.y) + fn(self.x & self.y)
            return lhs == self.lhs and rhs == self.rhs and lhs < rhs
        e = Subset.from_indices(self.x.size, [self.element])
        lhs = fn(self.y | e) - fn(self.y)
        rhs = fn(self.x | e) - fn(self.x)
        return (
            self.x.is_subset_of(self.y)
            and self.element not in self.y
            and lhs == self.lhs
            and rhs == self.rhs
            and lhs > rhs
        )


def _tabulate(fn: SetFunction, n: int) -> tuple[list[int], int]:
    """All 2^n values as integers over a common denominator (exact)."""
    values = [Fraction(fn(Subset(n, bits))) for bits in range(1 << n)]
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return [v.numerator * (den // v.denominator) for v in values], den


def check_submodular_pairs(
    fn: SetFunction, n: int, *, samples: int = 10_000, seed: int = 0
) -> ViolationWitness | None:
    """First violating pair of F(X)+F(Y) >= F(XuY)+F(XnY), or None.

    Exhaustive over all pairs for n <= 12 (the inequality is symmetric in
    X and Y, so unordered pairs cover the full 4^n scan); for larger n a
    seeded sample of ``samples`` pairs is checked instead.
    """
    if n <= EXHAUSTIVE_PAIR_CAP:
        ints, den = _tabulate(fn, n)
        size = 1 << n
        for x in range(size):
            vx = ints[x]
            for y in range(x, size):
                if vx + ints[y] < ints[x | y] + ints[x & y]:
                    return ViolationWitness(
                        x=Subset(n, x),
                        y=Subset(n, y),
                        element=None,
                        lhs=Fraction(vx + ints[y], den),
                        rhs=Fraction(ints[x | y] + ints[x & y], den),
                    )
        return None

    rng = SplitMix64(seed)
    full = (1 << n) - 1
    for _ in range(samples):
        x = rng.bits(n) & full
        y = rng.bits(n) & full
        lhs = fn(Subset(n, x)) + fn(Subset(n, y))
        rhs = fn(Subset(n, x | y)) + fn(Subset(n, x & y))
        if lhs < rhs:
            return ViolationWitness(Subset(n, x), Subset(n, y), None, lhs, rhs)
    return None


def check_marginal_submodular(fn: SetFunction, n: int) -> ViolationWitness | None:
    """First (X, Y, e) with X inside Y, e outside Y, and a larger marginal at Y.

    Exhaustive (n <= 12); gives the same verdict as the pair scan, in
    marginal-witness form.
    """
    if n > EXHAUSTIVE_PAIR_CAP:
        raise ValueError(f"marginal scan is exhaustive-only (n <= {EXHAUSTIVE_PAIR_CAP})")
    ints, den = _tabulate(fn, n)
    for y in range(1 << n):
        submasks = []
        sub = y
        while True:
            submasks.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & y
        submasks.reverse()  # ascending encoding order
        for e in range(n):
            bit = 1 << e
            if y & bit:
                continue
            dy = ints[y | bit] - ints[y]
            for x in submasks:
                if dy > ints[x | bit] - ints[x]:
                    return ViolationWitness(
                        x=Subset(n, x),
                        y=Subset(n, y),
                        element=e,
                        lhs=Fraction(dy, den),
                        rhs=Fraction(ints[x | bit] - ints[x], den),
                    )
    return None


@dataclass(frozen=True)
class PropertyReport:
    """Range, unique-minimizer, and submodularity verdicts for one function."""

    range_ok: bool
    unique_min_ok: bool
    submodular_ok: bool
    minimizer: Subset
    witness: ViolationWitness | None = None

    @property
    def all_ok(self) -> bool:
        return self.range_ok and self.unique_min_ok and self.submodular_ok

    def to_json(self) -> dict:
        return {
            "range_ok": self.range_ok,
            "unique_min_ok": self.unique_min_ok,
            "submodular_ok": self.submodular_ok,
            "minimizer": self.minimizer.to_json(),
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def check_function_properties(fn: SetFunction, n: int, predicted_min: Subset) -> PropertyReport:
    """Range/minimizer/submodularity verdict for an arbitrary evaluator (n <= 12)."""
    if n > EXHAUSTIVE_PAIR_CAP:
        raise ValueError(f"exhaustive verification capped at n={EXHAUSTIVE_PAIR_CAP}")
    values = [fn(Subset(n, bits)) for bits in range(1 << n)]
    range_ok = all(0 <= v <= 2 for v in values)
    lowest = min(values)
    argmin = [bits for bits, v in enumerate(values) if v == lowest]
    unique_min_ok = len(argmin) == 1 and argmin[0] == predicted_min.bits
    witness = check_submodular_pairs(fn, n)
    return PropertyReport(
        range_ok=range_ok,
        unique_min_ok=unique_min_ok,
        submodular_ok=witness is None,
        minimizer=Subset(n, argmin[0]),
        witness=witness,
    )


def check_instance_properties(inst: LayeredInstance) -> PropertyReport:
    """Exhaustively verify one instance: values in [0,2], unique minimizer
    equal to the union of hidden sets, and submodularity (n <= 12)."""
    n = inst.config.n
    return check_function_properties(
        lambda s: evaluate_closed_form(inst, s), n, true_minimizer(inst)
    )


def check_block_properties(
    universe: Subset,
    block: Subset,
    hidden: Subset,
    inner_bound: ExactValue,
    inner: SetFunction,
) -> PropertyReport:
    """Exhaustively verify one building block over ``universe``.

    The predicted unique minimizer is the hidden set joined with the inner
    function's own minimizer (found by enumeration over the elements below
    the block).
    """
    n = universe.size
    if len(universe) > EXHAUSTIVE_PAIR_CAP:
        raise ValueError(f"exhaustive verification capped at {EXHAUSTIVE_PAIR_CAP} elements")
    if universe.bits != (1 << n) - 1:
        raise ValueError("building-block verification expects universe == full ground set")
    below = universe - block
    below_indices = below.indices()
    best_bits, best_val = 0, None
    for mask in range(1 << len(below_indices)):
        bits = 0
        for pos, idx in enumerate(below_indices):
            if (mask >> pos) & 1:
                bits |= 1 << idx
        v = inner(Subset(n, bits))
        if best_val is None or v < best_val:
            best_bits, best_val = bits, v
    predicted = Subset(n, hidden.bits | best_bits)
    return check_function_properties(
        lambda s: block_value(universe, block, hidden, inner_bound, inner, s),
        n,
        predicted,
    )


def find_submodularizer_violation(
    config: GroundConfig, block: Subset | None = None, hidden: Subset | None = None
) -> ViolationWitness:
    """Construct (and verify) a marginal violation for the bare submodularizer.

    The pattern needs the block to have at least two elements outside the
    hidden set, hence r >= 2: take X = hidden + one element below the
    block, Y = X + one block element outside the hidden set (keeping Y's
    block part strictly between hidden and block), and e a block element
    outside Y.  Adding e to X drops the submodularizer by |X below block|
    while adding it to Y changes nothing.
    """
    if config.r < 2:
        raise ValueError("the violation pattern needs r >= 2 (block strictly larger than hidden + 1)")
    n = config.n
    if block is None:
        block = Subset.from_indices(n, range(2 * config.r))
    if hidden is None:
        hidden = Subset.from_indices(n, block.indices()[: config.r])
    if not hidden.is_subset_of(block) or len(block) < len(hidden) + 2:
        raise ValueError("need hidden inside block with at least two block elements to spare")
    universe = Subset.full(n)
    outside = (universe - block).indices()
    if not outside:
        raise ValueError("need at least one element below the block")
    spare = (block - hidden).indices()

    x = hidden | Subset.from_indices(n, [outside[0]])
    y = x | Subset.from_indices(n, [spare[0]])
    e = spare[1]
    fn = lambda s: submodularizer(universe, block, hidden, s)
    e_set = Subset.from_indices(n, [e])
    witness = ViolationWitness(
        x=x, y=y, element=e, lhs=fn(y | e_set) - fn(y), rhs=fn(x | e_set) - fn(x)
    )
    if not witness.reverify(fn):
        raise RuntimeError("constructed pattern failed re-verification")  # pragma: no cover
    return witness
