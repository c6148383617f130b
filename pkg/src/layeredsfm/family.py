"""Construction and exact evaluation of the layered hard function family.

An instance is a partition of the (effective) ground set into blocks
A_1..A_L of size 2r, each hiding a half-size subset R_k inside A_k.  The
value of a query S is decided entirely by the first layer k where
S does not match the hidden set (S cap A_k != R_k): a 0/1/2 containment
score on that block, a cardinality correction on the elements below it,
and a geometric per-layer scale factor.  Sets matching every layer score
exactly 0 and the union of the hidden sets is the unique minimizer.

Two evaluators are provided: a literal recursion through nested building
blocks (the definitional path, kept for cross-checking) and a closed form
that locates the first divergent layer and prices it directly.  They agree
exactly on every subset; the closed form is the production path used by
the oracles.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .rationals import ExactValue, format_value
from .rng import SplitMix64
from .sets import GroundConfig, Relation, Subset, relate

ZERO = Fraction(0)

# Inner values are gated behind an exact match with the hidden set, and the
# recursion always re-uses the same bound for them.
INNER_BOUND = Fraction(2)


def containment_score(block: Subset, hidden: Subset, s_in_block: Subset) -> ExactValue:
    """Score a block query: 0 on exact match, 1 strictly inside/outside, 2 otherwise.

    ``hidden`` and ``s_in_block`` must both lie inside ``block``.
    """
    if not hidden.is_subset_of(block):
        raise ValueError("hidden set must lie inside the block")
    if not s_in_block.is_subset_of(block):
        raise ValueError("query restriction must lie inside the block")
    rel = relate(s_in_block, hidden)
    if rel is Relation.EQUAL:
        return ZERO
    if rel is Relation.INCOMPARABLE:
        return Fraction(2)
    return Fraction(1)


def submodularizer(universe: Subset, block: Subset, hidden: Subset, s: Subset) -> ExactValue:
    """Signed count of queried elements below the block.

    Positive (+|S below block|) when the block part of the query sits
    strictly inside the hidden set, negative when strictly outside, zero
    otherwise.  Not submodular on its own; added at small scale it makes
    the gated construction submodular.
    """
    if not block.is_subset_of(universe):
        raise ValueError("block must lie inside the universe")
    if not hidden.is_subset_of(block):
        raise ValueError("hidden set must lie inside the block")
    if not s.is_subset_of(universe):
        raise ValueError("query must lie inside the universe")
    rel = relate(s & block, hidden)
    if rel is Relation.STRICT_SUBSET:
        return Fraction(len(s - block))
    if rel is Relation.STRICT_SUPERSET:
        return Fraction(-len(s - block))
    return ZERO


def block_value(
    universe: Subset,
    block: Subset,
    hidden: Subset,
    inner_bound: ExactValue,
    inner: Callable[[Subset], ExactValue],
    s: Subset,
) -> ExactValue:
    """One layer of the construction over ``universe``.

    Returns ``containment_score + submodularizer/(2|universe|)`` plus, only
    when the query matches the hidden set exactly, the inner function on
    the elements below the block scaled by ``1/(4*inner_bound*|universe|)``.
    ``inner`` is required to take values in [0, inner_bound]; a value seen
    outside that range voids the construction's guarantees and raises.
    """
    if not hidden or not block or not universe:
        raise ValueError("universe, block, and hidden set must be non-empty")
    if inner_bound <= 0:
        raise ValueError(f"inner bound must be positive, got {inner_bound}")
    score = containment_score(block, hidden, s & block)
    value = score + Fraction(1, 2 * len(universe)) * submodularizer(universe, block, hidden, s)
    if (s & block) == hidden:
        inner_value = inner(s - block)
        if not 0 <= inner_value <= inner_bound:
            raise ValueError(
                f"inner function value {format_value(inner_value)} outside "
                f"[0, {format_value(Fraction(inner_bound))}]; construction contract violated"
            )
        value += Fraction(1, 4 * len(universe)) / inner_bound * inner_value
    return value


class LayeredInstance:
    """One member of the family: blocks A_1..A_L and hidden sets R_k inside them.

    Blocks are pairwise disjoint, each of size 2r, and together cover the
    effective prefix of the ground set; each hidden set has size r.  When
    2r does not divide n the trailing dummy elements never affect values,
    so the minimizer is unique only up to dummies.
    """

    __slots__ = ("config", "blocks", "hidden_sets", "pools", "_denoms")

    def __init__(self, config: GroundConfig, blocks: Sequence[Subset], hidden_sets: Sequence[Subset]):
        ell = config.layer_count
        if len(blocks) != ell or len(hidden_sets) != ell:
            raise ValueError(f"expected {ell} layers, got {len(blocks)} blocks / {len(hidden_sets)} hidden sets")
        covered = 0
        for k, (a, r) in enumerate(zip(blocks, hidden_sets), start=1):
            if a.size != config.n or r.size != config.n:
                raise ValueError(f"layer {k} sets must live on the {config.n}-element ground set")
            if len(a) != 2 * config.r:
                raise ValueError(f"layer {k} block has size {len(a)}, expected {2 * config.r}")
            if len(r) != config.r:
                raise ValueError(f"layer {k} hidden set has size {len(r)}, expected {config.r}")
            if not r.is_subset_of(a):
                raise ValueError(f"layer {k} hidden set must lie inside its block")
            if covered & a.bits:
                raise ValueError(f"layer {k} block overlaps an earlier block")
            covered |= a.bits
        if covered != (1 << config.effective_size) - 1:
            raise ValueError("blocks must cover exactly the effective (non-dummy) prefix")

        self.config = config
        self.blocks = list(blocks)
        self.hidden_sets = list(hidden_sets)

        # pools[k-1] = still-unclassified elements when layer k opens;
        # _denoms[k-1] = denominator of layer k's scale factor.
        pools: list[Subset] = []
        denoms: list[int] = []
        remaining = covered
        denom = 1
        for a in self.blocks:
            pools.append(Subset(config.n, remaining))
            denoms.append(denom)
            denom *= 8 * remaining.bit_count()
            remaining &= ~a.bits
        self.pools = pools
        self._denoms = denoms

    @property
    def layer_count(self) -> int:
        return self.config.layer_count

    def layer_scale(self, layer: int) -> ExactValue:
        """Product scale factor multiplying layer ``layer``'s score (1-based)."""
        return Fraction(1, self._denoms[layer - 1])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LayeredInstance)
            and self.config == other.config
            and self.blocks == other.blocks
            and self.hidden_sets == other.hidden_sets
        )

    def __hash__(self) -> int:
        return hash((self.config, tuple(self.blocks), tuple(self.hidden_sets)))

    def __repr__(self) -> str:
        layers = ", ".join(
            f"A{k}={a.indices()}/R{k}={r.indices()}"
            for k, (a, r) in enumerate(zip(self.blocks, self.hidden_sets), start=1)
        )
        return f"LayeredInstance(n={self.config.n}, r={self.config.r}, {layers})"

    def to_json(self) -> dict:
        return {
            "n": self.config.n,
            "r": self.config.r,
            "layers": [
                {"A": a.to_json(), "R": r.to_json()}
                for a, r in zip(self.blocks, self.hidden_sets)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LayeredInstance":
        config = GroundConfig(n=data["n"], r=data["r"])
        blocks = [Subset.from_json(config.n, layer["A"]) for layer in data["layers"]]
        hidden = [Subset.from_json(config.n, layer["R"]) for layer in data["layers"]]
        return cls(config, blocks, hidden)


def first_divergent_layer(inst: LayeredInstance, s: Subset) -> int | None:
    """Smallest layer k (1-based) with ``s cap A_k != R_k``, or None if all match."""
    s_bits = s.bits
    for k, (a, r) in enumerate(zip(inst.blocks, inst.hidden_sets), start=1):
        if s_bits & a.bits != r.bits:
            return k
    return None


def _layer_value(
    block_bits: int, hidden_bits: int, pool_bits: int, pool_card: int, denom: int, s_bits: int
) -> ExactValue:
    """Scaled score of one divergent layer, given raw masks.

    Shared by the closed-form evaluator and the adversary's committed-layer
    answers; assumes the query already diverges at this layer.
    """
    sa = s_bits & block_bits
    if sa == hidden_bits:
        raise ValueError("layer does not diverge on this query")
    below = (s_bits & pool_bits & ~block_bits).bit_count()
    if sa & ~hidden_bits == 0:
        score, corr = 1, below
    elif hidden_bits & ~sa == 0:
        score, corr = 1, -below
    else:
        score, corr = 2, 0
    return Fraction(score * 2 * pool_card + corr, denom * 2 * pool_card)


def evaluate_closed_form(inst: LayeredInstance, s: Subset) -> ExactValue:
    """Value of the instance at ``s`` via the first-divergent-layer formula.

    Costs O(layers + n) bit operations plus one rational reduction; this is
    the production path.  Agrees exactly with :func:`evaluate_recursive`.
    """
    if s.size != inst.config.n:
        raise ValueError(f"query must live on the {inst.config.n}-element ground set")
    k = first_divergent_layer(inst, s)
    if k is None:
        return ZERO
    i = k - 1
    pool = inst.pools[i]
    return _layer_value(
        inst.blocks[i].bits,
        inst.hidden_sets[i].bits,
        pool.bits,
        len(pool),
        inst._denoms[i],
        s.bits,
    )


def evaluate_recursive(inst: LayeredInstance, s: Subset) -> ExactValue:
    """Value of the instance at ``s`` by literal recursion through block values.

    Layer k is a :func:`block_value` over the pool of still-unclassified
    elements, whose gated inner function is the recursion on the next
    layer; the last layer is a bare containment score.  Dummy elements are
    ignored.  Kept as the independent cross-check for the closed form.
    """
    if s.size != inst.config.n:
        raise ValueError(f"query must live on the {inst.config.n}-element ground set")

    def level(k: int, s_here: Subset) -> ExactValue:
        block = inst.blocks[k - 1]
        hidden = inst.hidden_sets[k - 1]
        if k == inst.layer_count:
            return containment_score(block, hidden, s_here & block)
        return block_value(
            inst.pools[k - 1],
            block,
            hidden,
            INNER_BOUND,
            lambda deeper: level(k + 1, deeper),
            s_here,
        )

    return level(1, s & inst.pools[0])


def true_minimizer(inst: LayeredInstance) -> Subset:
    """Union of the hidden sets: the minimizer of the instance.

    Unique when 2r divides n; otherwise it is the minimal minimizer over
    the effective prefix (adding dummies never changes the value).
    """
    bits = 0
    for r in inst.hidden_sets:
        bits |= r.bits
    return Subset(inst.config.n, bits)


def minimizer_is_unique(inst: LayeredInstance) -> bool:
    return inst.config.divides_evenly


def sample_instance(
    config: GroundConfig,
    seed: int,
    prefix: Iterable[tuple[Subset, Subset]] = (),
) -> LayeredInstance:
    """Uniformly random instance, deterministic given ``seed``.

    Layer by layer, the block is uniform among size-2r subsets of the
    remaining pool and the hidden set uniform among its size-r subsets.
    ``prefix`` optionally pins the first layers to given (block, hidden)
    pairs; the remaining layers are sampled uniformly, which yields a
    uniform draw among the instances extending that prefix.
    """
    rng = SplitMix64(seed)
    blocks: list[Subset] = []
    hidden_sets: list[Subset] = []
    pool = list(range(config.effective_size))
    for a, r in prefix:
        blocks.append(a)
        hidden_sets.append(r)
        pool = [e for e in pool if e not in a]
    for _ in range(config.layer_count - len(blocks)):
        a_idx = rng.sample(pool, 2 * config.r)
        r_idx = rng.sample(a_idx, config.r)
        blocks.append(Subset.from_indices(config.n, a_idx))
        hidden_sets.append(Subset.from_indices(config.n, r_idx))
        chosen = set(a_idx)
        pool = [e for e in pool if e not in chosen]
    return LayeredInstance(config, blocks, hidden_sets)


def canonical_instance(
    config: GroundConfig,
    prefix: Iterable[tuple[Subset, Subset]] = (),
) -> LayeredInstance:
    """Lowest-index completion: each remaining layer takes the smallest
    pool indices as its block and the smallest of those as hidden."""
    blocks: list[Subset] = []
    hidden_sets: list[Subset] = []
    pool = list(range(config.effective_size))
    for a, r in prefix:
        blocks.append(a)
        hidden_sets.append(r)
        pool = [e for e in pool if e not in a]
    for _ in range(config.layer_count - len(blocks)):
        a_idx = pool[: 2 * config.r]
        r_idx = a_idx[: config.r]
        blocks.append(Subset.from_indices(config.n, a_idx))
        hidden_sets.append(Subset.from_indices(config.n, r_idx))
        pool = pool[2 * config.r :]
    return LayeredInstance(config, blocks, hidden_sets)
