"""Reference minimizers for layered instances.

Three solvers, exercising both sides of the query-complexity picture:

* :func:`brute_force_minimize` scans the full power set in one round and
  is the ground truth for everything else.
* :func:`family_aware_minimize` knows only (n, r) and recovers the hidden
  sets layer by layer with adaptive group testing, in O(n log n) queries.
* :func:`singleton_parallel_minimize` spends exactly one batched round per
  layer, classifying every remaining element from singleton queries.

All three drive an oracle handle (honest or adversarial) through its
``answer``/``begin_round`` surface and report their own query/round use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .rationals import ExactValue, format_value
from .sets import EXHAUSTIVE_CAP, GroundConfig, Relation, Subset, enumerate_subsets

# Engineering budget for the family-aware solver: queries <= ALPHA * n * log2(n).
QUERY_BUDGET_ALPHA = 8


class CorruptedOracleError(RuntimeError):
    """An oracle answer fell outside the value set any instance can produce."""


@dataclass(frozen=True)
class SolverResult:
    """Outcome of one minimization run."""

    solver: str
    minimizer: Subset
    min_value: ExactValue
    queries: int
    rounds: int

    def to_json(self) -> dict:
        return {
            "solver": self.solver,
            "minimizer": self.minimizer.to_json(),
            "value": format_value(self.min_value),
            "queries": self.queries,
            "rounds": self.rounds,
        }


@dataclass(frozen=True)
class LayerAnswer:
    """What a single oracle value reveals about one layer.

    ``relation`` compares the query's block part with the layer's hidden
    set.  It is None in the one ambiguous case (normalized value exactly 1:
    comparable, but the direction needs the caller's knowledge of how many
    pool elements were queried; see :meth:`disambiguate`).  ``outside_block``
    counts queried pool elements below the block; it is None exactly when
    the value carries no such count (incomparable, or an exact match whose
    residual encodes deeper layers instead).
    """

    relation: Relation | None
    outside_block: int | None
    layer: int

    def disambiguate(self, queried_in_pool: int, r: int) -> "LayerAnswer":
        """Resolve the ambiguous comparable case given |query cap pool|.

        With no queried elements below the block, the block part *is* the
        queried pool part, so its size against r decides the direction.
        """
        if self.relation is not None:
            return self
        if queried_in_pool < r:
            rel = Relation.STRICT_SUBSET
        elif queried_in_pool > r:
            rel = Relation.STRICT_SUPERSET
        else:
            raise CorruptedOracleError(
                "comparable answer with r queried pool elements would be an exact match"
            )
        return LayerAnswer(relation=rel, outside_block=self.outside_block, layer=self.layer)


def decode_layer_answer(
    value: ExactValue, layer_scale: ExactValue, pool_size: int, layer: int
) -> LayerAnswer:
    """Invert one oracle value into relation-and-count form.

    ``value`` must come from a query matching every layer before ``layer``;
    ``layer_scale`` is that layer's product scale factor and ``pool_size``
    the number of elements still unclassified when it opens.  Values no
    instance can produce raise :class:`CorruptedOracleError`.
    """
    if layer_scale <= 0 or pool_size <= 0:
        raise ValueError("layer scale and pool size must be positive")
    v = Fraction(value) / layer_scale
    if v < 0 or v > 2:
        raise CorruptedOracleError(f"normalized value {format_value(v)} outside [0, 2]")
    if v == 2:
        return LayerAnswer(relation=Relation.INCOMPARABLE, outside_block=None, layer=layer)
    if v == 1:
        return LayerAnswer(relation=None, outside_block=0, layer=layer)
    if v < Fraction(1, 2):
        return LayerAnswer(relation=Relation.EQUAL, outside_block=None, layer=layer)
    if v > 1:
        rel, count = Relation.STRICT_SUBSET, 2 * pool_size * (v - 1)
    else:
        rel, count = Relation.STRICT_SUPERSET, 2 * pool_size * (1 - v)
    if count.denominator != 1 or count > pool_size:
        raise CorruptedOracleError(f"normalized value {format_value(v)} matches no layer case")
    return LayerAnswer(relation=rel, outside_block=int(count), layer=layer)


def brute_force_minimize(oracle) -> SolverResult:
    """Query every subset (one round) and return the smallest value found.

    Ties break to the lexicographically least index list.  Ground truth
    for the other solvers; capped at the exhaustive-enumeration limit.
    """
    n = oracle.config.n
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"brute force refused for n={n} (cap is {EXHAUSTIVE_CAP})")
    oracle.begin_round()
    best: Subset | None = None
    best_value: ExactValue | None = None
    best_key: tuple[int, ...] | None = None
    queries = 0
    for s in enumerate_subsets(n):
        value = oracle.answer(s)
        queries += 1
        key = tuple(s.indices())
        if best_value is None or value < best_value or (value == best_value and key < best_key):
            best, best_value, best_key = s, value, key
    assert best is not None and best_value is not None
    return SolverResult("brute_force", best, best_value, queries, 1)


class _QueryCounter:
    """Local per-run accounting; oracles may be shared across runs."""

    __slots__ = ("oracle", "queries", "rounds")

    def __init__(self, oracle):
        self.oracle = oracle
        self.queries = 0
        self.rounds = 0

    def begin_round(self) -> None:
        self.oracle.begin_round()
        self.rounds += 1

    def ask(self, s: Subset) -> ExactValue:
        self.queries += 1
        return self.oracle.answer(s)


def _split_block(indices: list[int]) -> tuple[list[int], list[int]]:
    mid = len(indices) // 2
    return indices[:mid], indices[mid:]


def family_aware_minimize(oracle, config: GroundConfig) -> SolverResult:
    """Recover the minimizer knowing only (n, r), in O(n log n) queries.

    Works against any oracle answering consistently with some instance,
    honest or adversarial.  Per layer, over the pool of unclassified
    elements (prefix = union of hidden sets already recovered):

    Phase A grows an accepted set T whose block part stays inside the
    hidden set: blocks W of the pool are queried as prefix + T + W and
    accepted on a subset/equal relation; on a superset/incomparable
    relation the block splits in half, and bad singletons are exactly the
    block elements outside the hidden set (r of them, then the rest of the
    pool is clean).  Phase B extracts the hidden set from T by removal:
    querying prefix + (T - W) answers "equal" exactly when W misses the
    hidden set, so splitting on "strict subset" isolates the r hidden
    elements.  The 2r classified elements leave the pool and the next
    layer repeats.  Every query gets its own round (the procedure is fully
    adaptive).  Query use is asserted against the fixed engineering budget
    of ``QUERY_BUDGET_ALPHA * n * log2(max(n, 2))``.
    """
    counter = _QueryCounter(oracle)
    n, r = config.n, config.r
    budget = QUERY_BUDGET_ALPHA * n * math.log2(max(n, 2))

    def ask(s: Subset) -> ExactValue:
        counter.begin_round()
        value = counter.ask(s)
        if counter.queries > budget:
            raise RuntimeError(
                f"query budget exceeded: {counter.queries} > {budget:.0f} at n={n}, r={r}"
            )
        return value

    prefix = Subset(n)
    pool = Subset.from_indices(n, range(config.effective_size))
    scale = Fraction(1)

    for layer in range(1, config.layer_count + 1):
        pool_size = len(pool)

        def decode(value: ExactValue, queried_in_pool: int) -> LayerAnswer:
            ans = decode_layer_answer(value, scale, pool_size, layer)
            if ans.relation is None:
                ans = ans.disambiguate(queried_in_pool, r)
            return ans

        # Phase A: classify away the block elements outside the hidden set.
        accepted = Subset(n)
        bad: list[int] = []
        blocks = [pool.indices()]
        while blocks and len(bad) < r:
            w = blocks.pop()
            s = prefix | accepted | Subset.from_indices(n, w)
            ans = decode(ask(s), len(accepted) + len(w))
            if ans.relation in (Relation.EQUAL, Relation.STRICT_SUBSET):
                accepted = accepted | Subset.from_indices(n, w)
            elif len(w) == 1:
                bad.append(w[0])
            else:
                first, second = _split_block(w)
                blocks.append(second)
                blocks.append(first)
        if len(bad) != r:
            raise CorruptedOracleError(
                f"layer {layer}: found {len(bad)} off-pattern block elements, expected {r}"
            )
        while blocks:  # remaining blocks are clean once all r bads are known
            accepted = accepted | Subset.from_indices(n, blocks.pop())

        # Phase B: extract the hidden set from T by group-tested removal.
        hidden: list[int] = []
        blocks = [accepted.indices()]
        while blocks and len(hidden) < r:
            w = blocks.pop()
            removed = Subset.from_indices(n, w)
            s = prefix | (accepted - removed)
            ans = decode(ask(s), len(accepted) - len(w))
            if ans.relation is Relation.EQUAL:
                pass  # W misses the hidden set entirely
            elif ans.relation is Relation.STRICT_SUBSET:
                if len(w) == 1:
                    hidden.append(w[0])
                else:
                    first, second = _split_block(w)
                    blocks.append(second)
                    blocks.append(first)
            else:
                raise CorruptedOracleError(
                    f"layer {layer}: removal query decoded as {ans.relation}"
                )
        if len(hidden) != r:
            raise CorruptedOracleError(
                f"layer {layer}: found {len(hidden)} hidden elements, expected {r}"
            )

        hidden_set = Subset.from_indices(n, hidden)
        prefix = prefix | hidden_set
        pool = (accepted - hidden_set)
        scale = scale / (8 * pool_size)

    value = ask(prefix)
    return SolverResult("family_aware", prefix, value, counter.queries, counter.rounds)


def singleton_parallel_minimize(oracle, config: GroundConfig) -> SolverResult:
    """Solve one layer per batched round via singleton queries.

    Round k queries prefix + {e} for every unclassified element e and
    classifies e from the normalized value alone: 2 means e is a block
    element outside the hidden set; 1 means e is hidden (only possible for
    r >= 2); below 1/2 means e is the hidden singleton (r = 1); exactly
    1 + 1/(2 * pool) means e belongs to deeper layers.  Uses exactly one
    round per layer and pool-many queries per round; requires an honest
    oracle over a known-(n, r) instance.
    """
    counter = _QueryCounter(oracle)
    n, r = config.n, config.r
    prefix = Subset(n)
    pool = Subset.from_indices(n, range(config.effective_size))
    denom = 1

    for layer in range(1, config.layer_count + 1):
        pool_size = len(pool)
        counter.begin_round()
        answers = [(e, counter.ask(prefix | Subset.from_indices(n, [e]))) for e in pool.indices()]
        hidden: list[int] = []
        off_block: list[int] = []
        deeper: list[int] = []
        passthrough = Fraction(2 * pool_size + 1, denom * 2 * pool_size)
        for e, value in answers:
            v = value * denom
            if v == 2:
                off_block.append(e)
            elif r >= 2 and v == 1:
                hidden.append(e)
            elif r == 1 and v < Fraction(1, 2):
                hidden.append(e)
            elif value == passthrough:
                deeper.append(e)
            else:
                raise CorruptedOracleError(
                    f"layer {layer}: singleton value {format_value(value)} matches no class"
                )
        if len(hidden) != r or len(off_block) != r:
            raise CorruptedOracleError(
                f"layer {layer}: classified {len(hidden)} hidden / {len(off_block)} off-block, expected {r} each"
            )
        prefix = prefix | Subset.from_indices(n, hidden)
        pool = Subset.from_indices(n, deeper)
        denom *= 8 * pool_size

    # Every layer matched, so the minimum value is exactly 0 by construction.
    return SolverResult("singleton_parallel", prefix, Fraction(0), counter.queries, counter.rounds)


SOLVERS = {
    "brute_force": lambda oracle, config: brute_force_minimize(oracle),
    "family_aware": family_aware_minimize,
    "singleton_parallel": singleton_parallel_minimize,
}
