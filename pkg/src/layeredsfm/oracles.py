"""Query interfaces: an honest counting oracle and the halving adversary.

The honest oracle evaluates a fixed instance and keeps query/round
accounting.  The adversary (r = 1 only) delays committing the instance:
each layer keeps an active candidate set U inside the current pool, and
every query that matches all committed layers is answered as if its
block part were either the whole block ("both", when it covers at least
half of U) or empty ("none"), shrinking U accordingly.  Both answers are
computable before the block is chosen and stay exactly consistent with
every later commit inside U, so the finalized instance replays the whole
transcript bit for bit while no query ever matched a hidden set before
its layer was committed.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from .family import (
    LayeredInstance,
    _layer_value,
    canonical_instance,
    evaluate_closed_form,
    sample_instance,
)
from .rationals import ExactValue, format_value, parse_value
from .rng import SplitMix64
from .sets import GroundConfig, Subset


class ReplayMismatchError(RuntimeError):
    """A transcript value disagrees with the finalized instance (internal bug)."""


@dataclass(frozen=True)
class QueryRecord:
    """One answered query: 1-based sequence number, round tag, set, exact value."""

    index: int
    round: int
    query: Subset
    value: ExactValue

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "round": self.round,
            "query": self.query.to_json(),
            "value": format_value(self.value),
        }


class Transcript:
    """Ordered, round-tagged log of (query, value) pairs for one interaction."""

    def __init__(self, config: GroundConfig):
        self.config = config
        self.records: list[QueryRecord] = []

    def append(self, record: QueryRecord) -> None:
        if self.records:
            last = self.records[-1]
            if record.index <= last.index or record.round < last.round:
                raise ValueError("records must have increasing indices and non-decreasing rounds")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def replay(self, inst: LayeredInstance) -> None:
        """Re-derive every recorded value from ``inst``; raise on any mismatch."""
        for rec in self.records:
            actual = evaluate_closed_form(inst, rec.query)
            if actual != rec.value:
                raise ReplayMismatchError(
                    f"record {rec.index}: query {rec.query.indices()} was answered "
                    f"{format_value(rec.value)} but the instance evaluates to {format_value(actual)}"
                )

    def to_json(self) -> dict:
        return {
            "config": {"n": self.config.n, "r": self.config.r},
            "records": [rec.to_json() for rec in self.records],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Transcript":
        config = GroundConfig(n=data["config"]["n"], r=data["config"]["r"])
        out = cls(config)
        for rec in data["records"]:
            out.append(
                QueryRecord(
                    index=rec["index"],
                    round=rec["round"],
                    query=Subset.from_json(config.n, rec["query"]),
                    value=parse_value(rec["value"]),
                )
            )
        return out


class _Counter:
    """Query/round bookkeeping shared by both oracles.

    Rounds are opened explicitly with ``begin_round``; queries issued
    before any round was opened fall into an implicit round 1.
    """

    __slots__ = ("queries", "rounds", "_lock")

    def __init__(self):
        self.queries = 0
        self.rounds = 0
        self._lock = threading.Lock()

    def begin_round(self) -> None:
        with self._lock:
            self.rounds += 1

    def count_query(self) -> tuple[int, int]:
        with self._lock:
            if self.rounds == 0:
                self.rounds = 1
            self.queries += 1
            return self.queries, self.rounds


class HonestOracle:
    """Evaluation oracle over a fixed instance, with query/round counters.

    ``answer`` may be called concurrently within a round; counting is
    synchronized.
    """

    def __init__(self, inst: LayeredInstance):
        self.instance = inst
        self.config = inst.config
        self._counter = _Counter()

    def begin_round(self) -> None:
        self._counter.begin_round()

    def answer(self, s: Subset) -> ExactValue:
        self._counter.count_query()
        return evaluate_closed_form(self.instance, s)

    def stats(self) -> tuple[int, int]:
        """(queries answered, rounds opened)."""
        return self._counter.queries, self._counter.rounds


@dataclass(frozen=True)
class LayerCommit:
    """Why and when one layer's (block, hidden) pair became fixed.

    ``cause`` is "halving" when the active set shrank to at most 3,
    "endgame" when a straddling query on a 2-element pool forced the pin,
    and "finalize" when :meth:`HalvingAdversary.finalize` completed the
    layer without any query forcing it.
    """

    layer: int
    block: Subset
    hidden: Subset
    pool_size: int
    engaged_queries: int
    cause: str


class HalvingAdversary:
    """Adaptive oracle that commits the instance as late as possible (r = 1).

    Supports the same ``answer``/``begin_round``/``stats`` surface as the
    honest oracle so any solver can be dueled unmodified.  Strictly
    sequential: callers must not share an adversary across threads.
    """

    def __init__(self, config: GroundConfig):
        if config.r != 1:
            raise ValueError("the halving adversary supports r = 1 only")
        if config.n % 2 != 0:
            raise ValueError("the halving adversary needs an even ground size")
        self.config = config
        self.transcript = Transcript(config)
        self._counter = _Counter()
        self.commits: list[LayerCommit] = []
        # engaged_layers[i]: active layer engaged by record i+1, or None when the
        # query diverged at an already-committed layer (or the instance was full).
        self.engaged_layers: list[int | None] = []
        self._pool = Subset.full(config.n)
        self._active_u = Subset.full(config.n)
        self._denom = 1  # denominator of the active layer's scale factor
        self._engaged_count = 0  # engaging queries since the active layer opened
        self._instance: LayeredInstance | None = None

    # -- inspection helpers -------------------------------------------------

    @property
    def committed(self) -> list[tuple[Subset, Subset]]:
        return [(c.block, c.hidden) for c in self.commits]

    @property
    def active_set(self) -> Subset | None:
        """Current candidate set for the active layer's block; None once full."""
        return None if self._instance is not None else self._active_u

    @property
    def fully_committed(self) -> bool:
        return self._instance is not None

    def begin_round(self) -> None:
        self._counter.begin_round()

    def stats(self) -> tuple[int, int]:
        return self._counter.queries, self._counter.rounds

    # -- core mechanics -----------------------------------------------------

    def _commit(self, block_bits: int, hidden_bits: int, cause: str) -> None:
        layer = len(self.commits) + 1
        block = Subset(self.config.n, block_bits)
        hidden = Subset(self.config.n, hidden_bits)
        self.commits.append(
            LayerCommit(
                layer=layer,
                block=block,
                hidden=hidden,
                pool_size=len(self._pool),
                engaged_queries=self._engaged_count,
                cause=cause,
            )
        )
        self._denom *= 8 * len(self._pool)
        self._pool = self._pool - block
        self._active_u = self._pool
        self._engaged_count = 0
        if layer == self.config.layer_count:
            self._instance = LayeredInstance(
                self.config,
                [c.block for c in self.commits],
                [c.hidden for c in self.commits],
            )

    def _committed_layer_value(self, layer: int, s_bits: int) -> ExactValue:
        c = self.commits[layer - 1]
        denom = 1
        for prev in self.commits[: layer - 1]:
            denom *= 8 * prev.pool_size
        pool_card = c.pool_size
        # Reconstruct the pool mask: ground minus all earlier blocks.
        pool_bits = (1 << self.config.n) - 1
        for prev in self.commits[: layer - 1]:
            pool_bits &= ~prev.block.bits
        return _layer_value(c.block.bits, c.hidden.bits, pool_bits, pool_card, denom, s_bits)

    def answer(self, s: Subset) -> ExactValue:
        """Answer one query, committing layers only when forced.

        A query that diverges at a committed layer is priced from committed
        data alone.  Otherwise it engages the active layer: covering at
        least half of the active set U is answered as "block fully inside
        the query" and U shrinks to U cap S; covering less than half is
        answered as "block disjoint from the query" and U shrinks to
        U minus S.  When U drops to 3 or fewer elements the block commits
        to its two lowest indices (hidden = the lowest).  On a 2-element
        pool a query containing exactly one pool element cannot be given
        either answer, so the block is the whole pool and the hidden
        element is pinned to the one not queried.
        """
        if s.size != self.config.n:
            raise ValueError(f"query must live on the {self.config.n}-element ground set")
        index, round_no = self._counter.count_query()
        s_bits = s.bits

        value: ExactValue
        engaged: int | None = None
        if self._instance is not None:
            value = evaluate_closed_form(self._instance, s)
        else:
            divergent = None
            for k, c in enumerate(self.commits, start=1):
                if s_bits & c.block.bits != c.hidden.bits:
                    divergent = k
                    break
            if divergent is not None:
                value = self._committed_layer_value(divergent, s_bits)
            else:
                engaged = len(self.commits) + 1
                value = self._engage_active(s_bits)

        self.engaged_layers.append(engaged)
        self.transcript.append(QueryRecord(index=index, round=round_no, query=s, value=value))
        return value

    def _engage_active(self, s_bits: int) -> ExactValue:
        u_bits = self._active_u.bits
        u_card = u_bits.bit_count()
        inter = u_bits & s_bits
        inter_card = inter.bit_count()
        pool_bits = self._pool.bits
        pool_card = pool_bits.bit_count()
        in_pool = (s_bits & pool_bits).bit_count()
        denom = self._denom
        self._engaged_count += 1

        if u_card == 2 and inter_card == 1:
            # Endgame: the pool has exactly two elements left, so the block is
            # forced; pin the hidden element to the one the query missed and
            # answer honestly (the query is incomparable to the hidden set).
            block_bits = u_bits
            hidden_bits = u_bits & ~s_bits
            self._commit(block_bits, hidden_bits, "endgame")
            return Fraction(2, denom)

        if 2 * inter_card >= u_card:
            # "Both": every remaining block candidate lies inside the query.
            value = Fraction(2 * pool_card - (in_pool - 2), denom * 2 * pool_card)
            new_u = inter
        else:
            # "None": every remaining block candidate misses the query.
            value = Fraction(2 * pool_card + in_pool, denom * 2 * pool_card)
            new_u = u_bits & ~s_bits

        self._active_u = Subset(self.config.n, new_u)
        if new_u.bit_count() <= 3:
            lowest_two = _lowest_bits(new_u, 2)
            self._commit(lowest_two, _lowest_bits(lowest_two, 1), "halving")
        return value

    def finalize(self, seed: int | None = None) -> LayeredInstance:
        """Commit all remaining layers and return the instance.

        The active layer commits inside its active set; layers never
        engaged commit from their pools.  With ``seed=None`` all remaining
        choices are canonical (lowest index first); an integer seed draws
        them uniformly instead, which is still consistent with every
        recorded answer.  Replays the transcript as a self-check and
        raises :class:`ReplayMismatchError` if any value disagrees.
        """
        if self._instance is None:
            if seed is None:
                block_bits = _lowest_bits(self._active_u.bits, 2)
                self._commit(block_bits, _lowest_bits(block_bits, 1), "finalize")
                if self._instance is None:
                    prefix = [(c.block, c.hidden) for c in self.commits]
                    completed = canonical_instance(self.config, prefix)
                    self._adopt_completion(completed)
            else:
                rng = SplitMix64(seed)
                a_idx = rng.sample(self._active_u.indices(), 2)
                r_idx = rng.sample(a_idx, 1)
                self._commit(
                    Subset.from_indices(self.config.n, a_idx).bits,
                    Subset.from_indices(self.config.n, r_idx).bits,
                    "finalize",
                )
                if self._instance is None:
                    prefix = [(c.block, c.hidden) for c in self.commits]
                    completed = sample_instance(self.config, rng.next(), prefix)
                    self._adopt_completion(completed)
        instance = self._instance
        assert instance is not None
        self.transcript.replay(instance)
        return instance

    def _adopt_completion(self, completed: LayeredInstance) -> None:
        """Register finalize-time commits for the layers no query ever touched."""
        while len(self.commits) < self.config.layer_count:
            k = len(self.commits)
            self._commit(completed.blocks[k].bits, completed.hidden_sets[k].bits, "finalize")


def _lowest_bits(bits: int, count: int) -> int:
    """Mask of the ``count`` lowest set bits of ``bits``."""
    if bits.bit_count() < count:
        raise ValueError(f"need {count} set bits, have {bits.bit_count()}")
    out = 0
    for _ in range(count):
        low = bits & -bits
        out |= low
        bits &= ~low
    return out
