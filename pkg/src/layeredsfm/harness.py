"""Experiment runner: verification sweeps, duels, parallel rounds, hiding.

Every run is driven by an :class:`ExperimentConfig` and produces a
:class:`Report` that is byte-identical across runs with the same config
(seeded randomness only, no wall-clock anywhere).  Reports carry one
entry per assertion; a failing assertion embeds the offending witness or
transcript so the failure can be replayed standalone.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .family import (
    LayeredInstance,
    evaluate_closed_form,
    sample_instance,
    true_minimizer,
)
from .oracles import HalvingAdversary, HonestOracle
from .rationals import ExactValue, format_value
from .rng import SplitMix64
from .sets import GroundConfig, Subset
from .solvers import (
    SOLVERS,
    brute_force_minimize,
    family_aware_minimize,
    singleton_parallel_minimize,
)
from .verify import check_function_properties

MODES = ("verify", "duel", "parallel", "hiding", "bench")

# Exact-hiding triples checked by every hiding run.
HIDING_TRIPLES = 1000

# Query budget asserted by bench runs: queries <= BENCH_ALPHA * n * log2(n).
BENCH_ALPHA = 8


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: mode plus the knobs it needs.

    ``n`` is a tuple to allow bench sweeps; the other modes require a
    single value.  ``trials`` is the instance count (verify, parallel,
    bench) or the Monte-Carlo sample count (hiding).  ``queries_per_round``
    feeds the naive random-batch baseline of parallel runs and defaults to
    n^2.
    """

    mode: str
    n: tuple[int, ...]
    r: int = 1
    seed: int = 0
    trials: int = 10
    queries_per_round: int | None = None
    solver: str = "family_aware"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.n or any(v < 1 for v in self.n):
            raise ValueError("n must be one or more positive integers")
        if len(self.n) != 1 and self.mode != "bench":
            raise ValueError(f"mode {self.mode!r} takes a single n")
        if self.r < 1 or self.seed < 0 or self.trials < 1:
            raise ValueError("r and trials must be positive, seed non-negative")
        if self.queries_per_round is not None and self.queries_per_round < 1:
            raise ValueError("queries_per_round must be positive")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; expected one of {sorted(SOLVERS)}")
        for n in self.n:
            if 2 * self.r > n:
                raise ValueError(f"need 2*r <= n, got r={self.r}, n={n}")
        if self.mode == "duel":
            if self.r != 1:
                raise ValueError("duel requires r = 1")
            if self.n[0] % 2 != 0:
                raise ValueError("duel requires an even n")
        if self.mode == "verify" and self.n[0] > 12:
            raise ValueError("verify is exhaustive and capped at n = 12")
        if self.mode in ("parallel", "bench"):
            for n in self.n:
                if n % (2 * self.r) != 0:
                    raise ValueError(f"mode {self.mode!r} requires 2*r | n, got r={self.r}, n={n}")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "n": list(self.n),
            "r": self.r,
            "seed": self.seed,
            "trials": self.trials,
            "queries_per_round": self.queries_per_round,
            "solver": self.solver,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        n = data["n"]
        if isinstance(n, int):
            n = (n,)
        else:
            n = tuple(n)
        return cls(
            mode=data["mode"],
            n=n,
            r=data.get("r", 1),
            seed=data.get("seed", 0),
            trials=data.get("trials", 10),
            queries_per_round=data.get("queries_per_round"),
            solver=data.get("solver", "family_aware"),
        )


@dataclass
class Report:
    """Deterministic experiment output: trials, aggregates, assertions."""

    config: ExperimentConfig
    trials: list[dict] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    assertions: list[dict] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "", evidence: dict | None = None) -> None:
        entry: dict = {"name": name, "passed": bool(passed), "detail": detail}
        if not passed and evidence is not None:
            entry["evidence"] = evidence
        self.assertions.append(entry)

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json(),
            "trials": self.trials,
            "aggregate": self.aggregate,
            "assertions": self.assertions,
            "passed": self.passed,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_csv_text(self) -> str:
        """Flat section,key,value mirror of the aggregate table and verdicts."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "key", "value"])
        for key, value in sorted(self.config.to_json().items()):
            writer.writerow(["config", key, json.dumps(value)])
        for key, value in _flatten(self.aggregate):
            writer.writerow(["aggregate", key, json.dumps(value)])
        for a in self.assertions:
            writer.writerow(["assertion", a["name"], "pass" if a["passed"] else "fail"])
        writer.writerow(["result", "passed", json.dumps(self.passed)])
        return buf.getvalue()


def _flatten(data: dict, prefix: str = "") -> list[tuple[str, object]]:
    rows: list[tuple[str, object]] = []
    for key in sorted(data):
        value = data[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, prefix=f"{name}."))
        else:
            rows.append((name, value))
    return rows


def _summary(values: list[int]) -> dict:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        median: float | int = ordered[mid]
    else:
        median = (ordered[mid - 1] + ordered[mid]) / 2
    return {"min": ordered[0], "median": median, "max": ordered[-1]}


def run_verify(
    config: ExperimentConfig,
    eval_factory: Callable[[LayeredInstance], Callable[[Subset], ExactValue]] | None = None,
) -> Report:
    """Exhaustively check range/minimizer/submodularity on sampled instances.

    ``eval_factory`` swaps the evaluator under test (the default is the
    closed form); the mutation tests use it to confirm that a corrupted
    evaluator is caught with a concrete witness.
    """
    report = Report(config)
    n = config.n[0]
    ground = GroundConfig(n, config.r)
    if eval_factory is None:
        eval_factory = lambda inst: (lambda s: evaluate_closed_form(inst, s))
    rng = SplitMix64(config.seed)
    failures = 0
    for trial, seed in enumerate(rng.spawn_seeds(config.trials)):
        inst = sample_instance(ground, seed)
        prop = check_function_properties(eval_factory(inst), n, true_minimizer(inst))
        entry = {"trial": trial, "seed": seed, **prop.to_json()}
        report.trials.append(entry)
        if not prop.all_ok:
            failures += 1
            report.check(
                f"instance_properties_trial_{trial}",
                False,
                "range/unique-minimizer/submodularity failed",
                evidence={"instance": inst.to_json(), "report": prop.to_json()},
            )
    report.aggregate = {"instances": config.trials, "failures": failures}
    report.check("all_instances_pass", failures == 0, f"{config.trials - failures}/{config.trials} instances passed")
    return report


def run_duel(config: ExperimentConfig) -> Report:
    """Duel the named solver against the halving adversary.

    Asserts the exact deterministic query floor (n/2) * log2(n/4), exact
    transcript replay against the finalized instance, and that the solver
    returned that instance's minimizer.
    """
    report = Report(config)
    n = config.n[0]
    ground = GroundConfig(n, 1)
    adversary = HalvingAdversary(ground)
    solve = SOLVERS[config.solver]
    result = solve(adversary, ground)
    floor = (n / 2) * math.log2(n / 4)

    try:
        instance = adversary.finalize(seed=None)
    except Exception as exc:  # pragma: no cover - replay must never fail
        report.check("replay_exact", False, str(exc), evidence=adversary.transcript.to_json())
        return report

    report.trials.append(
        {
            "result": result.to_json(),
            "instance": instance.to_json(),
            "floor": floor,
            "commit_causes": [c.cause for c in adversary.commits],
        }
    )
    report.aggregate = {
        "queries": result.queries,
        "rounds": result.rounds,
        "floor": floor,
        "layers": ground.layer_count,
    }
    report.check(
        "query_floor",
        result.queries >= floor,
        f"{result.queries} queries >= floor {floor:g}",
        evidence=adversary.transcript.to_json(),
    )
    report.check("replay_exact", True, "finalized instance reproduces the transcript")
    matches = result.minimizer == true_minimizer(instance)
    report.check(
        "solver_matches_instance",
        matches and result.min_value == 0,
        "solver returned the finalized instance's minimizer",
        evidence=None if matches else {
            "solver": result.to_json(),
            "instance": instance.to_json(),
            "transcript": adversary.transcript.to_json(),
        },
    )
    return report


def _naive_random_batch(
    inst: LayeredInstance, q_per_round: int, seed: int
) -> tuple[int, int, bool]:
    """Round-batched baseline: random exploration plus frontier singletons.

    Each round issues ``q_per_round`` uniform random queries over the
    still-unclassified pool (on top of the recovered prefix) and the
    frontier singleton batch in the same round.  A random query counts as
    a lucky hit when its value shows it matched the frontier layer's
    hidden set; hits are tallied to show how rarely random batches see
    past the frontier, and the strategy still needs one round per layer
    because only the singleton batch actually identifies the hidden set.
    Returns (rounds used, lucky hits, solved correctly).
    """
    oracle = HonestOracle(inst)
    rng = SplitMix64(seed)
    config = inst.config
    n, r = config.n, config.r
    prefix = Subset(n)
    pool = Subset.from_indices(n, range(config.effective_size))
    denom = 1
    lucky = 0
    rounds = 0
    for _ in range(config.layer_count):
        pool_size = len(pool)
        oracle.begin_round()
        rounds += 1
        match_threshold = Fraction(1, 2 * denom)
        for _ in range(q_per_round):
            if oracle.answer(prefix | rng.subset_of(pool)) < match_threshold:
                lucky += 1
        hidden: list[int] = []
        deeper: list[int] = []
        passthrough = Fraction(2 * pool_size + 1, denom * 2 * pool_size)
        for e in pool.indices():
            value = oracle.answer(prefix | Subset.from_indices(n, [e]))
            v = value * denom
            if (r >= 2 and v == 1) or (r == 1 and v < Fraction(1, 2)):
                hidden.append(e)
            elif value == passthrough:
                deeper.append(e)
        prefix = prefix | Subset.from_indices(n, hidden)
        pool = Subset.from_indices(n, deeper)
        denom *= 8 * pool_size
    return rounds, lucky, prefix == true_minimizer(inst)


def run_parallel(config: ExperimentConfig) -> Report:
    """Check the one-round-per-layer structure on uniform instances.

    The singleton-parallel solver must use exactly n/(2r) rounds and
    return the true minimizer on every trial; a naive random-batch
    baseline is also run and its round distribution reported (no
    assertion attached).
    """
    report = Report(config)
    n = config.n[0]
    ground = GroundConfig(n, config.r)
    q_per_round = config.queries_per_round or n * n
    rng = SplitMix64(config.seed)
    rounds_ok = correct = 0
    naive_rounds: dict[int, int] = {}
    naive_lucky: dict[int, int] = {}
    for trial, seed in enumerate(rng.spawn_seeds(config.trials)):
        inst = sample_instance(ground, seed)
        result = singleton_parallel_minimize(HonestOracle(inst), ground)
        good_rounds = result.rounds == ground.layer_count
        good_min = result.minimizer == true_minimizer(inst) and result.min_value == 0
        rounds_ok += good_rounds
        correct += good_min
        nrounds, lucky, nsolved = _naive_random_batch(inst, q_per_round, seed)
        naive_rounds[nrounds] = naive_rounds.get(nrounds, 0) + 1
        naive_lucky[lucky] = naive_lucky.get(lucky, 0) + 1
        report.trials.append(
            {
                "trial": trial,
                "seed": seed,
                "result": result.to_json(),
                "rounds_exact": good_rounds,
                "correct": good_min,
                "naive": {"rounds": nrounds, "lucky_hits": lucky, "correct": nsolved},
            }
        )
        if not (good_rounds and good_min):
            report.check(
                f"trial_{trial}",
                False,
                "singleton solver missed rounds or minimizer",
                evidence={"instance": inst.to_json(), "result": result.to_json()},
            )
    report.aggregate = {
        "layers": ground.layer_count,
        "rounds_exact": rounds_ok,
        "correct": correct,
        "naive_round_distribution": {str(k): v for k, v in sorted(naive_rounds.items())},
        "naive_lucky_hit_distribution": {str(k): v for k, v in sorted(naive_lucky.items())},
    }
    report.check(
        "round_count_exact",
        rounds_ok == config.trials,
        f"{rounds_ok}/{config.trials} trials used exactly {ground.layer_count} rounds",
    )
    report.check(
        "all_correct", correct == config.trials, f"{correct}/{config.trials} trials correct"
    )
    return report


def _sample_block_pair(rng: SplitMix64, n: int, r: int) -> tuple[int, int]:
    """Uniform (block, hidden) bit masks: |block| = 2r uniform over the
    ground set, hidden uniform among its half-size subsets (rejection on
    popcount, exactly uniform)."""
    while True:
        a_bits = rng.bits(n)
        if a_bits.bit_count() == 2 * r:
            break
    while True:
        picks = rng.bits(2 * r)
        if picks.bit_count() == r:
            break
    r_bits = 0
    pos = 0
    tmp = a_bits
    while tmp:
        low = tmp & -tmp
        if (picks >> pos) & 1:
            r_bits |= low
        tmp &= ~low
        pos += 1
    return a_bits, r_bits


def run_hiding(config: ExperimentConfig) -> Report:
    """Estimate how rarely a random query matches a random hidden set,
    and check that answers hide everything deeper, exactly.

    Part 1 (Monte Carlo over ``trials`` samples): draw a uniform query
    (each element kept with probability 1/2) and an independent uniform
    (block, hidden) pair; count exact matches of the block part.  The
    estimate must stay under 4*(2r+1)/2^(2r), a ceiling implied by the
    central-binomial counting bound, and within a factor 2 of the exact
    prediction (balanced-intersection rate) / C(2r, r).

    Part 2 (exact, 1000 triples): two instances sharing the first layer
    but with independently sampled deeper layers must answer identically
    on any query that does not match the first hidden set.
    """
    report = Report(config)
    n = config.n[0]
    r = config.r
    ground = GroundConfig(n, r)
    rng = SplitMix64(config.seed)

    samples = config.trials
    hits = 0
    balanced = 0
    for _ in range(samples):
        a_bits, r_bits = _sample_block_pair(rng, n, r)
        s_bits = rng.bits(n)
        inter = s_bits & a_bits
        if inter.bit_count() == r:
            balanced += 1
            if inter == r_bits:
                hits += 1
    rate = Fraction(hits, samples)
    balanced_rate = Fraction(balanced, samples)
    ceiling = Fraction(4 * (2 * r + 1), 1 << (2 * r))
    prediction = balanced_rate / math.comb(2 * r, r)

    report.aggregate = {
        "samples": samples,
        "hits": hits,
        "hit_rate": format_value(rate),
        "hit_rate_float": float(rate),
        "balanced_rate": format_value(balanced_rate),
        "prediction": format_value(prediction),
        "block_choices": math.comb(2 * r, r),
        "block_choices_floor": format_value(Fraction(1 << (2 * r), 2 * r + 1)),
        "counting_ceiling": format_value(ceiling),
    }
    report.check(
        "hit_rate_below_counting_ceiling",
        rate <= ceiling,
        f"hit rate {float(rate):.3g} <= ceiling {float(ceiling):.3g}",
    )
    report.check(
        "hit_rate_matches_prediction",
        prediction / 2 <= rate <= prediction * 2 if prediction > 0 else hits == 0,
        f"hit rate {float(rate):.3g} within factor 2 of prediction {float(prediction):.3g}",
    )

    identical = 0
    mismatch_evidence: dict | None = None
    for _ in range(HIDING_TRIPLES):
        a_idx = rng.sample(range(ground.effective_size), 2 * r)
        r_idx = rng.sample(a_idx, r)
        first = (
            Subset.from_indices(n, a_idx),
            Subset.from_indices(n, r_idx),
        )
        inst_a = sample_instance(ground, rng.next(), prefix=[first])
        inst_b = sample_instance(ground, rng.next(), prefix=[first])
        while True:
            s = Subset(n, rng.bits(n))
            if s.bits & first[0].bits != first[1].bits:
                break
        va = evaluate_closed_form(inst_a, s)
        vb = evaluate_closed_form(inst_b, s)
        if va == vb:
            identical += 1
        elif mismatch_evidence is None:
            mismatch_evidence = {
                "query": s.to_json(),
                "instance_a": inst_a.to_json(),
                "instance_b": inst_b.to_json(),
                "value_a": format_value(va),
                "value_b": format_value(vb),
            }
    report.aggregate["exact_hiding_identical"] = identical
    report.aggregate["exact_hiding_triples"] = HIDING_TRIPLES
    report.check(
        "exact_hiding",
        identical == HIDING_TRIPLES,
        f"{identical}/{HIDING_TRIPLES} triples answered identically",
        evidence=mismatch_evidence,
    )
    return report


def run_bench(config: ExperimentConfig) -> Report:
    """Measure the family-aware solver's query growth over an n sweep.

    Asserts correctness on every trial (cross-checked against brute force
    for n <= 16) and the fixed budget queries <= 8 * n * log2(n); reports
    the measured constant max queries / (n log2 n).
    """
    report = Report(config)
    rng = SplitMix64(config.seed)
    alpha_max = 0.0
    per_n: dict[str, dict] = {}
    all_correct = True
    within_budget = True
    for n in config.n:
        ground = GroundConfig(n, config.r)
        queries: list[int] = []
        correct = 0
        cross_checked = 0
        for trial, seed in enumerate(rng.spawn_seeds(config.trials)):
            inst = sample_instance(ground, seed)
            result = family_aware_minimize(HonestOracle(inst), ground)
            good = result.minimizer == true_minimizer(inst) and result.min_value == 0
            if good and n <= 16:
                brute = brute_force_minimize(HonestOracle(inst))
                good = brute.minimizer == result.minimizer and brute.min_value == result.min_value
                cross_checked += 1
            correct += good
            queries.append(result.queries)
            if not good:
                all_correct = False
                report.check(
                    f"bench_n{n}_trial_{trial}",
                    False,
                    "family-aware solver returned a wrong minimizer",
                    evidence={"instance": inst.to_json(), "result": result.to_json()},
                )
            report.trials.append(
                {"n": n, "trial": trial, "seed": seed, "queries": result.queries,
                 "rounds": result.rounds, "correct": good}
            )
        budget = BENCH_ALPHA * n * math.log2(max(n, 2))
        alpha_here = max(q / (n * math.log2(max(n, 2))) for q in queries)
        alpha_max = max(alpha_max, alpha_here)
        if max(queries) > budget:
            within_budget = False
        per_n[str(n)] = {
            "queries": _summary(queries),
            "alpha": round(alpha_here, 6),
            "budget": round(budget, 3),
            "correct": correct,
            "cross_checked_brute": cross_checked,
        }
    report.aggregate = {"per_n": per_n, "measured_alpha": round(alpha_max, 6)}
    report.check("all_correct", all_correct, "every trial returned the true minimizer")
    report.check(
        "query_budget",
        within_budget,
        f"measured alpha {alpha_max:.3f} <= {BENCH_ALPHA}",
    )
    return report


RUNNERS = {
    "verify": run_verify,
    "duel": run_duel,
    "parallel": run_parallel,
    "hiding": run_hiding,
    "bench": run_bench,
}


def run_experiment(config: ExperimentConfig) -> Report:
    return RUNNERS[config.mode](config)
