from fractions import Fraction

import pytest

from layeredsfm.family import (
    LayeredInstance,
    block_value,
    canonical_instance,
    containment_score,
    evaluate_closed_form,
    evaluate_recursive,
    first_divergent_layer,
    minimizer_is_unique,
    sample_instance,
    submodularizer,
    true_minimizer,
)
from layeredsfm.sets import GroundConfig, Subset, enumerate_subsets


def subset(n, *indices):
    return Subset.from_indices(n, indices)


@pytest.fixture
def two_layer_instance():
    """n=4, r=1 instance with blocks {0,1}/{2,3} hiding {0}/{2}."""
    cfg = GroundConfig(4, 1)
    return LayeredInstance(
        cfg,
        [subset(4, 0, 1), subset(4, 2, 3)],
        [subset(4, 0), subset(4, 2)],
    )


class TestContainmentScore:
    def test_cases(self):
        block, hidden = subset(2, 0, 1), subset(2, 0)
        assert containment_score(block, hidden, Subset(2)) == 1
        assert containment_score(block, hidden, subset(2, 0)) == 0
        assert containment_score(block, hidden, subset(2, 1)) == 2

    def test_containment_enforced(self):
        with pytest.raises(ValueError):
            containment_score(subset(3, 0), subset(3, 1), Subset(3))
        with pytest.raises(ValueError):
            containment_score(subset(3, 0), subset(3, 0), subset(3, 2))


class TestSubmodularizer:
    def test_cases(self):
        universe = Subset.full(4)
        block, hidden = subset(4, 0, 1), subset(4, 0)
        assert submodularizer(universe, block, hidden, subset(4, 2, 3)) == 2
        assert submodularizer(universe, block, hidden, subset(4, 0, 1, 2)) == -1
        assert submodularizer(universe, block, hidden, subset(4, 1, 3)) == 0

    def test_zero_on_exact_match(self):
        universe = Subset.full(4)
        block, hidden = subset(4, 0, 1), subset(4, 0)
        assert submodularizer(universe, block, hidden, subset(4, 0, 2, 3)) == 0

    def test_containment_enforced(self):
        with pytest.raises(ValueError):
            submodularizer(subset(4, 0, 1), subset(4, 0, 2), subset(4, 0), Subset(4))


class TestBlockValue:
    def setup_method(self):
        self.universe = Subset.full(4)
        self.block = subset(4, 0, 1)
        self.hidden = subset(4, 0)
        inner_block, inner_hidden = subset(4, 2, 3), subset(4, 2)
        self.inner = lambda s: containment_score(inner_block, inner_hidden, s & inner_block)

    def value(self, *indices):
        return block_value(
            self.universe, self.block, self.hidden, Fraction(2), self.inner, subset(4, *indices)
        )

    def test_minimizer_value_is_zero(self):
        assert self.value(0, 2) == 0

    def test_hand_evaluated_examples(self):
        assert self.value(2) == Fraction(9, 8)
        assert self.value(1, 2) == 2

    def test_inner_called_only_on_exact_match(self):
        calls = []

        def probe(s):
            calls.append(s)
            return Fraction(0)

        block_value(self.universe, self.block, self.hidden, Fraction(2), probe, subset(4, 1))
        assert calls == []
        block_value(self.universe, self.block, self.hidden, Fraction(2), probe, subset(4, 0, 3))
        assert calls == [subset(4, 3)]

    def test_inner_out_of_range_is_contract_violation(self):
        bad = lambda s: Fraction(3)
        with pytest.raises(ValueError, match="contract"):
            block_value(self.universe, self.block, self.hidden, Fraction(2), bad, subset(4, 0))

    def test_generic_bound_scales_gate(self):
        # Same inner function but a larger declared bound shrinks its weight:
        # the gate coefficient is 1/(4 * bound * |universe|).
        v2 = self.value(0)  # inner sees empty set -> score 1, bound 2
        v4 = block_value(self.universe, self.block, self.hidden, Fraction(4), self.inner, subset(4, 0))
        assert v2 == Fraction(1, 32) and v4 == Fraction(1, 64)


class TestEvaluators:
    def test_hand_computed_values(self, two_layer_instance):
        inst = two_layer_instance
        for s, expected in [
            (subset(4, 0, 2), Fraction(0)),
            (subset(4, 0, 3), Fraction(1, 16)),
            (subset(4, 1), Fraction(2)),
        ]:
            assert evaluate_recursive(inst, s) == expected
            assert evaluate_closed_form(inst, s) == expected

    def test_first_divergent_layer(self, two_layer_instance):
        inst = two_layer_instance
        assert first_divergent_layer(inst, subset(4, 0, 2)) is None
        assert first_divergent_layer(inst, Subset(4)) == 1
        assert first_divergent_layer(inst, subset(4, 0, 3)) == 2

    @pytest.mark.parametrize("n,r,seeds", [(4, 1, 5), (6, 1, 5), (8, 2, 5), (12, 3, 2), (12, 1, 2)])
    def test_closed_form_equals_recursion_exhaustive(self, n, r, seeds):
        cfg = GroundConfig(n, r)
        for seed in range(seeds):
            inst = sample_instance(cfg, seed)
            for s in enumerate_subsets(n):
                assert evaluate_closed_form(inst, s) == evaluate_recursive(inst, s)

    def test_closed_form_equals_recursion_with_dummies(self):
        # 2r does not divide n: trailing elements must never affect values.
        cfg = GroundConfig(11, 2)
        inst = sample_instance(cfg, 3)
        for s in enumerate_subsets(11):
            v = evaluate_closed_form(inst, s)
            assert v == evaluate_recursive(inst, s)
            stripped = s & Subset.from_indices(11, range(cfg.effective_size))
            assert v == evaluate_closed_form(inst, stripped)

    def test_range_bounds(self):
        cfg = GroundConfig(8, 1)
        inst = sample_instance(cfg, 9)
        for s in enumerate_subsets(8):
            assert 0 <= evaluate_closed_form(inst, s) <= 2

    def test_unique_minimizer(self):
        cfg = GroundConfig(8, 2)
        for seed in range(5):
            inst = sample_instance(cfg, seed)
            zeros = [s for s in enumerate_subsets(8) if evaluate_closed_form(inst, s) == 0]
            assert zeros == [true_minimizer(inst)]
            assert minimizer_is_unique(inst)

    def test_range_and_unique_minimizer_n12(self):
        cfg = GroundConfig(12, 2)
        inst = sample_instance(cfg, 5)
        zeros = []
        for s in enumerate_subsets(12):
            v = evaluate_closed_form(inst, s)
            assert 0 <= v <= 2
            if v == 0:
                zeros.append(s)
        assert zeros == [true_minimizer(inst)]

    def test_layer_scale_factors(self):
        # Nonzero values at layer k all carry the product of earlier pool scales,
        # and dividing it out lands back in the single-layer value set.
        cfg = GroundConfig(10, 1)
        inst = sample_instance(cfg, 4)
        for s in enumerate_subsets(10):
            k = first_divergent_layer(inst, s)
            if k is None:
                continue
            v = evaluate_closed_form(inst, s) / inst.layer_scale(k)
            pool = len(inst.pools[k - 1])
            assert v == 2 or abs(v - 1) * 2 * pool == int(abs(v - 1) * 2 * pool)
            assert Fraction(1, 2) <= v <= Fraction(3, 2) or v == 2

    def test_information_hiding_exact(self):
        # Instances sharing a layer prefix answer identically on any query
        # diverging within that prefix.
        cfg = GroundConfig(10, 1)
        base = sample_instance(cfg, 1)
        for depth in (1, 2, 3):
            prefix = list(zip(base.blocks[:depth], base.hidden_sets[:depth]))
            other = sample_instance(cfg, 999, prefix=prefix)
            for s in enumerate_subsets(10):
                k = first_divergent_layer(base, s)
                if k is not None and k <= depth:
                    assert evaluate_closed_form(base, s) == evaluate_closed_form(other, s)


class TestTrueMinimizer:
    def test_examples(self, two_layer_instance):
        assert true_minimizer(two_layer_instance) == subset(4, 0, 2)
        base = LayeredInstance(GroundConfig(2, 1), [subset(2, 0, 1)], [subset(2, 1)])
        assert true_minimizer(base) == subset(2, 1)

    def test_union_of_hidden_sets(self):
        cfg = GroundConfig(8, 2)
        inst = LayeredInstance(
            cfg,
            [subset(8, 0, 1, 2, 3), subset(8, 4, 5, 6, 7)],
            [subset(8, 0, 1), subset(8, 4, 5)],
        )
        assert true_minimizer(inst) == subset(8, 0, 1, 4, 5)

    def test_not_unique_with_dummies(self):
        inst = canonical_instance(GroundConfig(5, 1))
        assert not minimizer_is_unique(inst)
        best = true_minimizer(inst)
        padded = best | subset(5, 4)
        assert evaluate_closed_form(inst, best) == evaluate_closed_form(inst, padded) == 0


class TestInstanceValidation:
    def test_rejects_overlapping_blocks(self):
        cfg = GroundConfig(4, 1)
        with pytest.raises(ValueError, match="overlap"):
            LayeredInstance(cfg, [subset(4, 0, 1), subset(4, 1, 2)], [subset(4, 0), subset(4, 1)])

    def test_rejects_wrong_sizes(self):
        cfg = GroundConfig(4, 1)
        with pytest.raises(ValueError):
            LayeredInstance(cfg, [subset(4, 0, 1, 2), subset(4, 3)], [subset(4, 0), subset(4, 3)])

    def test_rejects_hidden_outside_block(self):
        cfg = GroundConfig(4, 1)
        with pytest.raises(ValueError):
            LayeredInstance(cfg, [subset(4, 0, 1), subset(4, 2, 3)], [subset(4, 2), subset(4, 3)])

    def test_rejects_wrong_cover(self):
        cfg = GroundConfig(6, 1)
        with pytest.raises(ValueError):
            LayeredInstance(cfg, [subset(6, 0, 1), subset(6, 4, 5)], [subset(6, 0), subset(6, 4)])

    def test_json_round_trip(self, two_layer_instance):
        data = two_layer_instance.to_json()
        assert data == {"n": 4, "r": 1, "layers": [
            {"A": [0, 1], "R": [0]}, {"A": [2, 3], "R": [2]}]}
        assert LayeredInstance.from_json(data) == two_layer_instance


class TestSampler:
    def test_same_seed_same_instance(self):
        cfg = GroundConfig(12, 2)
        assert sample_instance(cfg, 77) == sample_instance(cfg, 77)

    def test_base_case_frequencies(self):
        # n=2, r=1: the hidden singleton is {0} or {1}, half the time each.
        cfg = GroundConfig(2, 1)
        ones = sum(
            true_minimizer(sample_instance(cfg, seed)) == subset(2, 1)
            for seed in range(10_000)
        )
        assert abs(ones / 10_000 - 0.5) <= 0.02

    def test_first_layer_membership_rate(self):
        # n=8, r=2: Pr[element 0 in first hidden set] = (2r/n) * (1/2) = 1/4.
        cfg = GroundConfig(8, 2)
        hits = sum(
            0 in sample_instance(cfg, seed).hidden_sets[0] for seed in range(100_000)
        )
        assert abs(hits / 100_000 - 0.25) <= 0.01

    def test_prefix_is_respected(self):
        cfg = GroundConfig(8, 1)
        a1, r1 = subset(8, 3, 6), subset(8, 6)
        inst = sample_instance(cfg, 5, prefix=[(a1, r1)])
        assert inst.blocks[0] == a1 and inst.hidden_sets[0] == r1

    def test_canonical_instance_layout(self):
        inst = canonical_instance(GroundConfig(6, 1))
        assert [a.indices() for a in inst.blocks] == [[0, 1], [2, 3], [4, 5]]
        assert [r.indices() for r in inst.hidden_sets] == [[0], [2], [4]]
