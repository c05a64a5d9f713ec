import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramdyn import (
    AdvantageMatrix,
    PopulationState,
    RegionMeasure,
    babelian,
    from_regions,
    matrix_from_dict,
    penalties,
    quasi_babelian,
    validate,
    symmetric,
    two_grammar,
)
from gramdyn.advantage import _subsets

from conftest import random_proper_matrix, random_region_weights

# balanced 3x3 used across validation tests: delta sums to zero
BALANCED = np.array([
    [0.0, 0.30, 0.30],
    [0.10, 0.0, 0.20],
    [0.15, 0.25, 0.0],
])


class TestConstructors:
    def test_two_grammar_layout(self):
        m = two_grammar(0.2, 0.1)
        assert m.entries[0, 1] == 0.1
        assert m.entries[1, 0] == 0.2
        assert m.entries[0, 0] == m.entries[1, 1] == 0.0
        assert m.proper

    def test_babelian_all_equal(self):
        m = babelian(4, 0.07)
        off = ~np.eye(4, dtype=bool)
        assert np.all(m.entries[off] == 0.07)
        assert np.all(np.diag(m.entries) == 0.0)

    def test_symmetric_layout(self):
        m = symmetric(0.05, 0.01, 0.02)
        e = m.entries
        assert e[0, 1] == e[1, 0] == 0.05
        assert e[0, 2] == e[2, 0] == 0.01
        assert e[1, 2] == e[2, 1] == 0.02

    def test_quasi_babelian_layout(self):
        # one grammar is harder for the others to beat: column 1 below
        # the diagonal carries b, every other off-diagonal entry is a
        m = quasi_babelian(0.1, 0.15)
        e = m.entries
        assert e[1, 0] == e[2, 0] == 0.15
        assert e[0, 1] == e[0, 2] == e[1, 2] == e[2, 1] == 0.1

    @pytest.mark.parametrize("build", [
        lambda: babelian(3, 0.0),
        lambda: babelian(3, -0.1),
        lambda: babelian(1, 0.1),
        lambda: babelian(3, 1.5),
        lambda: symmetric(0.0, 0.1, 0.1),
        lambda: quasi_babelian(0.1, 0.0),
        lambda: two_grammar(-0.2, 0.1),
    ])
    def test_constructor_rejects_bad_params(self, build):
        with pytest.raises(ValueError):
            build()


class TestValidation:
    def test_balanced_matrix_accepted(self):
        m = AdvantageMatrix(BALANCED)
        report = validate(m)
        assert report.ok and bool(report)
        assert report.proper
        assert report.violations == ()

    def test_nonzero_diagonal_rejected(self):
        bad = BALANCED.copy()
        bad[1, 1] = 0.05
        with pytest.raises(ValueError, match="inadmissible advantage matrix"):
            AdvantageMatrix(bad)
        report = validate(AdvantageMatrix.unchecked(bad))
        rules = [v[0] for v in report.violations]
        assert "nonzero-diagonal" in rules
        assert any(idx == (1, 1) for _, idx, _ in report.violations)

    def test_entry_outside_unit_interval_rejected(self):
        bad = BALANCED.copy()
        bad[0, 1] = 1.2
        bad[0, 2] = 1.2
        report = validate(AdvantageMatrix.unchecked(bad))
        assert not report.ok
        assert any(v[0] == "entry-outside-unit-interval" for v in report.violations)

    def test_cyclical_balance_rejected(self):
        bad = BALANCED.copy()
        bad[0, 1] = 0.25
        report = validate(AdvantageMatrix.unchecked(bad))
        assert any(v[0] == "cyclical-balance" for v in report.violations)
        with pytest.raises(ValueError, match="cyclical-balance"):
            AdvantageMatrix(bad)

    def test_balance_not_required_beyond_three(self):
        rng = np.random.default_rng(5)
        m = random_proper_matrix(rng, 4)
        assert validate(m).ok

    def test_proper_flag_without_violation(self):
        # zero off-diagonal entries are admissible but not proper
        a = np.array([
            [0.0, 0.0, 0.3],
            [0.0, 0.0, 0.3],
            [0.3, 0.3, 0.0],
        ])
        m = AdvantageMatrix(a)
        assert validate(m).ok
        assert not m.proper

    def test_describe_mentions_rule_and_residual(self):
        bad = BALANCED.copy()
        bad[0, 1] = 0.25
        text = validate(AdvantageMatrix.unchecked(bad)).describe()
        assert "cyclical-balance" in text

    def test_entries_are_read_only_copies(self):
        m = AdvantageMatrix(BALANCED)
        with pytest.raises(ValueError):
            m.entries[0, 1] = 0.9
        e = m.entries
        assert e is not m.entries or not e.flags.writeable


class TestPenalties:
    def test_hand_example(self):
        m = AdvantageMatrix(BALANCED)
        p = np.array([0.5, 0.3, 0.2])
        c = penalties(m, p)
        expect = [0.30 * 0.3 + 0.30 * 0.2,
                  0.10 * 0.5 + 0.20 * 0.2,
                  0.15 * 0.5 + 0.25 * 0.3]
        assert np.allclose(c.values, expect, atol=1e-15)
        assert len(c) == 3
        assert c[1] == pytest.approx(expect[1], abs=1e-15)

    def test_dimension_mismatch(self):
        m = AdvantageMatrix(BALANCED)
        with pytest.raises(ValueError):
            penalties(m, np.array([0.5, 0.5]))

    def test_accepts_population_state(self):
        m = AdvantageMatrix(BALANCED)
        c = penalties(m, PopulationState.uniform(3))
        assert np.all(c.values > 0)

    def test_zero_penalty_exactly_at_own_vertex(self):
        # for a proper system the only zero penalty is the monopoly grammar
        rng = np.random.default_rng(11)
        for _ in range(50):
            m = random_proper_matrix(rng, 3)
            for i in range(3):
                c = penalties(m, PopulationState.vertex(3, i)).values
                assert c[i] == 0.0
                others = np.delete(c, i)
                assert np.all(others > 0.0)

    def test_interior_penalties_positive_when_proper(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            m = random_proper_matrix(rng, 3)
            p = rng.dirichlet(np.ones(3))
            assert np.all(penalties(m, p).values > 0.0)


class TestRegions:
    def test_pairwise_advantage_from_subset_sums(self):
        # independent route: a_ij must equal the total weight of regions
        # containing j but not i
        rng = np.random.default_rng(23)
        for n in (2, 3, 4):
            for _ in range(25):
                measure = random_region_weights(rng, n)
                weights = measure.weights
                m = from_regions(measure)
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        s = sum(w for key, w in weights.items()
                                if (j + 1) in key and (i + 1) not in key)
                        assert m.entries[i, j] == pytest.approx(s, abs=1e-12)

    def test_random_measures_always_admissible(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            m = from_regions(random_region_weights(rng, 3))
            assert validate(m).ok

    def test_measure_requires_unit_total(self):
        with pytest.raises(ValueError):
            RegionMeasure(2, {frozenset({1}): 0.6, frozenset({2}): 0.5})

    def test_measure_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            RegionMeasure(2, {frozenset({1}): -0.1, frozenset({2}): 1.1})

    def test_measure_rejects_out_of_range_region(self):
        with pytest.raises(ValueError):
            RegionMeasure(2, {frozenset({1}): 0.5, frozenset({3}): 0.5})

    def test_measure_tolerates_tiny_imbalance(self):
        m = RegionMeasure(2, {frozenset({1}): 0.5, frozenset({2}): 0.5 + 1e-10})
        assert m.weight(frozenset({2})) > 0.5

    def test_from_strings_digit_keys(self):
        m = RegionMeasure.from_strings(2, {"1": 0.2, "2": 0.3, "12": 0.5})
        assert m.n == 2
        assert m.weight(frozenset({1, 2})) == 0.5
        matrix = from_regions(m)
        # grammar 2 alone holds 0.3 of the input space
        assert matrix.entries[0, 1] == pytest.approx(0.3)
        assert matrix.entries[1, 0] == pytest.approx(0.2)

    def test_duplicate_keys_merge(self):
        m = RegionMeasure(2, {frozenset({1}): 0.25, (1,): 0.25, frozenset({2}): 0.5})
        assert m.weight(frozenset({1})) == pytest.approx(0.5)

    def test_subset_enumeration_order(self):
        subs = _subsets(3)
        assert len(subs) == 7
        assert subs[0] == frozenset({1})
        assert frozenset({1, 2, 3}) in subs

    @given(st.lists(st.floats(0.01, 1.0), min_size=7, max_size=7))
    @settings(max_examples=50, deadline=None)
    def test_any_normalized_measure_yields_valid_matrix(self, raw):
        w = np.array(raw) / np.sum(raw)
        m = from_regions(RegionMeasure(3, dict(zip(_subsets(3), w))))
        report = validate(m)
        assert report.ok
        d12 = m.entries[1, 0] - m.entries[0, 1]
        d23 = m.entries[2, 1] - m.entries[1, 2]
        d31 = m.entries[0, 2] - m.entries[2, 0]
        assert abs(d12 + d23 + d31) <= 1e-12


class TestMatrixFromDict:
    def test_entries_form(self):
        m = matrix_from_dict({"n": 3, "entries": BALANCED.tolist()})
        assert np.array_equal(m.entries, BALANCED)

    def test_entries_dimension_mismatch(self):
        with pytest.raises(ValueError):
            matrix_from_dict({"n": 2, "entries": BALANCED.tolist()})

    def test_regions_form(self):
        m = matrix_from_dict({"regions": {"1": 0.2, "2": 0.3, "12": 0.5}})
        assert m.n == 2

    def test_regions_form_with_explicit_n(self):
        m = matrix_from_dict({"n": 3, "regions": {"1": 0.5, "23": 0.5}})
        assert m.n == 3

    def test_requires_exactly_one_source(self):
        with pytest.raises(ValueError):
            matrix_from_dict({})
        with pytest.raises(ValueError):
            matrix_from_dict({"entries": BALANCED.tolist(),
                              "regions": {"0": 1.0}})


class TestUncheckedEscapeHatch:
    def test_unchecked_skips_validation(self):
        bad = np.array([[0.0, 2.0], [0.5, 0.0]])
        m = AdvantageMatrix.unchecked(bad)
        assert m.entries[0, 1] == 2.0
        assert not validate(m).ok
