import numpy as np
import pytest

from chebint.dependence import (DependenceQuery, RangeEscapeError,
                                condition_Z1, is_comonotone,
                                is_m_positively_dependent,
                                measure_supports_all_pairs)
from chebint.fusion import godel_op, lukasiewicz_op, min_op, prod_op
from chebint.integral import simple_function
from chebint.measure import from_table, necessity_from_possibility, space
from chebint.randgen import random_comonotone_pair, random_monotone_measure


@pytest.fixture
def sp():
    return space("w1", "w2")


class TestComonotone:
    def test_sorted_pair(self, sp):
        f = simple_function(sp, [0.1, 0.6])
        g = simple_function(sp, [0.2, 0.9])
        assert is_comonotone(f, g, sp.full_mask).holds

    def test_anti_monotone_witness(self, sp):
        f = simple_function(sp, [0.1, 0.6])
        g = simple_function(sp, [0.9, 0.2])
        verdict = is_comonotone(f, g, sp.full_mask)
        assert not verdict.holds
        assert set(verdict.witness) == {"w1", "w2"}

    def test_restriction_can_restore(self, sp):
        f = simple_function(sp, [0.1, 0.6])
        g = simple_function(sp, [0.9, 0.2])
        assert is_comonotone(f, g, sp.mask_of(["w1"])).holds

    def test_random_generated_pairs(self):
        rng = np.random.default_rng(5)
        sp4 = space("a", "b", "c", "d")
        for _ in range(50):
            f, g = random_comonotone_pair(rng, sp4)
            assert is_comonotone(f, g, sp4.full_mask).holds


class TestPositiveDependence:
    def test_identical_survival_profiles(self, sp):
        m = from_table(sp, [0.0, 0.4, 0.4, 1.0])
        f = simple_function(sp, [0.0, 1.0])
        q = DependenceQuery(m, f, f, sp.full_mask, sp.full_mask,
                            prod_op(), 1.0, allow_range_escape=True)
        verdict = is_m_positively_dependent(q)
        assert verdict.holds
        assert verdict.warnings  # product leaves the measure range

    def test_range_escape_raises_without_override(self, sp):
        m = from_table(sp, [0.0, 0.4, 0.4, 1.0])
        f = simple_function(sp, [0.0, 1.0])
        q = DependenceQuery(m, f, f, sp.full_mask, sp.full_mask,
                            prod_op(), 1.0, allow_range_escape=False)
        with pytest.raises(RangeEscapeError):
            is_m_positively_dependent(q)

    def test_minitive_always_dependent(self):
        rng = np.random.default_rng(9)
        sp3 = space("x1", "x2", "x3")
        for _ in range(30):
            pi = rng.uniform(0.0, 1.0, 3)
            pi[rng.integers(3)] = 1.0
            m = necessity_from_possibility(sp3, pi)
            f = simple_function(sp3, rng.uniform(0.0, 1.0, 3))
            g = simple_function(sp3, rng.uniform(0.0, 1.0, 3))
            A = int(rng.integers(1, 8))
            B = int(rng.integers(1, 8))
            q = DependenceQuery(m, f, g, A, B, min_op(), 1.0)
            assert is_m_positively_dependent(q).holds

    def test_violation_witness_is_lexicographic_first(self, sp):
        # comonotone breaks: f concentrated on w1, g on w2, intersection null
        m = from_table(sp, [0.0, 0.5, 0.5, 1.0])
        f = simple_function(sp, [1.0, 0.0])
        g = simple_function(sp, [0.0, 1.0])
        q = DependenceQuery(m, f, g, sp.full_mask, sp.full_mask,
                            min_op(), 1.0)
        verdict = is_m_positively_dependent(q)
        assert not verdict.holds
        alpha, beta = verdict.witness
        # first failing levels: both positive values
        assert (alpha, beta) == (1.0, 1.0)

    def test_low_range_conjunction_trivially_dependent(self, sp):
        # measure range inside [0, 0.5] makes the strict-threshold
        # conjunction return 0 on the right-hand side
        m = from_table(sp, [0.0, 0.2, 0.3, 0.5])
        rng = np.random.default_rng(11)
        for _ in range(30):
            f = simple_function(sp, rng.uniform(0.0, 1.0, 2))
            g = simple_function(sp, rng.uniform(0.0, 1.0, 2))
            q = DependenceQuery(m, f, g, sp.full_mask, sp.full_mask,
                                godel_op(), 1.0)
            assert is_m_positively_dependent(q).holds


class TestMeasureSupport:
    def test_minitive_supports_min(self):
        sp3 = space("x1", "x2", "x3")
        m = necessity_from_possibility(sp3, [1.0, 0.7, 0.4])
        assert measure_supports_all_pairs(m, min_op()).holds

    def test_additive_fails_min(self, sp):
        m = from_table(sp, [0.0, 0.5, 0.5, 1.0])
        verdict = measure_supports_all_pairs(m, min_op())
        assert not verdict.holds

    def test_supermodular_supports_lukasiewicz(self):
        rng = np.random.default_rng(2)
        sp3 = space("x1", "x2", "x3")
        from chebint.measure import distorted_probability
        for _ in range(10):
            p = rng.uniform(0.1, 1.0, 3)
            p = p / p.sum()
            m = distorted_probability(sp3, list(p), "x^2")
            assert measure_supports_all_pairs(m, lukasiewicz_op(),
                                              allow_range_escape=True).holds


class TestConditionZ1:
    def test_two_valued_measure_with_min(self, sp):
        m = from_table(sp, [0.0, 0.0, 0.0, 1.0])
        assert condition_Z1(m, min_op()).holds

    def test_equal_values_realized_by_same_set(self, sp):
        # c = d = 0.5 is realized by taking C = D = {w1}
        m = from_table(sp, [0.0, 0.5, 0.5, 1.0])
        assert condition_Z1(m, min_op()).holds

    def test_unrealizable_pair_fails_min(self):
        # the only sets of measure 0.5 and 0.7 intersect in sets of measure 0,
        # so the pair (0.5, 0.7) cannot realize 0.5 ^ 0.7
        sp3 = space("x1", "x2", "x3")
        m = from_table(sp3, {0b000: 0.0, 0b001: 0.5, 0b010: 0.7, 0b100: 0.0,
                             0b011: 0.9, 0b101: 0.5, 0b110: 0.7, 0b111: 1.0})
        verdict = condition_Z1(m, min_op())
        assert not verdict.holds
        assert verdict.witness == (0.5, 0.7)
