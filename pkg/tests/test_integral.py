import math

import numpy as np
import pytest

from chebint.fusion import (builtin, expr_op, godel_op, lukasiewicz_op,
                            min_op, prod_op)
from chebint.integral import (IntegralError, integrate_simple,
                              integrate_survival, opposite_sugeno,
                              oracle_grid_integral, q_integral, seminormed,
                              shilkret, simple_function, sugeno)
from chebint.measure import from_table, space, survival_scenario
from chebint.randgen import random_monotone_measure, random_simple_function


@pytest.fixture
def sp():
    return space("a1", "a2", "a3")


@pytest.fixture
def m(sp):
    # m({a1})=0.2, m({a2})=0.3, m({a3})=0.5, pairwise maxima, m(X)=1
    return from_table(sp, {
        0b000: 0.0, 0b001: 0.2, 0b010: 0.3, 0b100: 0.5,
        0b011: 0.5, 0b101: 0.6, 0b110: 0.8, 0b111: 1.0,
    })


class TestSimpleIntegrals:
    def test_sugeno_basic(self, sp, m):
        f = simple_function(sp, [0.9, 0.6, 0.3])
        # candidates: 0.3 ^ m(X)=1, 0.6 ^ m({a1,a2})=0.5, 0.9 ^ m({a1})=0.2
        assert sugeno(m, sp.full_mask, f).value == pytest.approx(0.5)

    def test_restricted_domain(self, sp, m):
        f = simple_function(sp, [0.9, 0.6, 0.3])
        D = sp.mask_of(["a1"])
        assert sugeno(m, D, f).value == pytest.approx(0.2)

    def test_shilkret(self, sp, m):
        f = simple_function(sp, [0.9, 0.6, 0.3])
        expected = max(0.3 * 1.0, 0.6 * 0.5, 0.9 * 0.2)
        assert shilkret(m, sp.full_mask, f).value == pytest.approx(expected)

    def test_opposite_sugeno(self, sp, m):
        f = simple_function(sp, [0.9, 0.6, 0.3])
        expected = max(0.0, 0.3 + 1.0 - 1, 0.6 + 0.5 - 1, 0.9 + 0.2 - 1)
        assert opposite_sugeno(m, sp.full_mask, f).value == pytest.approx(expected)

    def test_seminormed_matches_named(self, sp, m):
        f = simple_function(sp, [0.4, 0.8, 0.1])
        assert seminormed(min_op(), m, sp.full_mask, f).value == \
            sugeno(m, sp.full_mask, f).value

    def test_indicator_multiple(self, sp, m):
        # integral of a*1_D under min is a ^ m(D)
        f = simple_function(sp, [0.7, 0.0, 0.0])
        assert sugeno(m, sp.full_mask, f).value == pytest.approx(0.2)

    def test_zero_function(self, sp, m):
        f = simple_function(sp, [0.0, 0.0, 0.0])
        assert shilkret(m, sp.full_mask, f).value == 0.0

    def test_two_block_discretization(self):
        # block function: 1 on the first block, 0.25 on the second, measure
        # of the upper level set drops to 0 above 0.25
        sp2 = space("low", "high")
        m2 = from_table(sp2, [0.0, 0.0, 0.0, 1.0])
        f = simple_function(sp2, [1.0, 0.25])
        assert sugeno(m2, sp2.full_mask, f).value == pytest.approx(0.25)

    def test_grid_fallback_without_declared_continuity(self, sp, m):
        op = expr_op("mincopy", "min(a, b)", non_decreasing=True)
        f = simple_function(sp, [0.9, 0.6, 0.3])
        res = integrate_simple(op, m, sp.full_mask, f)
        assert "warning:left-continuity-not-declared" in res.method
        assert res.value == pytest.approx(0.5, abs=1e-3)


class TestOracleAgreement:
    @pytest.mark.parametrize("opname", ["min", "prod", "lukasiewicz"])
    def test_exact_matches_oracle(self, opname):
        rng = np.random.default_rng(12)
        op = builtin(opname)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            sp = space(*[f"x{i}" for i in range(n)])
            m = random_monotone_measure(rng, sp, capacity=True)
            f = random_simple_function(rng, sp)
            D = int(rng.integers(1, sp.full_mask + 1))
            exact = integrate_simple(op, m, D, f).value
            grid = oracle_grid_integral(op, m, D, f, grid_step=1e-3)
            assert exact >= grid - 1e-12
            assert exact - grid <= 1e-3 + 1e-12


class TestQIntegral:
    def test_measure_in_first_slot(self, sp, m):
        f = simple_function(sp, [0.9, 0.6, 0.3])
        conj = godel_op()
        # best term at t=0.9: m({f>=0.9})=0.2 > 1-0.9, so the level survives
        res = q_integral(conj, m, f)
        assert res.value == pytest.approx(0.9)

    def test_requires_declared_fuzzy_conjunction(self, sp, m):
        f = simple_function(sp, [0.5, 0.5, 0.5])
        undeclared = expr_op("w2", "pos(a + b - 1)", non_decreasing=True,
                             left_continuous_in_second=True)
        with pytest.raises(IntegralError):
            q_integral(undeclared, m, f)

    def test_semicopula_flip_matches_seminormed(self, sp, m):
        # conj(a, b) = min(b, a) makes the q-integral the min-seminormed one
        conj = expr_op("minflip", "min(b, a)", non_decreasing=True,
                       fuzzy_conjunction=True, left_continuous_in_second=True)
        f = simple_function(sp, [0.9, 0.6, 0.3])
        assert q_integral(conj, m, f).value == \
            pytest.approx(sugeno(m, sp.full_mask, f).value)


class TestSurvival:
    def test_bisection_crossing(self):
        sv = survival_scenario(1.0, [("[0, 1]", "1 - t")])
        res = integrate_survival(min_op(), sv)
        assert res.value == pytest.approx(0.5, abs=1e-9)
        assert "bisection" in res.method

    def test_sqrt_crossing(self):
        sv = survival_scenario(1.0, [("[0, 1]", "1 - sqrt(t)")])
        res = integrate_survival(min_op(), sv)
        assert res.value == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-8)

    def test_plateau(self):
        sv = survival_scenario(1.0, [("[0, 0.25]", "1"), ("(0.25, 1]", "0")])
        assert integrate_survival(min_op(), sv).value == pytest.approx(0.25, abs=1e-9)

    def test_grid_path_for_prod(self):
        sv = survival_scenario(1.0, [("[0, 1]", "1 - t")])
        # sup t(1-t) = 1/4 at t = 1/2
        res = integrate_survival(prod_op(), sv, grid_step=1e-4)
        assert res.value == pytest.approx(0.25, abs=1e-6)
        assert "grid" in res.method

    def test_min_vs_grid_agree(self):
        sv = survival_scenario(1.0, [("[0, 0.25]", "1 - t"),
                                     ("(0.25, 0.5]", "1 - 2*t"),
                                     ("(0.5, 1]", "0")])
        exact = integrate_survival(min_op(), sv).value
        grid = integrate_survival(expr_op("min2", "min(a, b)", non_decreasing=True),
                                  sv, grid_step=1e-4).value
        assert exact == pytest.approx(1 / 3, abs=1e-8)
        assert grid == pytest.approx(exact, abs=1e-4)


class TestLemmaSupCommutes:
    def test_left_continuous_transform_commutes_with_sup(self):
        # psi(sup terms) = sup psi(terms) over the candidate set for a
        # non-decreasing continuous psi
        rng = np.random.default_rng(3)
        sp = space("x1", "x2", "x3")
        for _ in range(100):
            m = random_monotone_measure(rng, sp, capacity=True)
            f = random_simple_function(rng, sp)
            res = integrate_simple(min_op(), m, sp.full_mask, f)
            terms = [t for (_, _, t) in res.candidates]
            assert math.sqrt(res.value) == pytest.approx(
                max(math.sqrt(t) for t in terms), abs=1e-12)
