import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from timelike.algebra import GaussianRational
from timelike.period import (
    EmptyNullspace,
    NotConjugateSymmetric,
    OrderMismatch,
    PeriodViolation,
    WeierstrassPair,
    ansatz_f,
    assemble_bicomplex,
    augment_weak_complete,
    augmentation_system,
    build_alpha,
    check_period,
    choose_solution,
    solve_factor,
    solve_period_system,
)
from timelike.ratfunc import RationalFunction, residue_at
from timelike.verify import bicomplex_loop_integral, split_loop_integral

from conftest import Z, distinct_real_poles, random_real_g

I = GaussianRational(0, 1)


def sympy_matrix(g_expr, poles, n):
    """Residue rows built independently with sympy for the f ansatz."""
    s = sympy.Symbol("s")
    a = sympy.symbols(f"a1:{n}")
    b = sympy.symbols(f"b0:{2 * n - 1}")
    f = sum(ai / (s - p) ** 2 for ai, p in zip(a, poles)) + sum(bj * s**j for j, bj in enumerate(b))
    rows = []
    for p in poles:
        for expr in (g_expr * f, g_expr**2 * f):
            res = sympy.expand(sympy.residue(sympy.together(expr), s, p))
            rows.append([res.coeff(v) for v in (*a, *b)])
    return sympy.Matrix(rows) if rows else sympy.zeros(0, 3 * n - 2)


class TestBuildAlpha:
    def test_example(self, ref_pair):
        a1, a2, a3 = build_alpha(ref_pair)
        assert a1 == -1 / Z**2 + 1
        assert a2 == 2 / Z
        assert a3 == -1 / Z**2 - 1

    def test_constant(self):
        w = WeierstrassPair(RationalFunction.constant(0), RationalFunction.constant(1))
        assert build_alpha(w) == (1, 0, 1)

    def test_identity_g(self):
        w = WeierstrassPair(Z, RationalFunction.constant(1))
        assert build_alpha(w) == (1 - Z**2, 2 * Z, 1 + Z**2)


class TestCheckPeriod:
    def test_example_modes(self, ref_pair):
        strict = check_period(ref_pair, "strict")
        real = check_period(ref_pair, "real_residue")
        assert real.passed and not strict.passed
        (bad,) = strict.failures()
        assert (bad.pole, bad.component, bad.residue) == (0, 2, 2)

    def test_no_poles(self):
        w = WeierstrassPair(RationalFunction.constant(0), RationalFunction.constant(1))
        assert check_period(w, "strict").passed and check_period(w, "real").passed

    def test_imaginary_residue(self):
        w = WeierstrassPair.unchecked(-Z, I / Z**2)
        rep = check_period(w, "real_residue")
        assert not rep.passed
        # 2 g f = -2i/z
        assert rep.failures()[0].residue == GaussianRational(0, -2)

    def test_residue_at_infinity_is_informational(self, ref_pair):
        rep = check_period(ref_pair, "strict")
        assert [str(r) for r in rep.residues_at_infinity] == ["0", "-2", "0"]

    @pytest.mark.parametrize("c", [Fraction(3), Fraction(-1, 2), Fraction(7, 5)])
    def test_scale_invariance(self, c):
        rng = random.Random(int(c * 10))
        for _ in range(5):
            poles = distinct_real_poles(rng, 2)
            g = random_real_g(rng, poles)
            w = WeierstrassPair(g, (Z - poles[0]) / (Z - poles[1]) ** 3)
            assert check_period(w, "real").passed == check_period(WeierstrassPair(g, c * w.f), "real").passed


class TestSolve:
    def test_no_finite_poles(self):
        system, basis = solve_period_system(-Z, [])
        assert len(system.matrix) == 0 and system.unknowns == ("b0",)
        assert len(basis) == 1

    def test_one_pole_hand_oracle(self):
        # g = 1 + w + 1/w with w = z - 1: Res(g f) = a + P(1), Res(g^2 f) = 2a + 2P(1) + P'(1)
        system, basis = solve_period_system(Z + 1 / (Z - 1), [1])
        assert system.unknowns == ("a1", "b0", "b1", "b2")
        assert system.matrix == ((1, 1, 1, 1), (2, 2, 3, 4))
        assert len(basis) >= 2

    def test_two_poles_sympy_oracle(self):
        s = sympy.Symbol("s")
        system, basis = solve_period_system(1 / (Z - 1) + 1 / (Z + 1), [1, -1])
        want = sympy_matrix(1 / (s - 1) + 1 / (s + 1), [1, -1], 3)
        assert sympy.Matrix(system.matrix) == want
        assert len(system.matrix) <= 4 and len(system.unknowns) == 7
        assert len(basis) >= 3 and len(basis) == 7 - want.rank()

    def test_rejects_undeclared_pole(self):
        with pytest.raises(ValueError):
            solve_period_system(1 / (Z - 2), [1])

    def test_rejects_complex_g(self):
        with pytest.raises(NotConjugateSymmetric):
            solve_period_system(I * Z, [])

    def test_dimension_and_exact_zero_residues(self):
        rng = random.Random(2024)
        for trial in range(60):
            n = 1 + trial % 4
            poles = distinct_real_poles(rng, n - 1)
            g = random_real_g(rng, poles)
            system, basis = solve_period_system(g, poles)
            assert len(basis) >= n
            for v in basis:
                f = ansatz_f(poles, v)
                for p in poles:
                    assert residue_at(g * f, p) == 0 and residue_at(g * g * f, p) == 0
                assert all(x == 0 for x in system.residuals(v))


class TestChooseSolution:
    def test_both_nonzero(self):
        assert choose_solution([(1, 0), (0, 1)], 1).vector == (1, 1)

    def test_forced_zero(self):
        ch = choose_solution([(0, 1)], 1)
        assert ch.vector == (0, 1) and ch.a_zero == (1,)

    def test_single_vector(self):
        assert choose_solution([(2, -4, 6)], 1).vector == (2, -4, 6)

    def test_deterministic_and_in_span(self):
        basis = [(1, 0, 2, 0), (0, 1, -1, 1), (1, 1, 0, 0)]
        ch = choose_solution(basis, 2)
        assert ch == choose_solution(basis, 2)
        combo = [sum(c * v[i] for c, v in zip(ch.combination, basis)) for i in range(4)]
        assert tuple(combo) == ch.vector
        assert ch.rationale

    def test_empty(self):
        with pytest.raises(EmptyNullspace):
            choose_solution([], 0)


class TestAugmentation:
    def test_unconstrained(self):
        h = augment_weak_complete(-Z, RationalFunction.constant(1), 0, 1, ends=[])
        assert h == 1 / Z**3

    def test_hand_oracle(self):
        # only the z^2 term of g^2 meets 1/w^3, so the system is c1 = 0 (rank 1 < 2n - 2)
        g = Z + 1 / (Z - 1)
        aug = augmentation_system(g, 1, 2)
        assert aug.matrix == ((0, 0, 0, 0), (1, 0, 0, 0))
        assert aug.rank == 1 and not aug.independent
        h = augment_weak_complete(g, RationalFunction.constant(0), 1, 2)
        assert h.order_at(1) >= 3

    def test_strict_after_augmentation(self):
        g = Z + 1 / (Z - 1)
        sol = solve_factor(g, [1], augment="all")
        w = WeierstrassPair(g, sol.F)
        assert sol.F.order_at(1) > 0
        assert check_period(w, "strict").passed

    def test_forced_zero_end_gets_pole(self):
        # g is regular at 3 with g'(3) = 3/4, so Res_3(g a/(z-3)^2) = a g'(3) forces a = 0
        g = Z + 1 / (Z - 1)
        sol = solve_factor(g, [1, 3], augment="zero")
        assert sol.choice.a_zero == (2,)
        assert sol.F.order_at(3) > 0
        assert check_period(WeierstrassPair(g, sol.F), "strict").passed


class TestAssemble:
    def test_example(self, ref_pair):
        data = assemble_bicomplex(ref_pair, ref_pair)
        assert data.ends == ((0, 0),)

    def test_not_conjugate_symmetric(self, ref_pair):
        with pytest.raises(NotConjugateSymmetric):
            WeierstrassPair(I * Z, -1 / Z**2)
        with pytest.raises(NotConjugateSymmetric):
            assemble_bicomplex(WeierstrassPair.unchecked(I * Z, -1 / Z**2), ref_pair)

    def test_order_mismatch(self):
        w1 = WeierstrassPair(1 / Z**2, RationalFunction.constant(1))
        w2 = WeierstrassPair(1 / Z, RationalFunction.constant(1))
        with pytest.raises(OrderMismatch):
            assemble_bicomplex(w1, w2, ends=[(0, 0)])

    def test_period_violation(self, ref_pair):
        bad = WeierstrassPair.unchecked(-Z, I / Z**2)
        with pytest.raises((PeriodViolation, NotConjugateSymmetric)):
            assemble_bicomplex(bad, ref_pair)

    def test_violations_report(self):
        w = WeierstrassPair(RationalFunction.constant(2), RationalFunction.constant(1))
        assert any("constant" in v for v in w.violations())


def test_splitting_identity():
    """x1-part of a bicomplex loop integral equals half the sum of the factor real parts."""
    rng = np.random.default_rng(7)
    for _ in range(6):
        c = [GaussianRational(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))) for _ in range(3)]
        r = RationalFunction.pole_term(c[0], 0, 1) + RationalFunction.pole_term(c[1], 1, 2) + c[2] * Z
        c1 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        c2 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        rad1, rad2 = rng.uniform(1.8, 2.5), rng.uniform(0.2, 0.4)
        whole = bicomplex_loop_integral(r, r, c1, rad1, c2, rad2, n=256)
        parts = 0.5 * (split_loop_integral(r, c1, rad1, 256).real + split_loop_integral(r, c2, rad2, 256).real)
        assert abs(whole.x1 - parts) <= 1e-8
