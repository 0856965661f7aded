import math
import random
from fractions import Fraction

import numpy as np
import pytest

from timelike.algebra import GaussianRational
from timelike.period import WeierstrassPair, assemble_bicomplex
from timelike.ratfunc import RationalFunction
from timelike.surface import (
    ComplexResidue,
    LightConeHit,
    PoleHit,
    antiderivative,
    build_surface,
    default_base_point,
    eval_maximal,
    eval_real_part,
    eval_timelike,
    eval_timelike_grid,
    metrics_at,
)
from timelike.verify import reference_closed_form, fd_convergence, path_oracle

from conftest import Z


def random_real_residue_rational(rng):
    r = RationalFunction.from_coeffs([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))])
    poles = rng.sample(range(-4, 5), rng.randint(1, 3))
    for p in poles:
        for k in range(1, rng.randint(1, 3) + 1):
            r = r + RationalFunction.pole_term(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), p, k)
    return r, poles


class TestAntiderivative:
    def test_log(self, z):
        c = antiderivative(2 / z)
        assert c.rational_part.is_zero()
        assert c.log_terms == ((GaussianRational(0), Fraction(2)),)

    def test_rational(self, z):
        c = antiderivative(-1 / z**2 + 1)
        assert c.rational_part == 1 / z + z and c.log_terms == ()

    def test_polynomial(self):
        assert antiderivative(RationalFunction.constant(1)).rational_part == Z

    def test_complex_residue(self, z):
        with pytest.raises(ComplexResidue):
            antiderivative(GaussianRational(0, 1) / z)

    def test_exact_derivative(self):
        rng = random.Random(4)
        for _ in range(25):
            r, _ = random_real_residue_rational(rng)
            assert antiderivative(r).derivative() == r


class TestEvalRealPart:
    def test_log(self, z):
        assert eval_real_part(antiderivative(2 / z), 3, 1) == pytest.approx(2 * math.log(3), abs=1e-14)

    def test_same_point(self, z):
        assert eval_real_part(antiderivative(2 / z + z), 1.5, 1.5) == 0

    def test_polynomial(self):
        assert eval_real_part(antiderivative(RationalFunction.constant(1)), 2 + 1j, 0) == pytest.approx(2)

    def test_pole_hit(self, z):
        with pytest.raises(PoleHit):
            eval_real_part(antiderivative(1 / z**2), 0.0, 1.0)

    def test_path_independence(self):
        rng = random.Random(9)
        for _ in range(10):
            r, poles = random_real_residue_rational(rng)
            c = antiderivative(r)
            res = path_oracle(r, c, max(poles) + 0.5, min(poles) - 0.5)
            assert res.max_error <= 1e-8 * max(1.0, abs(res.closed_form))


class TestSurface:
    def test_maximal_closed_form(self, ref_data):
        m = build_surface(ref_data, base="raw")
        for a in (0.3, -1.7, 2.5):
            want = [1 / a + a, math.log(a * a), 1 / a - a]
            assert np.allclose(eval_maximal(m, 1, a), want, atol=1e-13)

    def test_maximal_base_point(self, ref_data):
        m = build_surface(ref_data, base=(1, 1))
        assert np.allclose(eval_maximal(m, 1, 1.0), 0, atol=1e-15)
        assert np.allclose(eval_maximal(m, 1, 2.0), [0.5, math.log(4), -1.5], atol=1e-14)

    def test_timelike_example(self, ref_data):
        m = build_surface(ref_data, base="raw")
        assert np.allclose(eval_timelike(m, 2, 1), [8 / 3, math.log(3), -4 / 3], atol=1e-14)
        assert np.allclose(eval_timelike(m, 1, 0), [2, 0, 0], atol=1e-14)

    def test_light_cone(self, ref_data):
        m = build_surface(ref_data, base="raw")
        with pytest.raises(LightConeHit):
            eval_timelike(m, 1, 1)
        with pytest.raises(LightConeHit):
            eval_timelike(m, 1.0, 1.03)

    def test_base_normalisation(self, ref_data):
        m = build_surface(ref_data)
        assert m.base1 == 1 and m.base2 == 1
        x1, x4 = m.base_point
        assert np.all(np.abs(eval_timelike(m, x1, x4)) <= 1e-14)

    def test_default_base_point(self):
        assert default_base_point([]) == 0
        assert default_base_point([2.0]) == 3.0
        assert default_base_point([-3.0, -1.0, 4.0]) == 1.5

    def test_golden_grid(self, ref_data):
        m = build_surface(ref_data, base="raw")
        xs = np.linspace(-3, 3, 50)
        X1, X4 = np.meshgrid(xs, xs, indexing="ij")
        vals, ok = eval_timelike_grid(m, X1, X4)
        assert ok.sum() > 2000 and np.isnan(vals[~ok]).all()
        assert np.max(np.abs(vals[ok] - reference_closed_form(X1[ok], X4[ok]))) <= 1e-9

    def test_finite_difference_order(self, ref_data):
        m = build_surface(ref_data, base="raw")
        r1, r2, ratios = fd_convergence(m, ((-3, 3), (-3, 3)), 30, 1e-3)
        assert 3 <= ratios["conformality"] <= 5
        assert 3 <= ratios["orthogonality"] <= 5
        assert r1.max_relative_conformality <= 1e-3
        assert r1.max_wave <= 1e-6


class TestMetrics:
    def test_example(self, ref_pair, ref_data):
        m = build_surface(ref_data, base="raw")
        s = metrics_at(m, ref_pair, ref_pair, 2, 1)
        assert s.g_split_norm_sq == pytest.approx(3)
        assert s.f_split_norm_sq == pytest.approx(1 / 9)
        # Im ghat = (g1 - g2)/2 = -1
        assert s.h_hat == pytest.approx(-4 / 9)
        assert s.h_E3 == pytest.approx(2 * 16 / 9)
        assert s.h1 == 0 and s.h2 == 0

    def test_degenerate_on_singular_set(self, ref_pair, ref_data):
        m = build_surface(ref_data, base="raw")
        for x1 in (-2.0, 0.7, 2.9):
            assert metrics_at(m, ref_pair, ref_pair, x1, 0.0).h_hat == 0

    def test_flat(self):
        w = WeierstrassPair(RationalFunction.constant(0), RationalFunction.constant(1))
        data = assemble_bicomplex(w, w)
        m = build_surface(data)
        for x1, x4 in ((0.1, 0.2), (-2, 1.5)):
            assert metrics_at(m, w, w, x1, x4).h_E3 == 2
