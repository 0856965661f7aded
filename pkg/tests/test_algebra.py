from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timelike.algebra import (
    E,
    E_DAGGER,
    I,
    J,
    K,
    ONE,
    BicomplexNumber,
    GaussianRational,
    IdempotentPair,
    NotInSplitPlane,
    SplitComplexNumber,
    from_idempotent,
    is_zero_divisor,
    split_norm_sq,
    split_restrict,
    star,
    to_idempotent,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
bicomplex = st.builds(BicomplexNumber, fractions, fractions, fractions, fractions)
split = st.builds(SplitComplexNumber, fractions, fractions)


def pair(b1, b2):
    return IdempotentPair(GaussianRational(*b1), GaussianRational(*b2))


class TestIdempotent:
    def test_k(self):
        p = to_idempotent(K)
        assert (p.beta1, p.beta2) == (1, -1)

    def test_e(self):
        p = to_idempotent(E)
        assert (p.beta1, p.beta2) == (1, 0)

    def test_one_plus_j(self):
        p = to_idempotent(ONE + J)
        assert p.beta1 == GaussianRational(1, -1)
        assert p.beta2 == GaussianRational(1, 1)

    @pytest.mark.parametrize(
        "b1, b2, expected",
        [((1, 0), (-1, 0), K), ((1, 0), (1, 0), ONE), ((2, 0), (0, 0), ONE + K)],
    )
    def test_from_idempotent(self, b1, b2, expected):
        assert from_idempotent(pair(b1, b2)) == expected

    @given(bicomplex)
    def test_round_trip(self, z):
        assert from_idempotent(to_idempotent(z)) == z

    @given(bicomplex, bicomplex)
    def test_multiplicative(self, z, w):
        assert to_idempotent(z * w) == to_idempotent(z) * to_idempotent(w)

    def test_split_plane_characterisation(self):
        assert to_idempotent(BicomplexNumber(2, 0, 0, 3)).in_split_plane()
        assert not to_idempotent(BicomplexNumber(2, 1, 0, 3)).in_split_plane()


class TestStar:
    def test_i(self):
        assert star(I) == -I

    def test_k(self):
        assert star(K) == K

    def test_j(self):
        # conj(z1) - j conj(z2) with z1 = 0, z2 = 1 gives -j
        assert star(J) == -J

    @given(bicomplex)
    def test_conjugates_both_components(self, z):
        p, q = to_idempotent(z), to_idempotent(star(z))
        assert q.beta1 == p.beta1.conjugate() and q.beta2 == p.beta2.conjugate()

    @given(bicomplex, bicomplex)
    def test_multiplicative_involution(self, z, w):
        assert star(star(z)) == z
        assert star(z * w) == star(z) * star(w)


class TestZeroDivisors:
    @pytest.mark.parametrize("z, expected", [(E, True), (BicomplexNumber(0), False), (ONE + K, True), (ONE, False)])
    def test_examples(self, z, expected):
        assert is_zero_divisor(z) is expected

    @given(bicomplex)
    def test_one_component_vanishes(self, z):
        p = to_idempotent(z)
        exactly_one = (p.beta1 == 0) != (p.beta2 == 0)
        assert is_zero_divisor(z) == exactly_one

    def test_idempotent_identities(self):
        assert (E * E_DAGGER).is_zero()
        assert E * E == E and E_DAGGER * E_DAGGER == E_DAGGER
        assert E + E_DAGGER == ONE and E - E_DAGGER == K


class TestSplit:
    def test_restrict(self):
        s = split_restrict(BicomplexNumber(2, 0, 0, 3))
        assert (s.x, s.y) == (2, 3)
        s = split_restrict(E)
        assert (s.x, s.y) == (Fraction(1, 2), Fraction(1, 2))

    def test_restrict_rejects(self):
        with pytest.raises(NotInSplitPlane):
            split_restrict(ONE + I)

    def test_restrict_float_tolerance(self):
        s = split_restrict(BicomplexNumber(1.0, 1e-14, 0.0, 2.0))
        assert s.y == 2.0
        with pytest.raises(NotInSplitPlane):
            split_restrict(BicomplexNumber(1.0, 1e-9, 0.0, 2.0))

    @pytest.mark.parametrize("x, y, n", [(2, 1, 3), (1, 1, 0), (1, 2, -3)])
    def test_norm(self, x, y, n):
        assert split_norm_sq(SplitComplexNumber(x, y)) == n

    @given(split, split)
    def test_norm_multiplicative(self, a, b):
        assert split_norm_sq(a * b) == split_norm_sq(a) * split_norm_sq(b)

    @given(split)
    def test_zero_divisor(self, a):
        assert a.is_zero_divisor() == ((a.x != 0 or a.y != 0) and a.x**2 == a.y**2)


class TestRing:
    @settings(max_examples=200)
    @given(bicomplex, bicomplex, bicomplex)
    def test_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a + b == b + a

    def test_units(self):
        assert I * I == -ONE and J * J == -ONE and K * K == ONE and I * J == K

    @given(bicomplex)
    def test_division(self, z):
        if z.is_zero() or is_zero_divisor(z):
            return
        assert (ONE / z) * z == ONE

    def test_division_by_zero_divisor(self):
        with pytest.raises(ZeroDivisionError):
            ONE / E

    def test_float_mode(self):
        z = BicomplexNumber(1.5, 0, 0, 0)
        assert isinstance(z.x2, float)
        assert (z * z).x1 == 2.25
