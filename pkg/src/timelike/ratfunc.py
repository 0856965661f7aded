"""Exact rational functions over the Gaussian rationals.

Coefficients are :class:`~timelike.algebra.GaussianRational`; lists are in
ascending powers of ``z``.  Every :class:`RationalFunction` is kept in a
canonical form (numerator and denominator coprime, denominator monic), so
structural equality is mathematical equality.

Pole locations are found exactly when they are Gaussian rationals.  Other
poles raise :class:`IrrationalPole` in exact mode; ``exact=False`` switches
to a floating-point factorisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .algebra import GaussianRational, as_exact

__all__ = [
    "Polynomial",
    "RationalFunction",
    "PartialFractions",
    "INFINITY",
    "IrrationalPole",
    "DivisionByZeroFunction",
    "rat_arith",
    "residue_at",
    "residue_at_infinity",
    "partial_fractions",
    "is_conjugate_symmetric",
    "poles_with_orders",
    "laurent_coefficients",
]

ZERO = GaussianRational(0)
ONE = GaussianRational(1)


class IrrationalPole(ArithmeticError):
    """A denominator root is not a Gaussian rational."""


class DivisionByZeroFunction(ZeroDivisionError):
    """Division by the identically zero rational function."""


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
"""Sentinel for the point at infinity in pole lists."""


# ---------------------------------------------------------------------------
# list-level polynomial kernels (ascending coefficient lists)
# ---------------------------------------------------------------------------


def _trim(a: list) -> list:
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    del a[n:]
    return a


def _add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _trim(out)


def _sub(a, b):
    out = list(a) + [ZERO] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = out[i] - c
    return _trim(out)


def _scale(a, s):
    if not s:
        return []
    return [c * s for c in a]


def _mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(rem) - 1 < db:
        return [], _trim(rem)
    quot = [ZERO] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] / lead
        quot[k] = c
        if c:
            for j in range(db + 1):
                rem[k + j] = rem[k + j] - c * b[j]
    return _trim(quot), _trim(rem[:db])


def _exact_div(a, b):
    q, r = _divmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def _monic(a):
    if not a:
        return []
    lead = a[-1]
    if lead == ONE:
        return list(a)
    return [c / lead for c in a]


def _gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, _monic(r)
    return _monic(a) if a else []


def _deriv(a):
    return _trim([a[k] * k for k in range(1, len(a))])


def _eval(a, x):
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _synth_div(a, p):
    """Divide by ``(z - p)``; returns ``(quotient, remainder)``."""
    if not a:
        return [], ZERO
    n = len(a)
    q = [ZERO] * (n - 1)
    acc = a[-1]
    for k in range(n - 2, -1, -1):
        q[k] = acc
        acc = a[k] + acc * p
    return _trim(q), acc


def _multiplicity(a, p):
    """Return ``(m, q)`` with ``a = (z - p)**m * q`` and ``q(p) != 0``."""
    m = 0
    while len(a) > 1:
        q, r = _synth_div(a, p)
        if r:
            break
        a = q
        m += 1
    return m, a


def _shift(a, p):
    """Coefficients of ``a(p + t)`` in ``t``."""
    c = list(a)
    n = len(c)
    if not p:
        return c
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] = c[j] + p * c[j + 1]
    return c


def _series_div(num, den, n_terms):
    """First ``n_terms`` Taylor coefficients of ``num/den`` (``den[0] != 0``)."""
    d0 = den[0]
    out = []
    for i in range(n_terms):
        acc = num[i] if i < len(num) else ZERO
        for j in range(1, min(i, len(den) - 1) + 1):
            acc = acc - den[j] * out[i - j]
        out.append(acc / d0)
    return out


def _laurent(num, den, p, n_terms):
    """Order ``m`` of the pole at ``p`` and ``n_terms`` Laurent coefficients.

    ``coeffs[j]`` multiplies ``(z - p)**(j - m)``.  With ``m`` the pole
    order, ``coeffs[m - 1]`` is the ``(m-1)``-th Taylor coefficient of
    ``(z - p)**m * num/den`` at ``p``, i.e. the residue given by the
    ``(m-1)``-fold derivative formula.
    """
    m, q = _multiplicity(den, p)
    return m, _series_div(_shift(num, p), _shift(q, p), n_terms)


def _raw_residue(num, den, p):
    """Residue of ``num/den`` at ``p``; ``num/den`` need not be reduced."""
    if not num:
        return ZERO
    m, q = _multiplicity(den, p)
    if m == 0:
        return ZERO
    return _series_div(_shift(num, p), _shift(q, p), m)[m - 1]


def _coerce_coeffs(coeffs: Iterable) -> list:
    return _trim([as_exact(c) for c in coeffs])


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------


def _squarefree_decomposition(f):
    """Yun's algorithm: list of ``(a_i, i)`` with ``monic(f) = prod a_i**i``."""
    f = _monic(f)
    if len(f) <= 1:
        return []
    fp = _deriv(f)
    a0 = _gcd(f, fp)
    b = _exact_div(f, a0)
    c = _exact_div(fp, a0)
    d = _sub(c, _deriv(b))
    out = []
    i = 1
    while len(b) > 1:
        a = _gcd(b, d)
        b = _exact_div(b, a)
        c = _exact_div(d, a)
        d = _sub(c, _deriv(b))
        if len(a) > 1:
            out.append((a, i))
        i += 1
    return out


def _gaussian_integer_scale(a):
    den = 1
    for c in a:
        den = lcm(den, c.re.denominator, c.im.denominator)
    return [(int(c.re * den), int(c.im * den)) for c in a]


def _numeric_roots_mp(a, dps):
    import mpmath

    ints = _gaussian_integer_scale(a)
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpc(re, im) for re, im in reversed(ints)]
        steps = 100
        for _ in range(6):
            try:
                return mpmath.polyroots(coeffs, maxsteps=steps, extraprec=2 * dps), ints
            except mpmath.libmp.NoConvergence:
                steps *= 3
        raise ArithmeticError("root finder did not converge")


def _rationalize_mp(x, bound: int) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    value = Fraction(-int(man) if sign else int(man)) * (Fraction(2) ** int(exp))
    return value.limit_denominator(bound)


def _linear_root(a):
    return -a[0] / a[1]


def _exact_roots_squarefree(a):
    """Exact roots of a squarefree polynomial or raise :class:`IrrationalPole`."""
    if len(a) == 2:
        return [_linear_root(a)]
    ints = _gaussian_integer_scale(a)
    lr, li = ints[-1]
    bound = max(lr * lr + li * li, 1)
    dps = 2 * len(str(bound)) + 40
    roots, _ = _numeric_roots_mp(a, dps)
    import mpmath

    out = []
    with mpmath.workdps(dps):
        for r in roots:
            cand = GaussianRational(_rationalize_mp(mpmath.re(r), bound), _rationalize_mp(mpmath.im(r), bound))
            if _eval(a, cand):
                raise IrrationalPole(f"root near {complex(r)} is not a Gaussian rational")
            out.append(cand)
    return out


def _exact_roots(den):
    """All roots of ``den`` with multiplicities, exactly."""
    result = []
    for factor, mult in _squarefree_decomposition(den):
        for r in _exact_roots_squarefree(factor):
            result.append((r, mult))
    result.sort(key=lambda rm: (rm[0].re, rm[0].im))
    return result


def _numeric_roots(den, tol=1e-10):
    """Floating roots with multiplicities via exact squarefree splitting."""
    result = []
    for factor, mult in _squarefree_decomposition(den):
        c = np.array([complex(x) for x in reversed(factor)])
        for r in np.roots(c):
            r = complex(r)
            if abs(r.imag) <= tol * max(1.0, abs(r)):
                r = complex(r.real, 0.0)
            result.append((r, mult))
    result.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return result


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with exact Gaussian-rational coefficients (ascending)."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_coerce_coeffs(self.coeffs)))

    @classmethod
    def _wrap(cls, coeffs: list) -> Polynomial:
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", tuple(coeffs))
        return obj

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def __add__(self, other):
        return Polynomial._wrap(_add(list(self.coeffs), list(_as_poly(other).coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial._wrap(_sub(list(self.coeffs), list(_as_poly(other).coeffs)))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return Polynomial._wrap([-c for c in self.coeffs])

    def __mul__(self, other):
        return Polynomial._wrap(_mul(list(self.coeffs), list(_as_poly(other).coeffs)))

    __rmul__ = __mul__

    def __divmod__(self, other):
        q, r = _divmod(list(self.coeffs), list(_as_poly(other).coeffs))
        return Polynomial._wrap(q), Polynomial._wrap(r)

    def __call__(self, x):
        if isinstance(x, (GaussianRational, int, Fraction)):
            return _eval(self.coeffs, x)
        return np.polyval(self.complex_coeffs()[::-1], x)

    def complex_coeffs(self) -> np.ndarray:
        if not self.coeffs:
            return np.zeros(1, dtype=complex)
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def derivative(self) -> Polynomial:
        return Polynomial._wrap(_deriv(list(self.coeffs)))

    def integral(self) -> Polynomial:
        """Antiderivative with zero constant term."""
        if not self.coeffs:
            return self
        return Polynomial._wrap([ZERO] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def __repr__(self):
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"


def _as_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial._wrap(_trim([as_exact(x)]))


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Canonical quotient ``numerator / denominator`` of polynomials.

    The pole list is computed on first use and cached; it can raise
    :class:`IrrationalPole` for denominators with non-Gaussian-rational roots.
    """

    numerator: Polynomial
    denominator: Polynomial = Polynomial((1,))

    def __post_init__(self):
        num = list(self.numerator.coeffs)
        den = list(self.denominator.coeffs)
        if not den:
            raise DivisionByZeroFunction("denominator is identically zero")
        if not num:
            den = [ONE]
        else:
            g = _gcd(num, den)
            if len(g) > 1:
                num = _exact_div(num, g)
                den = _exact_div(den, g)
            lead = den[-1]
            if lead != ONE:
                num = [c / lead for c in num]
                den = [c / lead for c in den]
        object.__setattr__(self, "numerator", Polynomial._wrap(num))
        object.__setattr__(self, "denominator", Polynomial._wrap(den))

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_coeffs(cls, num: Sequence, den: Sequence = (1,)) -> RationalFunction:
        return cls(Polynomial(tuple(num)), Polynomial(tuple(den)))

    @classmethod
    def constant(cls, c) -> RationalFunction:
        return cls(_as_poly(c))

    @classmethod
    def variable(cls) -> RationalFunction:
        return cls.from_coeffs([0, 1])

    @classmethod
    def pole_term(cls, coeff, pole, order: int) -> RationalFunction:
        """``coeff / (z - pole)**order``."""
        base = [-as_exact(pole), ONE]
        den = [ONE]
        for _ in range(order):
            den = _mul(den, base)
        return cls(_as_poly(coeff), Polynomial._wrap(den))

    @classmethod
    def from_config(cls, spec) -> RationalFunction:
        """Parse ``{"num": [...], "den": [...]}`` (ascending powers).

        Entries may be ints, ``"p/q"`` strings, decimal floats or
        ``[re, im]`` pairs.  ``den`` defaults to ``[1]``.
        """
        if not isinstance(spec, dict) or "num" not in spec:
            raise ValueError(f"rational function needs a 'num' list, got {spec!r}")
        return cls.from_coeffs(spec["num"], spec.get("den", [1]))

    def to_config(self) -> dict:
        return {
            "num": [_render_coeff(c) for c in self.numerator.coeffs] or ["0"],
            "den": [_render_coeff(c) for c in self.denominator.coeffs],
        }

    # -- structure -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.constant(other)
            except TypeError:
                return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator.coeffs, self.denominator.coeffs))

    def __repr__(self):
        n = ", ".join(str(c) for c in self.numerator.coeffs) or "0"
        d = ", ".join(str(c) for c in self.denominator.coeffs)
        return f"RationalFunction(num=[{n}], den=[{d}])"

    # -- arithmetic --------------------------------------------------------
    def _parts(self):
        return list(self.numerator.coeffs), list(self.denominator.coeffs)

    def __add__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        a, b = self._parts()
        c, d = o._parts()
        if b == d:
            return RationalFunction(Polynomial._wrap(_add(a, c)), Polynomial._wrap(b))
        return RationalFunction(Polynomial._wrap(_add(_mul(a, d), _mul(c, b))), Polynomial._wrap(_mul(b, d)))

    __radd__ = __add__

    def __neg__(self):
        a, b = self._parts()
        return RationalFunction(Polynomial._wrap([-x for x in a]), Polynomial._wrap(b))

    def __sub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        a, b = self._parts()
        c, d = o._parts()
        return RationalFunction(Polynomial._wrap(_mul(a, c)), Polynomial._wrap(_mul(b, d)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        a, b = self._parts()
        c, d = o._parts()
        return RationalFunction(Polynomial._wrap(_mul(a, d)), Polynomial._wrap(_mul(b, c)))

    def __rtruediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return RationalFunction.constant(1) / (self ** (-n))
        a, b = self._parts()
        num, den = [ONE], [ONE]
        for _ in range(n):
            num, den = _mul(num, a), _mul(den, b)
        return RationalFunction(Polynomial._wrap(num), Polynomial._wrap(den))

    def derivative(self) -> RationalFunction:
        a, b = self._parts()
        num = _sub(_mul(_deriv(a), b), _mul(a, _deriv(b)))
        return RationalFunction(Polynomial._wrap(num), Polynomial._wrap(_mul(b, b)))

    def conjugate_coefficients(self) -> RationalFunction:
        """The function ``conj(r(conj(z)))``."""
        a, b = self._parts()
        return RationalFunction(Polynomial._wrap([c.conjugate() for c in a]), Polynomial._wrap([c.conjugate() for c in b]))

    # -- evaluation --------------------------------------------------------
    @cached_property
    def _complex_num(self) -> np.ndarray:
        return self.numerator.complex_coeffs()[::-1]

    @cached_property
    def _complex_den(self) -> np.ndarray:
        return self.denominator.complex_coeffs()[::-1]

    def __call__(self, z):
        """Evaluate exactly at exact points, in binary64 otherwise (arrays allowed)."""
        if isinstance(z, (GaussianRational, int, Fraction)):
            d = _eval(self.denominator.coeffs, z)
            if not d:
                raise ZeroDivisionError(f"{z} is a pole")
            return _eval(self.numerator.coeffs, z) / d
        return np.polyval(self._complex_num, z) / np.polyval(self._complex_den, z)

    # -- poles -------------------------------------------------------------
    @cached_property
    def poles(self) -> tuple:
        """Finite poles ``(location, order)`` with exact locations."""
        return tuple(_exact_roots(list(self.denominator.coeffs)))

    @property
    def order_at_infinity(self) -> int:
        """Pole order at infinity (0 when finite there)."""
        return max(0, self.numerator.degree - self.denominator.degree)

    def real_poles(self) -> list:
        return [p for p, _ in self.poles if p.is_real()]

    def order_at(self, p) -> int:
        """Pole order at ``p`` (0 if regular there)."""
        m, _ = _multiplicity(list(self.denominator.coeffs), as_exact(p))
        return m

    def laurent(self, p, n_terms: int) -> tuple:
        """``(m, coeffs)``: ``coeffs[j]`` multiplies ``(z - p)**(j - m)``."""
        a, b = self._parts()
        return _laurent(a, b, as_exact(p), n_terms)


def _render_coeff(c: GaussianRational):
    if c.is_real():
        return str(c.re)
    return [str(c.re), str(c.im)]


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction, GaussianRational)):
        return RationalFunction.constant(x)
    return None


@dataclass(frozen=True)
class PartialFractions:
    """``polynomial_part + sum(c / (z - pole)**m for pole, m, c in terms)``.

    In exact mode poles and coefficients are Gaussian rationals; the float
    fallback stores Python complex numbers and leaves ``polynomial_part``
    exact.
    """

    polynomial_part: Polynomial
    terms: tuple
    exact: bool = True

    def to_rational(self) -> RationalFunction:
        if not self.exact:
            raise TypeError("float partial fractions cannot be re-summed exactly")
        total = RationalFunction(self.polynomial_part)
        for pole, m, c in self.terms:
            total = total + RationalFunction.pole_term(c, pole, m)
        return total

    def __call__(self, z):
        val = self.polynomial_part(z)
        for pole, m, c in self.terms:
            val = val + c / (z - pole) ** m
        return val


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def rat_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Apply ``op`` in ``{"add", "sub", "mul", "div"}`` exactly."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def residue_at(r: RationalFunction, p) -> GaussianRational:
    """Coefficient of ``(z - p)**-1`` in the Laurent expansion of ``r`` at ``p``."""
    num, den = r._parts()
    return _raw_residue(num, den, as_exact(p))


def residue_at_infinity(r: RationalFunction) -> GaussianRational:
    """``-Res_{w=0} r(1/w) / w**2``."""
    if r.is_zero():
        return ZERO
    num, den = r._parts()
    dn, dd = len(num) - 1, len(den) - 1
    nrev, drev = num[::-1], den[::-1]
    shift = dd - dn - 2
    if shift >= 0:
        nrev = [ZERO] * shift + nrev
    else:
        drev = [ZERO] * (-shift) + drev
    return -_raw_residue(nrev, drev, ZERO)


def laurent_coefficients(r: RationalFunction, p, n_terms: int) -> tuple:
    """Alias of :meth:`RationalFunction.laurent`."""
    return r.laurent(p, n_terms)


def partial_fractions(r: RationalFunction, exact: bool = True) -> PartialFractions:
    num, den = r._parts()
    quot, _ = _divmod(num, den)
    terms = []
    if exact:
        for pole, m in r.poles:
            _, coeffs = _laurent(num, den, pole, m)
            for j, c in enumerate(coeffs):
                if c:
                    terms.append((pole, m - j, c))
        return PartialFractions(Polynomial._wrap(quot), tuple(terms), True)
    for pole, m in _numeric_roots(den):
        coeffs = _numeric_principal_part(r, pole, m)
        for j, c in enumerate(coeffs):
            terms.append((pole, m - j, c))
    return PartialFractions(Polynomial._wrap(quot), tuple(terms), False)


def _numeric_principal_part(r: RationalFunction, pole: complex, m: int) -> list:
    """Principal-part coefficients at a numerically located pole.

    The cofactor ``den / (z - pole)**m`` is rebuilt from the remaining
    numeric roots so that no inexact polynomial division is needed.
    """
    den_roots = _numeric_roots(list(r.denominator.coeffs))
    lead = complex(r.denominator.coeffs[-1])
    q = np.array([lead], dtype=complex)  # ascending in t = z - pole
    for root, mult in den_roots:
        if abs(root - pole) <= 1e-10 * max(1.0, abs(pole)):
            continue
        for _ in range(mult):
            q = np.convolve(q, np.array([pole - root, 1.0], dtype=complex))
    n = r.numerator.complex_coeffs()
    shifted = _shift_complex(n, pole)
    out = []
    for i in range(m):
        acc = shifted[i] if i < len(shifted) else 0.0
        for j in range(1, min(i, len(q) - 1) + 1):
            acc -= q[j] * out[i - j]
        out.append(complex(acc / q[0]))
    return out


def _shift_complex(a: np.ndarray, p: complex) -> np.ndarray:
    c = np.array(a, dtype=complex)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += p * c[j + 1]
    return c


def is_conjugate_symmetric(r: RationalFunction) -> bool:
    """True iff ``r(conj(z)) == conj(r(z))``; for canonical forms this means real coefficients."""
    return r.numerator.is_real() and r.denominator.is_real()


def poles_with_orders(r: RationalFunction, exact: bool = True) -> list:
    """Distinct poles with orders, including ``(INFINITY, k)`` when ``k > 0``."""
    if exact:
        out = list(r.poles)
    else:
        out = _numeric_roots(list(r.denominator.coeffs))
    if r.order_at_infinity:
        out.append((INFINITY, r.order_at_infinity))
    return out
