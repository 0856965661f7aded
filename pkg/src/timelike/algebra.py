"""Bicomplex and split-complex arithmetic.

Two scalar backends are supported and never mixed inside one value:
exact (``fractions.Fraction``, with :class:`GaussianRational` for complex
scalars) and binary64 (``float`` / ``complex``).

The bicomplex basis is ``{1, i, j, k}`` with ``i**2 == j**2 == -1``,
``k = i*j`` and ``k**2 == 1``.  Writing ``z = z1 + j*z2`` with
``z1 = x1 + i*x2`` and ``z2 = x3 + i*x4`` gives the idempotent form
``z = beta1*e + beta2*e_dagger`` where ``e = (1 + k)/2``,
``e_dagger = (1 - k)/2``, ``beta1 = z1 - i*z2`` and ``beta2 = z1 + i*z2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "GaussianRational",
    "BicomplexNumber",
    "SplitComplexNumber",
    "IdempotentPair",
    "NotInSplitPlane",
    "to_idempotent",
    "from_idempotent",
    "star",
    "is_zero_divisor",
    "split_restrict",
    "split_norm_sq",
    "as_exact",
    "ONE",
    "I",
    "J",
    "K",
    "E",
    "E_DAGGER",
]


class NotInSplitPlane(ValueError):
    """Raised when a bicomplex number has non-negligible i or j parts."""


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts.

    Instances are immutable and hash like the equal ``Fraction`` when the
    imaginary part vanishes, so real Gaussian rationals can be mixed freely
    with ``int`` and ``Fraction`` in sets and dict keys.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part given twice")
            re, im = re.re, re.im
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussianRational._raw(a * c, _ZERO)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        c, d = o.re, o.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational._raw(self.re / c, self.im / c)
        n = c * c + d * d
        a, b = self.re, self.im
        return GaussianRational._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE_Q / (self ** (-n))
        result = ONE_Q
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def is_real(self) -> bool:
        return not self.im

    # -- comparison / conversion -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, complex):
            return complex(self) == other
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_ZERO = Fraction(0)
ONE_Q = GaussianRational._raw(Fraction(1), _ZERO)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return GaussianRational._raw(Fraction(x), _ZERO)
    return None


def as_exact(x) -> GaussianRational:
    """Convert ints, Fractions, ``"p/q"`` strings, ``[re, im]`` pairs or
    Gaussian rationals to a :class:`GaussianRational`.

    Floats are accepted through their shortest decimal representation, so
    ``0.1`` becomes ``1/10`` rather than its binary expansion.
    """
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex entries must be [re, im] pairs, got {x!r}")
        return GaussianRational(_scalar_from_config(x[0]), _scalar_from_config(x[1]))
    if isinstance(x, complex):
        return GaussianRational(Fraction(repr(x.real)), Fraction(repr(x.imag)))
    return GaussianRational(_scalar_from_config(x))


def _scalar_from_config(x) -> Fraction:
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, float):
        return Fraction(repr(x))
    return _frac(x)


Scalar = Union[Fraction, float]


def _homogeneous(values):
    if any(isinstance(v, float) for v in values):
        return tuple(float(v) for v in values)
    return tuple(_frac(v) for v in values)


@dataclass(frozen=True)
class BicomplexNumber:
    """``x1 + i*x2 + j*x3 + k*x4`` with homogeneous scalar type."""

    x1: Scalar
    x2: Scalar = 0
    x3: Scalar = 0
    x4: Scalar = 0

    def __post_init__(self):
        vals = _homogeneous((self.x1, self.x2, self.x3, self.x4))
        for name, v in zip(("x1", "x2", "x3", "x4"), vals):
            object.__setattr__(self, name, v)

    @property
    def exact(self) -> bool:
        return isinstance(self.x1, Fraction)

    @property
    def z1(self):
        """First complex coordinate ``x1 + i*x2``."""
        return _cplx(self.x1, self.x2)

    @property
    def z2(self):
        """Second complex coordinate ``x3 + i*x4``."""
        return _cplx(self.x3, self.x4)

    @classmethod
    def from_complex_pair(cls, z1, z2) -> BicomplexNumber:
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    def _other(self, other):
        if isinstance(other, BicomplexNumber):
            return other
        if isinstance(other, SplitComplexNumber):
            return other.to_bicomplex()
        if isinstance(other, (int, float, Fraction)):
            return BicomplexNumber(other, 0, 0, 0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return BicomplexNumber(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return BicomplexNumber(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return BicomplexNumber(-self.x1, -self.x2, -self.x3, -self.x4)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        # (z1 + j z2)(w1 + j w2) = z1 w1 - z2 w2 + j (z1 w2 + z2 w1)
        z1, z2, w1, w2 = self.z1, self.z2, o.z1, o.z2
        return BicomplexNumber.from_complex_pair(z1 * w1 - z2 * w2, z1 * w2 + z2 * w1)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        p, q = to_idempotent(self), to_idempotent(o)
        if not q.beta1 or not q.beta2:
            raise ZeroDivisionError("division by a zero divisor")
        return from_idempotent(IdempotentPair(p.beta1 / q.beta1, p.beta2 / q.beta2))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        p = to_idempotent(self)
        return from_idempotent(IdempotentPair(p.beta1**n, p.beta2**n))

    def is_zero(self) -> bool:
        return not (self.x1 or self.x2 or self.x3 or self.x4)

    def to_float(self) -> BicomplexNumber:
        return BicomplexNumber(float(self.x1), float(self.x2), float(self.x3), float(self.x4))


def _cplx(re, im):
    if isinstance(re, Fraction):
        return GaussianRational._raw(re, im)
    return complex(re, im)


@dataclass(frozen=True)
class SplitComplexNumber:
    """``x + k*y`` in the split-complex plane."""

    x: Scalar
    y: Scalar = 0

    def __post_init__(self):
        x, y = _homogeneous((self.x, self.y))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def _other(self, other):
        if isinstance(other, SplitComplexNumber):
            return other
        if isinstance(other, (int, float, Fraction)):
            return SplitComplexNumber(other, 0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return SplitComplexNumber(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return SplitComplexNumber(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return SplitComplexNumber(-self.x, -self.y)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return SplitComplexNumber(self.x * o.x + self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        n = split_norm_sq(o)
        if not n:
            raise ZeroDivisionError("division by a zero divisor of the split-complex plane")
        num = self * o.conjugate()
        return SplitComplexNumber(num.x / n, num.y / n)

    def conjugate(self) -> SplitComplexNumber:
        return SplitComplexNumber(self.x, -self.y)

    @property
    def real(self):
        return self.x

    @property
    def imag(self):
        return self.y

    def is_zero_divisor(self) -> bool:
        return bool(self.x or self.y) and self.x * self.x == self.y * self.y

    def idempotent(self) -> tuple:
        """Real components ``(x + y, x - y)`` along ``e`` and ``e_dagger``."""
        return self.x + self.y, self.x - self.y

    @classmethod
    def from_idempotent(cls, a, b) -> SplitComplexNumber:
        two = 2.0 if isinstance(a, float) or isinstance(b, float) else Fraction(2)
        return cls((a + b) / two, (a - b) / two)

    def to_bicomplex(self) -> BicomplexNumber:
        zero = 0.0 if isinstance(self.x, float) else Fraction(0)
        return BicomplexNumber(self.x, zero, zero, self.y)


@dataclass(frozen=True)
class IdempotentPair:
    """Coordinates ``(beta1, beta2)`` along ``e`` and ``e_dagger``."""

    beta1: object
    beta2: object

    def __mul__(self, other):
        if not isinstance(other, IdempotentPair):
            return NotImplemented
        return IdempotentPair(self.beta1 * other.beta1, self.beta2 * other.beta2)

    def __add__(self, other):
        if not isinstance(other, IdempotentPair):
            return NotImplemented
        return IdempotentPair(self.beta1 + other.beta1, self.beta2 + other.beta2)

    def in_split_plane(self) -> bool:
        """True iff both components are real, i.e. the element lies in the split plane."""
        return self.beta1.imag == 0 and self.beta2.imag == 0


def to_idempotent(z: BicomplexNumber) -> IdempotentPair:
    b1 = _cplx(z.x1 + z.x4, z.x2 - z.x3)
    b2 = _cplx(z.x1 - z.x4, z.x2 + z.x3)
    return IdempotentPair(b1, b2)


def from_idempotent(p: IdempotentPair) -> BicomplexNumber:
    b1, b2 = p.beta1, p.beta2
    if isinstance(b1, (int, Fraction)):
        b1 = GaussianRational(b1)
    if isinstance(b2, (int, Fraction)):
        b2 = GaussianRational(b2)
    exact = isinstance(b1, GaussianRational) and isinstance(b2, GaussianRational)
    half = Fraction(1, 2) if exact else 0.5
    if not exact:
        b1, b2 = complex(b1), complex(b2)
    # z1 = (b1 + b2)/2, z2 = i (b1 - b2)/2
    return BicomplexNumber(
        (b1.real + b2.real) * half,
        (b1.imag + b2.imag) * half,
        (b2.imag - b1.imag) * half,
        (b1.real - b2.real) * half,
    )


def star(z: BicomplexNumber) -> BicomplexNumber:
    """Bicomplex conjugate ``conj(z1) - j*conj(z2)``.

    Equivalent to conjugating both idempotent components.
    """
    return BicomplexNumber(z.x1, -z.x2, -z.x3, z.x4)


def is_zero_divisor(z: BicomplexNumber) -> bool:
    if z.is_zero():
        return False
    s = z.z1 * z.z1 + z.z2 * z.z2
    return s == 0


def split_restrict(z: BicomplexNumber, tol: float | None = None) -> SplitComplexNumber:
    """Restrict ``z`` to the split plane, returning ``x1 + k*x4``.

    ``tol`` defaults to 0 for exact values and 1e-12 for floats.
    """
    if tol is None:
        tol = 0 if z.exact else 1e-12
    if abs(z.x2) > tol or abs(z.x3) > tol:
        raise NotInSplitPlane(f"i/j parts ({z.x2}, {z.x3}) exceed tolerance {tol}")
    return SplitComplexNumber(z.x1, z.x4)


def split_norm_sq(w: SplitComplexNumber):
    """Indefinite square norm ``x**2 - y**2`` (may be negative or zero)."""
    return w.x * w.x - w.y * w.y


ONE = BicomplexNumber(1, 0, 0, 0)
I = BicomplexNumber(0, 1, 0, 0)
J = BicomplexNumber(0, 0, 1, 0)
K = BicomplexNumber(0, 0, 0, 1)
E = BicomplexNumber(Fraction(1, 2), 0, 0, Fraction(1, 2))
E_DAGGER = BicomplexNumber(Fraction(1, 2), 0, 0, Fraction(-1, 2))
