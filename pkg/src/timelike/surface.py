"""Closed-form evaluation of maximal factors and the timelike surface.

Each alpha component is integrated exactly: partial fractions give a
rational antiderivative plus ``c * log(z - p)`` terms whose real parts are
``c * ln|z - p|`` once every residue ``c`` is real.  The timelike surface is

    Xhat(x1, x4) = 1/2 * (X_1(x1 + x4) + X_2(x1 - x4))

where ``X_k`` is the real part of the integral of factor ``k``'s alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import GaussianRational, as_exact
from .period import BicomplexWeierstrass, WeierstrassPair, build_alpha, light_cone_poles
from .ratfunc import Polynomial, RationalFunction, partial_fractions

__all__ = [
    "ComplexResidue",
    "PoleHit",
    "LightConeHit",
    "ClosedFormIntegral",
    "SurfaceModel",
    "MetricSample",
    "antiderivative",
    "eval_real_part",
    "build_surface",
    "default_base_point",
    "eval_maximal",
    "eval_timelike",
    "eval_timelike_grid",
    "metrics_at",
]

POLE_TOL = 1e-13


class ComplexResidue(ValueError):
    """A simple-pole residue is not real, so the real part would be multivalued."""


class PoleHit(ValueError):
    pass


class LightConeHit(ValueError):
    pass


@dataclass(frozen=True)
class ClosedFormIntegral:
    """``rational_part(z) + sum c * log(z - p)``, with every ``c`` real."""

    rational_part: RationalFunction
    log_terms: tuple = ()

    def __post_init__(self):
        for _, c in self.log_terms:
            if not as_exact(c).is_real():
                raise ComplexResidue(f"log coefficient {c} is not real")

    def derivative(self) -> RationalFunction:
        out = self.rational_part.derivative()
        for p, c in self.log_terms:
            out = out + RationalFunction.pole_term(c, p, 1)
        return out

    @property
    def singular_points(self) -> np.ndarray:
        pts = [complex(p) for p, _ in self.rational_part.poles]
        pts += [complex(p) for p, _ in self.log_terms]
        return np.array(sorted(set(pts), key=lambda c: (c.real, c.imag)), dtype=complex)

    def real_value(self, z) -> np.ndarray:
        """``Re`` of the antiderivative (no base point), vectorised over ``z``."""
        z = np.asarray(z, dtype=complex)
        pts = self.singular_points
        if pts.size:
            dist = np.min(np.abs(z[..., None] - pts), axis=-1)
            if np.any(dist < POLE_TOL):
                raise PoleHit(f"evaluation point within {POLE_TOL} of a pole")
        val = np.real(self.rational_part(z)) if not self.rational_part.is_zero() else np.zeros(z.shape)
        for p, c in self.log_terms:
            val = val + float(as_exact(c).re) * np.log(np.abs(z - complex(p)))
        return val


def antiderivative(r: RationalFunction) -> ClosedFormIntegral:
    """Exact antiderivative of ``r`` split into rational and real-log parts."""
    pf = partial_fractions(r, exact=True)
    rational = RationalFunction(pf.polynomial_part.integral())
    logs = []
    for pole, order, coeff in pf.terms:
        if order == 1:
            if not coeff.is_real():
                raise ComplexResidue(f"residue {coeff} at {pole} is not real")
            logs.append((pole, coeff.re))
        else:
            rational = rational + RationalFunction.pole_term(coeff / (1 - order), pole, order - 1)
    logs.sort(key=lambda t: (t[0].re, t[0].im))
    return ClosedFormIntegral(rational, tuple(logs))


def eval_real_part(c: ClosedFormIntegral, z, z0) -> np.ndarray:
    """``Re`` of the integral of ``c``'s integrand from ``z0`` to ``z``."""
    return c.real_value(z) - c.real_value(z0)


# ---------------------------------------------------------------------------
# surface model
# ---------------------------------------------------------------------------


def default_base_point(poles: Sequence[float]) -> float:
    """Midpoint of the largest bounded pole-free interval.

    With a single pole ``p`` the base point is ``p + 1``; with no real
    poles it is ``0``.
    """
    pts = sorted(set(poles))
    if not pts:
        return 0.0
    if len(pts) == 1:
        return pts[0] + 1.0
    gaps = [(b - a, i) for i, (a, b) in enumerate(zip(pts, pts[1:]))]
    width, i = max(gaps, key=lambda t: (t[0], -t[1]))
    return 0.5 * (pts[i] + pts[i + 1])


@dataclass(frozen=True)
class SurfaceModel:
    """Integrated components of both factors and their base points.

    ``components[k][f]`` is the integral of alpha component ``k`` of
    factor ``f + 1``.  A base point of ``None`` means the raw
    antiderivative is used with no constant subtracted.
    """

    components: tuple
    base1: complex | None
    base2: complex | None
    end_list: tuple
    data: BicomplexWeierstrass
    delta: float = 0.05
    lines1: tuple = ()
    """Real values ``p`` whose lines ``x1 + x4 = p`` are removed."""
    lines2: tuple = ()
    """Real values ``q`` whose lines ``x1 - x4 = q`` are removed."""
    _offsets: tuple = field(default=(), repr=False)

    @property
    def base_point(self) -> tuple | None:
        """``(x1, x4)`` of the split-complex base point, when both bases are real."""
        if self.base1 is None or self.base2 is None:
            return None
        b1, b2 = complex(self.base1), complex(self.base2)
        if b1.imag or b2.imag:
            return None
        return (0.5 * (b1.real + b2.real), 0.5 * (b1.real - b2.real))

    def lines(self, factor: int) -> tuple:
        return self.lines1 if factor == 1 else self.lines2


def _parse_base(base, poles: Sequence[float]):
    if base is None or base == "raw":
        return None
    if base == "auto":
        return complex(default_base_point(poles))
    if isinstance(base, GaussianRational):
        return complex(base)
    if isinstance(base, (str, Fraction)):
        return complex(as_exact(base))
    return complex(base)


def build_surface(data: BicomplexWeierstrass, base="auto", delta: float = 0.05) -> SurfaceModel:
    """Integrate both factors.

    ``base`` is ``"auto"`` (pole-free midpoint per factor), ``"raw"`` (no
    constant subtracted) or a pair ``(b1, b2)`` whose entries may be
    numbers, ``"p/q"`` strings, ``"raw"`` or ``"auto"``.
    """
    if delta <= 0:
        raise ValueError("exclusion band delta must be positive")
    lines = (tuple(light_cone_poles(data.factor1)), tuple(light_cone_poles(data.factor2)))
    if isinstance(base, (tuple, list)):
        b1, b2 = base
    else:
        b1 = b2 = base
    bases = (_parse_base(b1, lines[0]), _parse_base(b2, lines[1]))
    comps = []
    alphas = (build_alpha(data.factor1), build_alpha(data.factor2))
    for k in range(3):
        comps.append(tuple(antiderivative(alphas[f][k]) for f in range(2)))
    comps = tuple(comps)
    offsets = []
    for f in range(2):
        if bases[f] is None:
            offsets.append(np.zeros(3))
        else:
            offsets.append(np.array([float(comps[k][f].real_value(bases[f])) for k in range(3)]))
    return SurfaceModel(comps, bases[0], bases[1], data.ends, data, float(delta), lines[0], lines[1], tuple(offsets))


def eval_maximal(m: SurfaceModel, factor: int, z) -> np.ndarray:
    """``(Re int alpha^1, Re int alpha^2, Re int alpha^3)`` for one factor.

    ``z`` may be an array; the result has a trailing axis of length 3.
    """
    if factor not in (1, 2):
        raise ValueError("factor must be 1 or 2")
    f = factor - 1
    vals = [m.components[k][f].real_value(z) - m._offsets[f][k] for k in range(3)]
    return np.stack(vals, axis=-1)


def _band_mask(m: SurfaceModel, x1, x4) -> np.ndarray:
    s = np.asarray(x1, dtype=float) + np.asarray(x4, dtype=float)
    d = np.asarray(x1, dtype=float) - np.asarray(x4, dtype=float)
    bad = np.zeros(np.broadcast(s, d).shape, dtype=bool)
    for p in m.lines1:
        bad |= np.abs(s - p) < m.delta
    for q in m.lines2:
        bad |= np.abs(d - q) < m.delta
    return bad


def eval_timelike(m: SurfaceModel, x1: float, x4: float) -> np.ndarray:
    """``Xhat(x1 + k x4)``; raises :class:`LightConeHit` inside an exclusion band."""
    if np.any(_band_mask(m, x1, x4)):
        raise LightConeHit(f"({x1}, {x4}) lies within {m.delta} of a light-cone line")
    return _eval_unchecked(m, x1, x4)


def _eval_unchecked(m: SurfaceModel, x1, x4) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    x4 = np.asarray(x4, dtype=float)
    return 0.5 * (eval_maximal(m, 1, x1 + x4 + 0j) + eval_maximal(m, 2, x1 - x4 + 0j))


def eval_timelike_grid(m: SurfaceModel, x1: np.ndarray, x4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate on arrays; returns ``(values, valid)`` with NaN where excluded."""
    x1, x4 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x4, dtype=float))
    valid = ~_band_mask(m, x1, x4)
    out = np.full(x1.shape + (3,), np.nan)
    if valid.any():
        out[valid] = _eval_unchecked(m, x1[valid], x4[valid])
    return out, valid


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSample:
    h1: float
    h2: float
    h_hat: float
    h_E3: float
    g_split_norm_sq: float
    f_split_norm_sq: float

    @property
    def h_E3_abs(self) -> float:
        return abs(self.h_E3)

    @property
    def h_E3_negative(self) -> bool:
        return self.h_E3 < 0

    def to_dict(self) -> dict:
        return {
            "h1": self.h1,
            "h2": self.h2,
            "h_hat": self.h_hat,
            "h_E3": self.h_E3,
            "h_E3_abs": self.h_E3_abs,
            "g_split_norm_sq": self.g_split_norm_sq,
            "f_split_norm_sq": self.f_split_norm_sq,
        }


def metrics_at(m: SurfaceModel, w1: WeierstrassPair, w2: WeierstrassPair, x1: float, x4: float) -> MetricSample:
    """Induced metric factors at ``x1 + k x4``.

    ``ghat = g1(x1+x4) e + g2(x1-x4) e_dagger`` restricted to the split
    plane has ``Im ghat = (g1 - g2)/2`` and split norm ``g1 * g2``; the same
    holds for ``fhat``.  Values are raw: the split norm can be negative.
    """
    if np.any(_band_mask(m, x1, x4)):
        raise LightConeHit(f"({x1}, {x4}) lies within {m.delta} of a light-cone line")
    b1, b2 = complex(x1 + x4), complex(x1 - x4)
    g1, f1 = complex(w1.g(b1)), complex(w1.f(b1))
    g2, f2 = complex(w2.g(b2)), complex(w2.f(b2))
    h1 = 4 * g1.imag**2 * abs(f1) ** 2
    h2 = 4 * g2.imag**2 * abs(f2) ** 2
    g1r, g2r, f1r, f2r = g1.real, g2.real, f1.real, f2.real
    im_g = 0.5 * (g1r - g2r)
    g_norm = g1r * g2r
    f_norm = f1r * f2r
    h_hat = -4 * im_g**2 * f_norm
    h_e3 = 2 * (1 + g_norm) ** 2 * f_norm
    return MetricSample(h1, h2, h_hat, h_e3, g_norm, f_norm)
