"""Period conditions for rational Weierstrass data and their exact solution.

A maximal factor is a pair ``(g, f)`` whose integrand is
``alpha = ((1 - g**2) f, 2 g f, (1 + g**2) f)``.  For rational data the
real period condition around a pole ``p`` reads ``Im Res_p alpha = 0``;
the stronger sufficient condition used by the solver is ``Res_p alpha = 0``.

The solver fixes ``g`` and looks for ``f`` of the form::

    f = sum_i a_i / (z - p_i)**2 + sum_{j=0}^{2n-2} b_j z**j

with ``n - 1`` finite ends ``p_i`` (``n`` counts the end at infinity).
Because ``Res_p f = 0`` for this ansatz, only ``Res(g f)`` and
``Res(g**2 f)`` constrain the ``3n - 2`` unknowns, giving at most
``2n - 2`` homogeneous equations with real rational coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import GaussianRational, as_exact
from .linalg import nullspace, rank
from .ratfunc import (
    ONE,
    ZERO,
    Polynomial,
    RationalFunction,
    _mul,
    _raw_residue,
    is_conjugate_symmetric,
    residue_at,
    residue_at_infinity,
)

__all__ = [
    "NotConjugateSymmetric",
    "PeriodViolation",
    "OrderMismatch",
    "EmptyNullspace",
    "WeierstrassPair",
    "BicomplexWeierstrass",
    "ResidueEntry",
    "PeriodReport",
    "PeriodSystem",
    "SolutionChoice",
    "AugmentationSystem",
    "FactorSolution",
    "build_alpha",
    "check_period",
    "solve_period_system",
    "ansatz_f",
    "choose_solution",
    "augmentation_system",
    "augment_weak_complete",
    "assemble_bicomplex",
    "solve_factor",
    "light_cone_poles",
    "render",
]


class NotConjugateSymmetric(ValueError):
    pass


class PeriodViolation(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OrderMismatch(ValueError):
    pass


class EmptyNullspace(RuntimeError):
    """The residue system has only the trivial solution (internal consistency failure)."""


def render(x):
    """JSON-friendly exact rendering: ``"p/q"`` for reals, ``[re, im]`` otherwise."""
    if isinstance(x, GaussianRational):
        if x.is_real():
            return str(x.re)
        return [str(x.re), str(x.im)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [render(v) for v in x]
    return x


@dataclass(frozen=True)
class WeierstrassPair:
    """Weierstrass data ``(g, f)`` of one maximal factor.

    Conjugate symmetry of ``g`` and ``f`` is enforced at construction; use
    :meth:`unchecked` for data that is deliberately non-symmetric.
    """

    g: RationalFunction
    f: RationalFunction
    base_point: object = None

    def __post_init__(self):
        if not (is_conjugate_symmetric(self.g) and is_conjugate_symmetric(self.f)):
            raise NotConjugateSymmetric("g and f must have real coefficients")

    @classmethod
    def unchecked(cls, g: RationalFunction, f: RationalFunction, base_point=None) -> WeierstrassPair:
        obj = object.__new__(cls)
        object.__setattr__(obj, "g", g)
        object.__setattr__(obj, "f", f)
        object.__setattr__(obj, "base_point", base_point)
        return obj

    @property
    def conjugate_symmetric(self) -> bool:
        return is_conjugate_symmetric(self.g) and is_conjugate_symmetric(self.f)

    @property
    def alpha(self) -> tuple:
        return build_alpha(self)

    def ends(self) -> list:
        """Sorted finite poles of the alpha components."""
        pts = set()
        for comp in self.alpha:
            pts.update(p for p, _ in comp.poles)
        return sorted(pts, key=lambda p: (p.re, p.im))

    def violations(self, ends: Iterable | None = None) -> list[str]:
        """Broken regularity conditions of the maximal representation, as text."""
        out = []
        if not self.conjugate_symmetric:
            out.append("g or f is not conjugate-symmetric")
        allowed = set(self.ends() if ends is None else (as_exact(e) for e in ends))
        fg2 = self.f * self.g * self.g
        stray = [p for p, _ in fg2.poles if p not in allowed]
        stray += [p for p, _ in self.f.poles if p not in allowed]
        if stray:
            out.append(f"f or f*g^2 has poles outside the end set: {sorted(set(map(str, stray)))}")
        if self.g.numerator.degree <= 0 and self.g.denominator.degree == 0:
            out.append("g is constant, so Im(g) vanishes identically")
        return out


def build_alpha(w: WeierstrassPair) -> tuple:
    """``((1 - g**2) f, 2 g f, (1 + g**2) f)``."""
    g, f = w.g, w.f
    g2 = g * g
    return ((1 - g2) * f, 2 * g * f, (1 + g2) * f)


@dataclass(frozen=True)
class ResidueEntry:
    pole: GaussianRational
    component: int
    residue: GaussianRational
    passed: bool

    def to_dict(self) -> dict:
        return {
            "pole": render(self.pole),
            "component": self.component,
            "residue": render(self.residue),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class PeriodReport:
    mode: str
    entries: tuple
    residues_at_infinity: tuple
    """Residue of each component at infinity; informational, never enforced."""

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "pass": self.passed,
            "entries": [e.to_dict() for e in self.entries],
            "residues_at_infinity": [render(r) for r in self.residues_at_infinity],
        }


_MODES = {"strict": "strict", "real_residue": "real_residue", "real": "real_residue"}


def check_period(w: WeierstrassPair, mode: str = "real_residue") -> PeriodReport:
    """Check the period condition at every finite pole of every alpha component.

    ``strict`` requires vanishing residues; ``real_residue`` requires real
    residues, which is exactly ``Re(2*pi*i*Res) = 0`` around each pole.
    """
    try:
        mode = _MODES[mode]
    except KeyError:
        raise ValueError(f"unknown period mode {mode!r}") from None
    entries = []
    at_inf = []
    for k, comp in enumerate(build_alpha(w), start=1):
        for p, _ in comp.poles:
            res = residue_at(comp, p)
            ok = (not res) if mode == "strict" else res.is_real()
            entries.append(ResidueEntry(p, k, res, ok))
        at_inf.append(residue_at_infinity(comp))
    entries.sort(key=lambda e: (e.pole.re, e.pole.im, e.component))
    return PeriodReport(mode, tuple(entries), tuple(at_inf))


# ---------------------------------------------------------------------------
# the residue system
# ---------------------------------------------------------------------------


def _pole_basis(p: GaussianRational, power: int) -> tuple[list, list]:
    den = [ONE]
    for _ in range(power):
        den = _mul(den, [-p, ONE])
    return [ONE], den


def _monomial_basis(j: int) -> tuple[list, list]:
    return [ZERO] * j + [ONE], [ONE]


@dataclass(frozen=True)
class PeriodSystem:
    """Homogeneous residue equations for the ``f`` ansatz.

    Rows come in pairs per finite pole ``p_i``: ``Res_{p_i}(g f)`` then
    ``Res_{p_i}(g**2 f)``.  Columns follow ``unknowns``.
    """

    g: RationalFunction
    pole_set: tuple
    unknowns: tuple
    matrix: tuple
    rank: int

    @property
    def n(self) -> int:
        return len(self.pole_set) + 1

    @property
    def n_a(self) -> int:
        return len(self.pole_set)

    def residuals(self, vector: Sequence) -> list:
        return [sum((a * x for a, x in zip(row, vector)), Fraction(0)) for row in self.matrix]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "poles": [render(p) for p in self.pole_set],
            "unknowns": list(self.unknowns),
            "rows": len(self.matrix),
            "columns": len(self.unknowns),
            "rank": self.rank,
            "matrix": [[render(x) for x in row] for row in self.matrix],
        }


def _real_fraction(x: GaussianRational, what: str) -> Fraction:
    if not x.is_real():
        raise NotConjugateSymmetric(f"{what} has non-real entry {x}")
    return x.re


def _residue_rows(g: RationalFunction, ends: Sequence, basis: Sequence) -> list:
    gn, gd = g._parts()
    g2n, g2d = _mul(gn, gn), _mul(gd, gd)
    rows = []
    for p in ends:
        row_g, row_g2 = [], []
        for bn, bd in basis:
            row_g.append(_raw_residue(_mul(gn, bn), _mul(gd, bd), p))
            row_g2.append(_raw_residue(_mul(g2n, bn), _mul(g2d, bd), p))
        rows.append(row_g)
        rows.append(row_g2)
    return rows


def _check_real_poles(finite_poles: Iterable) -> tuple:
    poles = tuple(as_exact(p) for p in finite_poles)
    if any(not p.is_real() for p in poles):
        raise ValueError("finite poles must be real")
    if len(set(poles)) != len(poles):
        raise ValueError("finite poles must be distinct")
    return poles


def solve_period_system(g: RationalFunction, finite_poles: Sequence) -> tuple[PeriodSystem, list]:
    """Build the residue system for ``g`` and return it with an exact nullspace basis.

    The nullspace has dimension at least ``n = len(finite_poles) + 1``;
    anything smaller is reported as :class:`EmptyNullspace`.
    """
    if not is_conjugate_symmetric(g):
        raise NotConjugateSymmetric("g must have real coefficients")
    poles = _check_real_poles(finite_poles)
    stray = [p for p, _ in g.poles if p not in set(poles)]
    if stray:
        raise ValueError(f"g has finite poles {sorted(map(str, stray))} outside the declared end set")
    n = len(poles) + 1
    unknowns = tuple(f"a{i}" for i in range(1, n)) + tuple(f"b{j}" for j in range(2 * n - 1))
    basis = [_pole_basis(p, 2) for p in poles] + [_monomial_basis(j) for j in range(2 * n - 1)]
    rows = _residue_rows(g, poles, basis)
    matrix = tuple(tuple(_real_fraction(x, "residue matrix") for x in row) for row in rows)
    assert len(matrix) <= 2 * n - 2 and len(unknowns) == 3 * n - 2
    null = nullspace(matrix, len(unknowns))
    if len(null) < n:
        raise EmptyNullspace(f"nullspace dimension {len(null)} < n = {n}")
    system = PeriodSystem(g, poles, unknowns, matrix, rank(matrix))
    return system, null


def ansatz_f(poles: Sequence, vector: Sequence) -> RationalFunction:
    """``sum a_i/(z - p_i)**2 + sum b_j z**j`` from a solution vector."""
    poles = [as_exact(p) for p in poles]
    n_a = len(poles)
    a, b = vector[:n_a], vector[n_a:]
    f = RationalFunction(Polynomial(tuple(b)))
    for p, ai in zip(poles, a):
        if ai:
            f = f + RationalFunction.pole_term(ai, p, 2)
    return f


@dataclass(frozen=True)
class SolutionChoice:
    vector: tuple
    combination: tuple
    a_zero: tuple
    """1-based indices of ``a`` entries that are zero in ``vector``."""
    rationale: str


# preference order of combination coefficients; earlier is "smaller"
_COEFF_ORDER = (0, 1, -1, 2)


def choose_solution(basis: Sequence[Sequence], n_a: int) -> SolutionChoice:
    """Pick a deterministic nonzero vector in the span of ``basis``.

    Combinations with coefficients in ``{0, 1, -1, 2}`` are ranked by the
    number of nonzero ``a`` entries, then by the total number of nonzero
    entries; ties go to the lexicographically first combination under the
    coefficient order ``0 < 1 < -1 < 2``.  Above nine basis vectors only
    coefficients ``{0, 1}`` are searched.
    """
    if not basis:
        raise EmptyNullspace("cannot choose from an empty basis")
    d = len(basis)
    width = len(basis[0])
    fracs = [[Fraction(x) for x in v] for v in basis]
    # clearing denominators column by column keeps every zero pattern exact
    scale = [math.lcm(*(v[i].denominator for v in fracs)) for i in range(width)]
    nums = [[int(v[i] * scale[i]) for i in range(width)] for v in fracs]
    coeffs = _COEFF_ORDER if d <= 9 else (0, 1)
    fits = max((abs(x) for v in nums for x in v), default=0) * max(coeffs) * d < 2**62
    N = np.array(nums, dtype=np.int64 if fits else object)
    combos = np.array(list(itertools.product(coeffs, repeat=d))[1:], dtype=N.dtype)
    best = None
    for start in range(0, len(combos), 65536):
        chunk = combos[start : start + 65536]
        nz = (chunk @ N) != 0
        score = nz[:, :n_a].sum(axis=1).astype(np.int64) * (width + 1) + nz.sum(axis=1)
        k = int(np.argmax(score))
        if best is None or score[k] > best[0]:
            best = (int(score[k]), start + k)
    combo = tuple(int(c) for c in combos[best[1]])
    vec = [sum((c * v[i] for c, v in zip(combo, fracs) if c), Fraction(0)) for i in range(width)]
    score = (sum(1 for x in vec[:n_a] if x), sum(1 for x in vec if x))
    a_zero = tuple(i + 1 for i in range(n_a) if not vec[i])
    why = (
        f"maximises nonzero a-entries ({score[0]}/{n_a}) then nonzero entries ({score[1]}/{width}); "
        f"first such combination in coefficient order {list(coeffs)}"
    )
    return SolutionChoice(tuple(vec), combo, a_zero, why)


# ---------------------------------------------------------------------------
# weak-complete augmentation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AugmentationSystem:
    end: GaussianRational
    ends: tuple
    matrix: tuple
    rank: int
    basis: tuple

    @property
    def independent(self) -> bool:
        return self.rank == len(self.matrix)

    def to_dict(self) -> dict:
        return {
            "end": render(self.end),
            "ends": [render(e) for e in self.ends],
            "rows": len(self.matrix),
            "columns": len(self.basis[0]) if self.basis else None,
            "rank": self.rank,
            "rows_independent": self.independent,
        }


def augmentation_system(g: RationalFunction, p, n: int, ends: Sequence | None = None) -> AugmentationSystem:
    """Residue system for ``sum_{l=1}^{2n} c_l / (z - p)**(2 + l)``.

    Rows are ``Res_{p_j}(g h)`` and ``Res_{p_j}(g**2 h)`` for every finite
    end ``p_j``; ``ends`` defaults to the real finite poles of ``g``.
    """
    p = as_exact(p)
    if ends is None:
        ends = g.real_poles()
    ends = _check_real_poles(ends)
    if len(ends) != n - 1:
        raise ValueError(f"expected {n - 1} finite ends for n = {n}, got {len(ends)}")
    basis = [_pole_basis(p, 2 + l) for l in range(1, 2 * n + 1)]
    rows = _residue_rows(g, ends, basis)
    matrix = tuple(tuple(_real_fraction(x, "augmentation matrix") for x in row) for row in rows)
    null = nullspace(matrix, 2 * n)
    if not null:
        raise EmptyNullspace("augmentation system has only the trivial solution")
    return AugmentationSystem(p, ends, matrix, rank(matrix), tuple(null))


def augment_weak_complete(
    g: RationalFunction, f: RationalFunction, p, n: int, ends: Sequence | None = None
) -> RationalFunction:
    """Return a correction ``h`` with a pole at ``p`` keeping ``(g, f + h)`` residue-free.

    ``h`` uses the first canonical nullspace vector of
    :func:`augmentation_system`.  ``f`` is not modified; callers add ``h``.
    """
    system = augmentation_system(g, p, n, ends)
    coeffs = system.basis[0]
    h = RationalFunction.constant(0)
    for l, c in enumerate(coeffs, start=1):
        if c:
            h = h + RationalFunction.pole_term(c, system.end, 2 + l)
    return h


# ---------------------------------------------------------------------------
# assembling bicomplex data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BicomplexWeierstrass:
    """Idempotent pair of maximal factors with paired ends ``(p1, p2)``."""

    factor1: WeierstrassPair
    factor2: WeierstrassPair
    ends: tuple = ()

    def factor(self, k: int) -> WeierstrassPair:
        if k == 1:
            return self.factor1
        if k == 2:
            return self.factor2
        raise ValueError("factor index must be 1 or 2")


def _real_ends(w: WeierstrassPair) -> list:
    return [p for p in w.ends() if p.is_real()]


def assemble_bicomplex(w1: WeierstrassPair, w2: WeierstrassPair, ends: Sequence | None = None) -> BicomplexWeierstrass:
    """Validate two factors and pair their ends.

    Ends default to the sorted real poles of each factor's alpha, paired by
    position.  Each pair must carry equal pole orders of ``g1`` and ``g2``.
    """
    for k, w in ((1, w1), (2, w2)):
        if not w.conjugate_symmetric:
            raise NotConjugateSymmetric(f"factor {k} is not conjugate-symmetric")
    for k, w in ((1, w1), (2, w2)):
        rep = check_period(w, "real_residue")
        if not rep.passed:
            bad = ", ".join(f"alpha{e.component} at {e.pole}: {e.residue}" for e in rep.failures())
            raise PeriodViolation(f"factor {k} violates the real period condition ({bad})", rep)
    if ends is None:
        e1, e2 = _real_ends(w1), _real_ends(w2)
        if len(e1) != len(e2):
            raise OrderMismatch(f"factors have different numbers of real ends ({len(e1)} vs {len(e2)})")
        pairs = tuple(zip(e1, e2))
    else:
        pairs = tuple((as_exact(a), as_exact(b)) for a, b in ends)
    for p1, p2 in pairs:
        o1, o2 = w1.g.order_at(p1), w2.g.order_at(p2)
        if o1 != o2:
            raise OrderMismatch(f"g1 has order {o1} at {p1} but g2 has order {o2} at {p2}")
    return BicomplexWeierstrass(w1, w2, pairs)


def light_cone_poles(w: WeierstrassPair) -> list[float]:
    """Real points whose light-cone lines must be removed for this factor."""
    pts = set(_real_ends(w))
    pts.update(p for p in w.g.real_poles())
    return sorted(float(p.re) for p in pts)


# ---------------------------------------------------------------------------
# full per-factor construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorSolution:
    system: PeriodSystem
    basis: tuple
    choice: SolutionChoice
    f: RationalFunction
    augmentations: tuple = ()
    """``(end, AugmentationSystem, correction)`` triples."""
    F: RationalFunction = field(default=None)

    @property
    def pair(self) -> WeierstrassPair:
        return WeierstrassPair(self.system.g, self.F)

    def to_dict(self) -> dict:
        return {
            "system": self.system.to_dict(),
            "nullspace_dimension": len(self.basis),
            "nullspace": [[render(x) for x in v] for v in self.basis],
            "chosen": dict(zip(self.system.unknowns, (render(x) for x in self.choice.vector))),
            "combination": list(self.choice.combination),
            "a_zero": list(self.choice.a_zero),
            "rationale": self.choice.rationale,
            "augmented_ends": [
                {**aug.to_dict(), "correction": h.to_config()} for _, aug, h in self.augmentations
            ],
            "f": self.f.to_config(),
            "F": self.F.to_config(),
        }


def solve_factor(g: RationalFunction, finite_poles: Sequence, augment: str = "zero") -> FactorSolution:
    """Solve the period system for one factor and augment its ends.

    ``augment`` is ``"zero"`` (only ends whose ``a_i`` vanished), ``"all"``
    or ``"none"``.
    """
    if augment not in ("zero", "all", "none"):
        raise ValueError(f"unknown augmentation policy {augment!r}")
    system, basis = solve_period_system(g, finite_poles)
    choice = choose_solution(basis, system.n_a)
    f = ansatz_f(system.pole_set, choice.vector)
    if augment == "all":
        targets = list(range(1, system.n_a + 1))
    elif augment == "zero":
        targets = list(choice.a_zero)
    else:
        targets = []
    augs = []
    F = f
    for i in targets:
        p = system.pole_set[i - 1]
        aug = augmentation_system(g, p, system.n, system.pole_set)
        h = augment_weak_complete(g, f, p, system.n, system.pole_set)
        augs.append((p, aug, h))
        F = F + h
    return FactorSolution(system, tuple(basis), choice, f, tuple(augs), F)
