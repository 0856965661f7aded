"""Singular sets, branch points and simple ends of timelike surfaces.

The surface degenerates where ``Im ghat = 0``, i.e. on the zero set of

    F(x1, x4) = g1(x1 + x4) - g2(x1 - x4),

which is real-valued for conjugate-symmetric data.  The zero set is traced
with marching squares and each crossing is refined on its grid edge.

At a simple end (alpha has a pole of order exactly two) each factor looks
like ``(-a/rho, c ln|rho|, -a/rho)`` or ``(-a/rho + c ln|rho|, 0, -a/rho +
c ln|rho|)`` with ``rho = beta - p``; ``a`` is the ``(z - p)**-2`` coefficient
of the first alpha component and ``c`` a residue.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .algebra import GaussianRational, as_exact
from .period import BicomplexWeierstrass, WeierstrassPair, assemble_bicomplex, build_alpha, light_cone_poles, render
from .ratfunc import IrrationalPole, Polynomial, _exact_roots, residue_at
from .surface import SurfaceModel, eval_maximal

__all__ = [
    "NotSimpleEnd",
    "UnclassifiableEnd",
    "SingularCurve",
    "CompactnessReport",
    "EndDescriptor",
    "FactorEnd",
    "COMBINED_TYPE",
    "singularity_function",
    "extract_singular_set",
    "check_compactness",
    "branch_points",
    "classify_end",
    "end_model",
    "asymptotic_residual",
    "asymptotic_ratios",
]

Box = tuple  # ((x1_min, x1_max), (x4_min, x4_max))


class NotSimpleEnd(ValueError):
    pass


class UnclassifiableEnd(ValueError):
    pass


def singularity_function(w1: WeierstrassPair, w2: WeierstrassPair):
    """Vectorised ``F(x1, x4) = Re(g1(x1 + x4) - g2(x1 - x4))``."""

    def F(x1, x4):
        x1 = np.asarray(x1, dtype=float)
        x4 = np.asarray(x4, dtype=float)
        return np.real(w1.g(x1 + x4 + 0j) - w2.g(x1 - x4 + 0j))

    return F


# ---------------------------------------------------------------------------
# marching squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularCurve:
    polylines: tuple
    """Each polyline is an ``(k, 2)`` array of ``(x1, x4)`` vertices."""
    residual: float
    bounded_flag: bool
    cell_size: tuple = (0.0, 0.0)
    dropped: int = 0
    """Crossings whose refinement did not reach the tolerance (not emitted)."""

    @property
    def vertices(self) -> np.ndarray:
        if not self.polylines:
            return np.zeros((0, 2))
        return np.concatenate(self.polylines, axis=0)

    def to_csv_rows(self) -> list:
        rows = []
        for i, line in enumerate(self.polylines):
            for j, (a, b) in enumerate(line):
                rows.append((i, j, float(a), float(b)))
        return rows


def _excluded_cells(s_lo, s_hi, d_lo, d_hi, lines1, lines2, delta) -> np.ndarray:
    bad = np.zeros(s_lo.shape, dtype=bool)
    for p in lines1:
        bad |= (s_lo - delta < p) & (p < s_hi + delta)
    for q in lines2:
        bad |= (d_lo - delta < q) & (q < d_hi + delta)
    return bad


def _refine(F, a, b, fa, fb, tol):
    """Root of ``F`` on the segment ``a -> b`` (2-vectors) with a sign change."""
    if fa == 0:
        return a, 0.0
    if fb == 0:
        return b, 0.0

    def along(t):
        p = a + t * (b - a)
        return float(F(p[0], p[1]))

    t = brentq(along, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    p = a + t * (b - a)
    return p, abs(along(t))


def extract_singular_set(
    w1: WeierstrassPair,
    w2: WeierstrassPair,
    box: Box = ((-3.0, 3.0), (-3.0, 3.0)),
    grid_n: int = 100,
    delta: float = 0.05,
    tol: float = 1e-10,
    compact_box: Box | None = None,
) -> SingularCurve:
    """Trace ``F = 0`` on a ``grid_n x grid_n`` node grid over ``box``.

    Cells whose ``x1 + x4`` or ``x1 - x4`` range comes within ``delta`` of a
    light-cone line are skipped.  ``bounded_flag`` reports whether every
    vertex lies in ``compact_box``; without one it is true when the curve
    stays off the boundary cells of ``box``.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    F = singularity_function(w1, w2)
    (a0, a1), (b0, b1) = box
    xs = np.linspace(a0, a1, grid_n)
    ys = np.linspace(b0, b1, grid_n)
    X1, X4 = np.meshgrid(xs, ys, indexing="ij")
    lines1, lines2 = light_cone_poles(w1), light_cone_poles(w2)
    with np.errstate(all="ignore"):
        V = F(X1, X4)
    S, D = X1 + X4, X1 - X4
    corners = lambda A: np.stack([A[:-1, :-1], A[1:, :-1], A[1:, 1:], A[:-1, 1:]], axis=-1)
    Sc, Dc, Vc = corners(S), corners(D), corners(V)
    excluded = _excluded_cells(Sc.min(-1), Sc.max(-1), Dc.min(-1), Dc.max(-1), lines1, lines2, delta)
    excluded |= ~np.isfinite(Vc).all(-1)

    # corner order: (i,j) (i+1,j) (i+1,j+1) (i,j+1); edge e joins corner e and e+1
    node = lambda i, j: np.array([xs[i], ys[j]])
    corner_idx = ((0, 0), (1, 0), (1, 1), (0, 1))
    cache: dict = {}
    dropped = 0

    def crossing(i, j, e):
        nonlocal dropped
        (di0, dj0), (di1, dj1) = corner_idx[e], corner_idx[(e + 1) % 4]
        n0, n1 = (i + di0, j + dj0), (i + di1, j + dj1)
        key = (min(n0, n1), max(n0, n1))
        if key not in cache:
            p, res = _refine(F, node(*key[0]), node(*key[1]), V[key[0]], V[key[1]], tol)
            if res > tol:
                dropped += 1
                cache[key] = None
            else:
                cache[key] = (p, res)
        return key if cache[key] is not None else None

    segments = []
    pos = Vc >= 0
    for i, j in zip(*np.nonzero(~excluded & (pos.any(-1) & ~pos.all(-1)))):
        signs = pos[i, j]
        edges = [e for e in range(4) if signs[e] != signs[(e + 1) % 4]]
        if len(edges) == 2:
            pairs = [tuple(edges)]
        else:
            centre = float(F(xs[i] + 0.5 * (xs[i + 1] - xs[i]), ys[j] + 0.5 * (ys[j + 1] - ys[j])))
            # saddle: if the centre shares corner 0's sign, corners 0 and 2 are
            # joined through it and the curve cuts off corners 1 and 3
            if (centre >= 0) == signs[0]:
                pairs = [(0, 1), (2, 3)]
            else:
                pairs = [(3, 0), (1, 2)]
        for e0, e1 in pairs:
            k0, k1 = crossing(i, j, e0), crossing(i, j, e1)
            if k0 is not None and k1 is not None and k0 != k1:
                segments.append((k0, k1))

    polylines = _join(segments, cache)
    verts = np.concatenate(polylines, axis=0) if polylines else np.zeros((0, 2))
    residual = max((cache[k][1] for s in segments for k in s), default=0.0)
    if compact_box is not None:
        (c0, c1), (e0, e1) = compact_box
        bounded = bool(np.all((verts[:, 0] >= c0) & (verts[:, 0] <= c1) & (verts[:, 1] >= e0) & (verts[:, 1] <= e1)))
    else:
        hx, hy = xs[1] - xs[0], ys[1] - ys[0]
        inner = (
            (verts[:, 0] > a0 + hx) & (verts[:, 0] < a1 - hx) & (verts[:, 1] > b0 + hy) & (verts[:, 1] < b1 - hy)
        )
        bounded = bool(np.all(inner))
    return SingularCurve(
        tuple(polylines), float(residual), bounded, (float(xs[1] - xs[0]), float(ys[1] - ys[0])), dropped
    )


def _join(segments, cache) -> list:
    adj = defaultdict(list)
    for a, b in segments:
        adj[a].append(b)
        adj[b].append(a)
    used = set()
    lines = []

    def walk(start):
        path = [start]
        prev, cur = None, start
        while True:
            nxt = [n for n in adj[cur] if (min(cur, n), max(cur, n)) not in used]
            if not nxt:
                return path
            n = nxt[0]
            used.add((min(cur, n), max(cur, n)))
            path.append(n)
            prev, cur = cur, n
            if cur == start:
                return path

    # open chains first (start at degree-1 nodes), then closed loops
    order = sorted(adj, key=lambda k: (len(adj[k]) != 1, k))
    for k in order:
        while any((min(k, n), max(k, n)) not in used for n in adj[k]):
            path = walk(k)
            lines.append(np.array([cache[p][0] for p in path]))
    return lines


# ---------------------------------------------------------------------------
# compactness and discreteness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactnessReport:
    contained: bool | None
    """Every vertex has ``x1 + x4`` in ``A1`` and ``x1 - x4`` in ``A2`` (None without intervals)."""
    classification: str
    """``"whole"``, ``"curve"``, ``"discrete"`` or ``"empty"``; a grid heuristic, not a proof."""
    bounded_flag: bool
    max_abs_F: float
    note: str

    def to_dict(self) -> dict:
        return {
            "contained": self.contained,
            "classification": self.classification,
            "bounded_flag": self.bounded_flag,
            "max_abs_F": self.max_abs_F,
            "note": self.note,
        }


def check_compactness(
    w1: WeierstrassPair,
    w2: WeierstrassPair,
    sing: SingularCurve,
    box: Box,
    A1: Sequence[float] | None = None,
    A2: Sequence[float] | None = None,
    grid_n: int = 101,
    delta: float = 0.05,
) -> CompactnessReport:
    """Compare the singular set with ``(A1 e + A2 e_dagger)`` and classify it."""
    verts = sing.vertices
    contained = None
    bounded = sing.bounded_flag
    if A1 is not None and A2 is not None:
        s, d = verts[:, 0] + verts[:, 1], verts[:, 0] - verts[:, 1]
        contained = bool(np.all((s >= A1[0]) & (s <= A1[1]) & (d >= A2[0]) & (d <= A2[1])))
        bounded = bounded and contained

    F = singularity_function(w1, w2)
    (a0, a1), (b0, b1) = box
    X1, X4 = np.meshgrid(np.linspace(a0, a1, grid_n), np.linspace(b0, b1, grid_n), indexing="ij")
    ok = np.ones(X1.shape, dtype=bool)
    for p in light_cone_poles(w1):
        ok &= np.abs(X1 + X4 - p) >= delta
    for q in light_cone_poles(w2):
        ok &= np.abs(X1 - X4 - q) >= delta
    with np.errstate(all="ignore"):
        V = np.abs(F(X1[ok], X4[ok]))
    V = V[np.isfinite(V)]
    max_f = float(V.max()) if V.size else 0.0
    if V.size and max_f <= 1e-12:
        cls = "whole"
        note = "F vanishes at every grid sample: the singular set is the whole domain"
    elif sing.polylines:
        cls = "curve"
        note = "F is not identically zero and its zero set contains curves (neither discrete nor whole)"
    elif V.size and V.min() <= 1e-10:
        cls = "discrete"
        note = "isolated grid samples with F = 0 and no traced curves"
    else:
        cls = "empty"
        note = "no zeros of F found on the grid"
    return CompactnessReport(contained, cls, bool(bounded), max_f, note + " (grid heuristic)")


def branch_points(w: WeierstrassPair, box: Sequence[float]) -> list[float]:
    """Real zeros of ``f`` in the closed interval ``box``."""
    lo, hi = float(box[0]), float(box[1])
    num = w.f.numerator
    if num.degree <= 0:
        return []
    try:
        roots = _exact_roots(list(num.coeffs))
        out = [float(r.re) for r, _ in roots if r.is_real() and lo <= r.re <= hi]
        return sorted(out)
    except IrrationalPole:
        pass
    fr = lambda x: float(np.real(num(complex(x))))
    xs = np.linspace(lo, hi, 4001)
    vals = np.array([fr(x) for x in xs])
    out = []
    for k in range(len(xs) - 1):
        if vals[k] == 0:
            out.append(float(xs[k]))
        elif vals[k] * vals[k + 1] < 0:
            out.append(float(brentq(fr, xs[k], xs[k + 1], xtol=1e-14)))
    if vals[-1] == 0:
        out.append(float(xs[-1]))
    return sorted(out)


# ---------------------------------------------------------------------------
# ends
# ---------------------------------------------------------------------------

COMBINED_TYPE = {(1, 1): 1, (1, 2): 2, (2, 1): 3, (2, 2): 4}


@dataclass(frozen=True)
class FactorEnd:
    pole: GaussianRational
    a: object
    c: object
    type: int
    residues: tuple
    orders: tuple

    def to_dict(self) -> dict:
        return {
            "pole": render(self.pole),
            "a": render(self.a),
            "c": render(self.c),
            "type": self.type,
            "residues": [render(r) for r in self.residues],
            "orders": list(self.orders),
        }


@dataclass(frozen=True)
class EndDescriptor:
    end_point: tuple
    factors: tuple
    combined_type: int
    simple: bool = True

    @property
    def a(self) -> tuple:
        return tuple(f.a for f in self.factors)

    @property
    def c(self) -> tuple:
        return tuple(f.c for f in self.factors)

    def to_dict(self) -> dict:
        return {
            "end_point": [render(p) for p in self.end_point],
            "simple": self.simple,
            "combined_type": self.combined_type,
            "factors": [f.to_dict() for f in self.factors],
        }


def _factor_end(w: WeierstrassPair, p: GaussianRational, k: int) -> FactorEnd:
    alpha = build_alpha(w)
    orders = tuple(comp.order_at(p) for comp in alpha)
    if max(orders) != 2:
        raise NotSimpleEnd(f"factor {k}: alpha pole orders at {p} are {orders}, a simple end needs maximum 2")
    lead = [comp.laurent(p, 1)[1][0] if o == 2 else as_exact(0) for comp, o in zip(alpha, orders)]
    res = tuple(residue_at(comp, p) for comp in alpha)
    A1, A2, A3 = lead
    R1, R2, R3 = res
    if A1 != A3 or not A1 or A2:
        raise UnclassifiableEnd(
            f"factor {k}: double-pole coefficients {[str(x) for x in lead]} do not have the (a, 0, a) shape"
        )
    if not R1 and not R3:
        typ, c = 1, R2
    elif not R2 and R1 == R3:
        typ, c = 2, R1
    else:
        raise UnclassifiableEnd(f"factor {k}: residues {[str(x) for x in res]} match neither normal form")
    a = A1.re if A1.is_real() else A1
    c = c.re if c.is_real() else c
    return FactorEnd(p, a, c, typ, res, orders)


def classify_end(w1: WeierstrassPair, w2: WeierstrassPair, end_index: int = 0, ends: Sequence | None = None) -> EndDescriptor:
    """Classify the ``end_index``-th paired end (0-based).

    ``ends`` defaults to the pairing chosen by :func:`assemble_bicomplex`.
    """
    if ends is None:
        ends = assemble_bicomplex(w1, w2).ends
    p1, p2 = (as_exact(x) for x in ends[end_index])
    f1 = _factor_end(w1, p1, 1)
    f2 = _factor_end(w2, p2, 2)
    return EndDescriptor((p1, p2), (f1, f2), COMBINED_TYPE[(f1.type, f2.type)], True)


def end_model(d: EndDescriptor, eps1: int, eps2: int, r) -> np.ndarray:
    """Asymptotic model ``1/2 (M_1 + M_2)`` at ``beta_k = p_k + eps_k r``."""
    r = np.asarray(r, dtype=float)
    parts = []
    for fe, eps in zip(d.factors, (eps1, eps2)):
        a, c = float(fe.a), float(fe.c)
        pole_part = -a * eps / r
        log_part = c * np.log(r)
        if fe.type == 1:
            parts.append(np.stack([pole_part, log_part, pole_part], axis=-1))
        else:
            zero = np.zeros_like(r)
            parts.append(np.stack([pole_part + log_part, zero, pole_part + log_part], axis=-1))
    return 0.5 * (parts[0] + parts[1])


def asymptotic_residual(m: SurfaceModel, d: EndDescriptor, radii: Sequence[float]) -> list[float]:
    """``max`` over sign quadrants of ``|Xhat - model|`` at each radius."""
    if not d.simple:
        raise NotSimpleEnd("asymptotic residuals need a simple end")
    p1, p2 = (float(p.re) for p in d.end_point)
    out = []
    for r in radii:
        worst = 0.0
        for e1 in (1, -1):
            for e2 in (1, -1):
                x = 0.5 * (eval_maximal(m, 1, complex(p1 + e1 * r)) + eval_maximal(m, 2, complex(p2 + e2 * r)))
                worst = max(worst, float(np.linalg.norm(x - end_model(d, e1, e2, r))))
        out.append(worst)
    return out


def asymptotic_ratios(residuals: Sequence[float], radii: Sequence[float]) -> list[float]:
    """Residuals divided by the model magnitude ``max(1/r, |ln r|)``."""
    return [res / max(1.0 / r, abs(np.log(r))) for res, r in zip(residuals, radii)]
