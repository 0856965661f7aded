"""Numerical verification of constructed surfaces.

Three independent checks back the closed-form pipeline:

* central finite differences of ``Xhat`` for the conformality conditions
  ``<X_u, X_u> + <X_v, X_v> = 0``, ``<X_u, X_v> = 0`` and the wave equation
  ``X_uu - X_vv = 0`` (Lorentz product ``a1 b1 + a2 b2 - a3 b3``);
* adaptive quadrature of the integrand along two pole-avoiding paths, as an
  oracle for the real part of the closed-form antiderivative;
* a direct bicomplex loop integral compared with its idempotent splitting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .algebra import BicomplexNumber, from_idempotent, IdempotentPair
from .analysis import extract_singular_set
from .period import BicomplexWeierstrass, WeierstrassPair, check_period
from .ratfunc import RationalFunction
from .surface import ClosedFormIntegral, SurfaceModel, _band_mask, _eval_unchecked, build_surface, metrics_at

__all__ = [
    "lorentz",
    "FDResult",
    "fd_residuals",
    "fd_convergence",
    "richardson_relative",
    "PathResult",
    "path_oracle",
    "eval_bicomplex",
    "bicomplex_loop_integral",
    "split_loop_integral",
    "reference_golden",
    "is_reference_example",
    "CheckResult",
    "VerificationReport",
    "run_verification",
]

EPS = np.finfo(float).eps


def lorentz(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a1 b1 + a2 b2 - a3 b3`` along the last axis."""
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FDResult:
    h: float
    n_points: int
    conformality: np.ndarray = field(repr=False)
    """Signed ``<X_u,X_u> + <X_v,X_v>`` per point."""
    orthogonality: np.ndarray = field(repr=False)
    """Signed ``<X_u,X_v>`` per point."""
    wave: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)
    """``|<X_u,X_u>| + |<X_v,X_v>|`` per point, the natural size of the residuals."""
    max_abs_X: float = 0.0

    @property
    def max_conformality(self) -> float:
        return float(np.abs(self.conformality).max(initial=0.0))

    @property
    def max_orthogonality(self) -> float:
        return float(np.abs(self.orthogonality).max(initial=0.0))

    @property
    def max_wave(self) -> float:
        return float(self.wave.max(initial=0.0))

    @property
    def max_relative_conformality(self) -> float:
        if not self.n_points:
            return 0.0
        return float(np.max(np.abs(self.conformality) / np.maximum(self.scale, 1e-300)))

    @property
    def max_relative_orthogonality(self) -> float:
        if not self.n_points:
            return 0.0
        return float(np.max(np.abs(self.orthogonality) / np.maximum(self.scale, 1e-300)))

    @property
    def wave_roundoff_floor(self) -> float:
        """Rough bound on ``|X_uu - X_vv|`` from rounding alone: ``64 eps max|X| / h**2``."""
        return 64 * EPS * self.max_abs_X / self.h**2

    def summary(self) -> dict:
        return {
            "h": self.h,
            "points": self.n_points,
            "max_conformality": self.max_conformality,
            "max_orthogonality": self.max_orthogonality,
            "max_wave": self.max_wave,
            "max_relative_conformality": self.max_relative_conformality,
            "max_relative_orthogonality": self.max_relative_orthogonality,
            "wave_roundoff_floor": self.wave_roundoff_floor,
        }


def sample_points(m: SurfaceModel, box, grid_n: int, h_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Interior grid nodes whose whole ``h_max`` stencil avoids the exclusion bands."""
    (a0, a1), (b0, b1) = box
    xs = np.linspace(a0, a1, grid_n)[1:-1]
    ys = np.linspace(b0, b1, grid_n)[1:-1]
    X1, X4 = np.meshgrid(xs, ys, indexing="ij")
    ok = ~_band_mask(m, X1, X4)
    for du, dv in ((h_max, 0), (-h_max, 0), (0, h_max), (0, -h_max)):
        ok &= ~_band_mask(m, X1 + du, X4 + dv)
    return X1[ok], X4[ok]


def fd_residuals(m: SurfaceModel, u: np.ndarray, v: np.ndarray, h: float) -> FDResult:
    """Central-difference residuals at the points ``(u, v)`` with step ``h``."""
    X0 = _eval_unchecked(m, u, v)
    Xup, Xum = _eval_unchecked(m, u + h, v), _eval_unchecked(m, u - h, v)
    Xvp, Xvm = _eval_unchecked(m, u, v + h), _eval_unchecked(m, u, v - h)
    Xu = (Xup - Xum) / (2 * h)
    Xv = (Xvp - Xvm) / (2 * h)
    Xuu = (Xup - 2 * X0 + Xum) / h**2
    Xvv = (Xvp - 2 * X0 + Xvm) / h**2
    guu, gvv = lorentz(Xu, Xu), lorentz(Xv, Xv)
    conf = guu + gvv
    orth = lorentz(Xu, Xv)
    wave = np.max(np.abs(Xuu - Xvv), axis=-1)
    max_x = float(np.max(np.abs(X0))) if X0.size else 0.0
    return FDResult(h, int(u.size), conf, orth, wave, np.abs(guu) + np.abs(gvv), max_x)


def fd_convergence(m: SurfaceModel, box, grid_n: int = 50, h: float = 1e-3) -> tuple[FDResult, FDResult, dict]:
    """Residuals at ``h`` and ``h/2`` on the same points, with max-residual ratios."""
    u, v = sample_points(m, box, grid_n, h)
    r1 = fd_residuals(m, u, v, h)
    r2 = fd_residuals(m, u, v, h / 2)
    ratio = lambda a, b: (a / b) if b > 0 else float("inf")
    ratios = {
        "conformality": ratio(r1.max_conformality, r2.max_conformality),
        "orthogonality": ratio(r1.max_orthogonality, r2.max_orthogonality),
        "wave": ratio(r1.max_wave, r2.max_wave),
    }
    return r1, r2, ratios


def richardson_relative(r1: FDResult, r2: FDResult) -> dict:
    """Max relative residuals after removing the ``h**2`` error term.

    With residual ``R(h) = R0 + C h**2 + O(h**4)``, the combination
    ``(4 R(h/2) - R(h)) / 3`` estimates ``R0``, which is zero for a
    conformal immersion.
    """
    scale = np.maximum(r2.scale, 1e-300)
    out = {}
    for name in ("conformality", "orthogonality"):
        a, b = getattr(r1, name), getattr(r2, name)
        out[name] = float(np.max(np.abs(4 * b - a) / 3 / scale, initial=0.0))
    return out


# ---------------------------------------------------------------------------
# quadrature oracle for path independence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathResult:
    closed_form: float
    upper: float
    lower: float

    @property
    def max_error(self) -> float:
        return max(abs(self.upper - self.closed_form), abs(self.lower - self.closed_form))


def _segment_integral(r: RationalFunction, a: complex, b: complex) -> float:
    d = b - a
    f = lambda t: float(np.real(r(a + t * d) * d))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


def _path_integral(r: RationalFunction, pts: Sequence[complex]) -> float:
    return sum(_segment_integral(r, a, b) for a, b in zip(pts, pts[1:]))


def path_oracle(r: RationalFunction, c: ClosedFormIntegral, z: complex, z0: complex, height: float | None = None) -> PathResult:
    """Integrate ``Re(r dz)`` from ``z0`` to ``z`` over the upper and lower detours.

    The detours are rectangles through ``Im = +height`` and ``Im = -height``;
    they enclose every pole lying between the endpoints, so the two paths
    are not homotopic whenever such a pole exists.
    """
    z, z0 = complex(z), complex(z0)
    poles = c.singular_points
    if height is None:
        height = 1.0 + (float(np.max(np.abs(poles.imag))) if poles.size else 0.0)
    upper = [z0, z0 + 1j * height, z + 1j * height, z]
    lower = [z0, z0 - 1j * height, z - 1j * height, z]
    closed = float(c.real_value(z) - c.real_value(z0))
    return PathResult(closed, _path_integral(r, upper), _path_integral(r, lower))


# ---------------------------------------------------------------------------
# bicomplex loop integrals and their idempotent splitting
# ---------------------------------------------------------------------------


def _bc_from_complex_pair(b1: complex, b2: complex) -> BicomplexNumber:
    return from_idempotent(IdempotentPair(complex(b1), complex(b2)))


def eval_bicomplex(r: RationalFunction, z: BicomplexNumber) -> BicomplexNumber:
    """``r(z)`` by Horner's rule in floating bicomplex arithmetic."""

    def horner(coeffs):
        acc = BicomplexNumber(0.0)
        for c in reversed(coeffs):
            cc = complex(c)
            acc = acc * z + BicomplexNumber(cc.real, cc.imag, 0.0, 0.0)
        return acc

    return horner(r.numerator.coeffs) / horner(r.denominator.coeffs)


def bicomplex_loop_integral(
    r1: RationalFunction, r2: RationalFunction, c1: complex, rad1: float, c2: complex, rad2: float, n: int = 512
) -> BicomplexNumber:
    """Trapezoid rule for the loop integral of ``r1 e + r2 e_dagger`` over ``gamma1 e + gamma2 e_dagger``.

    The integrand is evaluated entirely in bicomplex arithmetic; only the
    data ``r1 e + r2 e_dagger`` is formed from idempotent parts.
    """
    e = _bc_from_complex_pair(1, 0)
    ed = _bc_from_complex_pair(0, 1)
    total = [0.0, 0.0, 0.0, 0.0]
    for t in np.arange(n) * (2 * np.pi / n):
        g1 = c1 + rad1 * np.exp(1j * t)
        g2 = c2 + rad2 * np.exp(1j * t)
        dg1 = 1j * rad1 * np.exp(1j * t)
        dg2 = 1j * rad2 * np.exp(1j * t)
        zt = _bc_from_complex_pair(g1, g2)
        dz = _bc_from_complex_pair(dg1, dg2)
        val = (eval_bicomplex(r1, zt) * e + eval_bicomplex(r2, zt) * ed) * dz
        f = val.to_float()
        for k, x in enumerate((f.x1, f.x2, f.x3, f.x4)):
            total[k] += x
    h = 2 * np.pi / n
    return BicomplexNumber(*(h * x for x in total))


def split_loop_integral(r: RationalFunction, centre: complex, radius: float, n: int = 512) -> complex:
    t = np.arange(n) * (2 * np.pi / n)
    g = centre + radius * np.exp(1j * t)
    return complex(np.sum(r(g) * 1j * radius * np.exp(1j * t)) * (2 * np.pi / n))


# ---------------------------------------------------------------------------
# golden comparison
# ---------------------------------------------------------------------------


def is_reference_example(data: BicomplexWeierstrass) -> bool:
    z = RationalFunction.variable()
    target = (-z, -1 / (z * z))
    return all((w.g, w.f) == target for w in (data.factor1, data.factor2))


def reference_closed_form(x1, x4) -> np.ndarray:
    q = x1 * x1 - x4 * x4
    return np.stack([x1 / q + x1, np.log(np.abs(q)), x1 / q - x1], axis=-1)


def reference_golden(data: BicomplexWeierstrass, box=((-3.0, 3.0), (-3.0, 3.0)), grid_n: int = 50, delta: float = 0.05) -> tuple[float, int]:
    """Max abs difference from the closed form, using constant-free antiderivatives."""
    m = build_surface(data, base="raw", delta=delta)
    (a0, a1), (b0, b1) = box
    X1, X4 = np.meshgrid(np.linspace(a0, a1, grid_n), np.linspace(b0, b1, grid_n), indexing="ij")
    ok = ~_band_mask(m, X1, X4)
    got = _eval_unchecked(m, X1[ok], X4[ok])
    want = reference_closed_form(X1[ok], X4[ok])
    return float(np.max(np.abs(got - want), initial=0.0)), int(ok.sum())


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: object
    threshold: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "value": self.value, "threshold": self.threshold, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}


def run_verification(
    data: BicomplexWeierstrass,
    model: SurfaceModel,
    box=((-3.0, 3.0), (-3.0, 3.0)),
    grid_n: int = 50,
    fd_step: float = 1e-3,
    conformality_rtol: float = 1e-3,
    wave_atol: float = 1e-4,
    toggles: dict | None = None,
    seed: int = 0,
) -> VerificationReport:
    """Run every enabled check; a failing check never raises."""
    on = {"period": True, "pde": True, "paths": True, "golden": True, "singular": True}
    on.update(toggles or {})
    checks = []

    if on["period"]:
        for k, w in ((1, data.factor1), (2, data.factor2)):
            rep = check_period(w, "real_residue")
            bad = [f"alpha{e.component} at {e.pole}: residue {e.residue}" for e in rep.failures()]
            checks.append(CheckResult(f"period_real_residue_factor{k}", rep.passed, len(bad), 0, "; ".join(bad)))

    if on["pde"]:
        r1, r2, ratios = fd_convergence(model, box, grid_n, fd_step)
        extrap = richardson_relative(r1, r2)
        checks.append(
            CheckResult(
                "conformality_extrapolated",
                max(extrap.values()) <= conformality_rtol,
                extrap,
                conformality_rtol,
                f"raw maxima at h: conformality {r1.max_conformality:.3e}, orthogonality {r1.max_orthogonality:.3e}, "
                f"relative {r1.max_relative_conformality:.3e} over {r1.n_points} points",
            )
        )
        conv_ok = all(3 <= ratios[k] <= 5 for k in ("conformality", "orthogonality") if np.isfinite(ratios[k]))
        conv_ok = conv_ok or r1.max_conformality == 0
        checks.append(
            CheckResult("conformality_order2", conv_ok, {k: ratios[k] for k in ("conformality", "orthogonality")}, [3, 5])
        )
        wave_small = r1.max_wave <= max(wave_atol, r1.wave_roundoff_floor)
        at_floor = r1.max_wave <= r1.wave_roundoff_floor and r2.max_wave <= r2.wave_roundoff_floor
        wave_conv = bool((3 <= ratios["wave"] <= 5) or at_floor)
        checks.append(
            CheckResult(
                "wave_equation",
                wave_small,
                r1.max_wave,
                max(wave_atol, r1.wave_roundoff_floor),
                f"absolute tolerance {wave_atol:g}, rounding floor {r1.wave_roundoff_floor:.3e}",
            )
        )
        checks.append(
            CheckResult(
                "wave_order2",
                wave_conv,
                ratios["wave"],
                [3, 5],
                "residual at rounding floor: the stencil is exact for X = A(u+v) + B(u-v)" if at_floor else "",
            )
        )

    if on["paths"]:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for k, w in ((0, data.factor1), (1, data.factor2)):
            lines = model.lines(k + 1)
            for comp in range(3):
                c = model.components[comp][k]
                r = c.derivative()
                z0, z = _two_points(rng, lines)
                res = path_oracle(r, c, z, z0)
                worst = max(worst, res.max_error / max(1.0, abs(res.closed_form)))
        checks.append(CheckResult("path_independence", worst <= 1e-8, worst, 1e-8))

    if on["golden"] and is_reference_example(data):
        err, npts = reference_golden(data, box, grid_n, model.delta)
        checks.append(CheckResult("reference_golden", err <= 1e-9, err, 1e-9, f"{npts} grid points"))

    if on["singular"]:
        sing = extract_singular_set(data.factor1, data.factor2, box, max(grid_n, 2), model.delta)
        worst_h = 0.0
        for x1, x4 in sing.vertices:
            if _band_mask(model, x1, x4):
                continue
            worst_h = max(worst_h, abs(metrics_at(model, data.factor1, data.factor2, x1, x4).h_hat))
        ok = sing.residual <= 1e-10 and worst_h <= 1e-9
        checks.append(
            CheckResult(
                "singular_set_degeneracy",
                ok,
                {"max_abs_F": sing.residual, "max_abs_h_hat": worst_h, "vertices": int(len(sing.vertices))},
                {"F": 1e-10, "h_hat": 1e-9},
            )
        )
    return VerificationReport(tuple(checks))


def _two_points(rng, lines: Sequence[float]) -> tuple[complex, complex]:
    """Two real points at distance >= 0.1 from every pole, spanning at least one pole when possible."""
    lines = sorted(lines)
    lo = (lines[0] if lines else 0.0) - 2.0
    hi = (lines[-1] if lines else 0.0) + 2.0
    pts = []
    while len(pts) < 2:
        x = float(rng.uniform(lo, hi))
        if all(abs(x - p) >= 0.1 for p in lines):
            pts.append(x)
    if lines:
        pts = [lo + 0.5, hi - 0.5] if all(abs(x - p) >= 0.1 for x in (lo + 0.5, hi - 0.5) for p in lines) else pts
    return complex(pts[0]), complex(pts[1])
