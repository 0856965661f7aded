"""Command line interface: ``timelike <command> --config job.toml``.

Commands return ``(report, exit_code)`` so they can be driven from Python as
well; ``main`` prints the report as JSON and writes it to the output
directory.  Exit codes: 0 success, 1 data or verification failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import GaussianRational
from .analysis import (
    NotSimpleEnd,
    UnclassifiableEnd,
    asymptotic_ratios,
    asymptotic_residual,
    check_compactness,
    classify_end,
    extract_singular_set,
)
from .config import ConfigError, JobConfig, dump_solved, load_config, validate
from .export import build_mesh, write_mesh
from .period import (
    EmptyNullspace,
    NotConjugateSymmetric,
    OrderMismatch,
    PeriodViolation,
    WeierstrassPair,
    assemble_bicomplex,
    check_period,
    render,
    solve_factor,
)
from .ratfunc import IrrationalPole
from .surface import ComplexResidue, LightConeHit, build_surface, eval_timelike, metrics_at
from .verify import run_verification

log = logging.getLogger("timelike")

DATA_ERRORS = (
    PeriodViolation,
    OrderMismatch,
    NotConjugateSymmetric,
    ComplexResidue,
    IrrationalPole,
    EmptyNullspace,
    LightConeHit,
    NotSimpleEnd,
    UnclassifiableEnd,
)


def _json_default(x):
    if isinstance(x, (GaussianRational, Fraction)):
        return render(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"


# ---------------------------------------------------------------------------
# data resolution
# ---------------------------------------------------------------------------


def _solve(cfg: JobConfig):
    s = cfg.solve
    sol1 = solve_factor(s.g1, s.poles1, s.augment)
    sol2 = solve_factor(s.g2, s.poles2, s.augment)
    if cfg.ends is not None:
        ends = cfg.ends
    else:
        if len(s.poles1) != len(s.poles2):
            raise ConfigError("solve.factor1.poles and solve.factor2.poles must have equal length to pair ends")
        ends = tuple(zip(s.poles1, s.poles2))
    return sol1, sol2, ends


def raw_pairs(cfg: JobConfig) -> tuple:
    """Weierstrass pairs without symmetry enforcement (for reporting)."""
    if cfg.factors is not None:
        return tuple(WeierstrassPair.unchecked(g, f) for g, f in cfg.factors)
    sol1, sol2, _ = _solve(cfg)
    return (WeierstrassPair.unchecked(sol1.system.g, sol1.F), WeierstrassPair.unchecked(sol2.system.g, sol2.F))


def resolve(cfg: JobConfig):
    """``(BicomplexWeierstrass, (sol1, sol2) or None)``."""
    if cfg.factors is not None:
        (g1, f1), (g2, f2) = cfg.factors
        data = assemble_bicomplex(WeierstrassPair(g1, f1), WeierstrassPair(g2, f2), cfg.ends)
        return data, None
    sol1, sol2, ends = _solve(cfg)
    data = assemble_bicomplex(sol1.pair, sol2.pair, ends)
    return data, (sol1, sol2)


def _model(cfg: JobConfig, data):
    return build_surface(data, base=cfg.base, delta=cfg.delta)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: JobConfig, out_dir: Path | None = None):
    if cfg.solve is None:
        raise ConfigError("solve needs a [solve] table with g and poles per factor")
    data, (sol1, sol2) = resolve(cfg)
    ends = []
    for p1, p2 in data.ends:
        flags = {
            "g1_pole": data.factor1.g.order_at(p1) > 0,
            "F1_pole": data.factor1.f.order_at(p1) > 0,
            "g2_pole": data.factor2.g.order_at(p2) > 0,
            "F2_pole": data.factor2.f.order_at(p2) > 0,
        }
        ends.append({"end": [render(p1), render(p2)], **flags, "weak_complete": all(flags.values())})
    strict = [check_period(w, "strict") for w in (data.factor1, data.factor2)]
    report = {
        "factor1": sol1.to_dict(),
        "factor2": sol2.to_dict(),
        "ends": ends,
        "strict_period": [r.to_dict() for r in strict],
        "all_weak_complete": all(e["weak_complete"] for e in ends),
        "strict_pass": all(r.passed for r in strict),
    }
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        text = dump_solved(data.factor1.g, data.factor1.f, data.factor2.g, data.factor2.f, data.ends, cfg)
        (out_dir / "solved.toml").write_text(text)
        report["data_file"] = str(out_dir / "solved.toml")
    ok = report["all_weak_complete"] and report["strict_pass"]
    return report, 0 if ok else 1


def cmd_check(cfg: JobConfig, mode: str = "real"):
    pairs = raw_pairs(cfg)
    report = {"mode": mode, "factors": []}
    ok = True
    for k, w in enumerate(pairs, start=1):
        real = check_period(w, "real_residue")
        strict = check_period(w, "strict")
        chosen = strict if mode == "strict" else real
        ok = ok and chosen.passed and w.conjugate_symmetric
        report["factors"].append(
            {
                "factor": k,
                "conjugate_symmetric": w.conjugate_symmetric,
                "real_residue": real.to_dict(),
                "strict": strict.to_dict(),
                "violations": w.violations(),
            }
        )
    report["pass"] = ok
    return report, 0 if ok else 1


def cmd_eval(cfg: JobConfig, x1: float, x4: float):
    data, _ = resolve(cfg)
    m = _model(cfg, data)
    X = eval_timelike(m, x1, x4)
    met = metrics_at(m, data.factor1, data.factor2, x1, x4)
    return {"x1": x1, "x4": x4, "X": [float(v) for v in X], "metrics": met.to_dict()}, 0


def cmd_mesh(cfg: JobConfig, out_dir: Path):
    data, _ = resolve(cfg)
    m = _model(cfg, data)
    mesh = build_mesh(m, cfg.box, cfg.grid)
    paths = write_mesh(mesh, out_dir)
    report = {
        "components": [
            {"label": c.label, "id": list(c.component_id), "vertices": len(c.vertices), "triangles": len(c.triangles)}
            for c in mesh.components
        ],
        "files": [p.name for p in paths],
        "samples": "surface_samples.csv",
    }
    if not paths:
        report["warning"] = "all cells excluded; no OBJ files written"
    return report, 0


def cmd_sing(cfg: JobConfig, out_dir: Path | None = None):
    data, _ = resolve(cfg)
    w1, w2 = data.factor1, data.factor2
    sing = extract_singular_set(w1, w2, cfg.box, cfg.grid, cfg.delta)
    comp = check_compactness(w1, w2, sing, cfg.box, cfg.A1, cfg.A2, delta=cfg.delta)
    m = _model(cfg, data)
    h = [abs(metrics_at(m, w1, w2, a, b).h_hat) for a, b in sing.vertices]
    report = {
        "polylines": len(sing.polylines),
        "vertices": int(len(sing.vertices)),
        "residual": sing.residual,
        "bounded_flag": sing.bounded_flag,
        "dropped": sing.dropped,
        "max_abs_h_hat": max(h, default=0.0),
        "compactness": comp.to_dict(),
    }
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "singular.csv", "w") as fh:
            fh.write("polyline,index,x1,x4\n")
            for i, j, a, b in sing.to_csv_rows():
                fh.write(f"{i},{j},{a!r},{b!r}\n")
        report["file"] = "singular.csv"
    return report, 0


def cmd_ends(cfg: JobConfig):
    data, _ = resolve(cfg)
    m = _model(cfg, data)
    radii = list(cfg.radii)
    entries = []
    for i, (p1, p2) in enumerate(data.ends):
        entry = {"end": [render(p1), render(p2)]}
        try:
            d = classify_end(data.factor1, data.factor2, i, data.ends)
        except (NotSimpleEnd, UnclassifiableEnd) as exc:
            entry["error"] = type(exc).__name__
            entry["message"] = str(exc)
            entries.append(entry)
            continue
        res = asymptotic_residual(m, d, radii)
        ratios = asymptotic_ratios(res, radii)
        entry.update(d.to_dict())
        entry["radii"] = radii
        entry["residuals"] = res
        entry["ratios"] = ratios
        entry["ratios_decreasing"] = all(b < a for a, b in zip(ratios, ratios[1:]))
        entries.append(entry)
    return {"ends": entries}, 0


def cmd_verify(cfg: JobConfig):
    pairs = raw_pairs(cfg)
    failures = []
    for k, w in enumerate(pairs, start=1):
        if not w.conjugate_symmetric:
            failures.append({"factor": k, "error": "not conjugate-symmetric"})
        for e in check_period(w, "real_residue").failures():
            failures.append({"factor": k, **e.to_dict()})
    if failures:
        return {"pass": False, "period_failures": failures}, 1
    data, _ = resolve(cfg)
    m = _model(cfg, data)
    rep = run_verification(
        data,
        m,
        cfg.box,
        min(cfg.grid, 200),
        cfg.fd_step,
        cfg.conformality_rtol,
        toggles=cfg.verify,
    )
    return rep.to_dict(), 0 if rep.passed else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="job file (TOML)")
    common.add_argument("--out", help="output directory (overrides [output].dir)")
    common.add_argument("--delta", type=float, help="light-cone exclusion band")
    common.add_argument("--grid", type=int, help="grid samples per axis")
    common.add_argument("--mode", choices=("strict", "real"), default="real", help="period check mode")

    parser = argparse.ArgumentParser(prog="timelike", description="Timelike minimal surfaces from bicomplex Weierstrass data.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve the residue system and augment ends")
    sub.add_parser("check", parents=[common], help="check period conditions")
    ev = sub.add_parser("eval", parents=[common], help="evaluate the surface at one point")
    ev.add_argument("x1", type=float)
    ev.add_argument("x4", type=float)
    sub.add_parser("mesh", parents=[common], help="write OBJ meshes and a sample CSV")
    sub.add_parser("sing", parents=[common], help="extract the singular set")
    sub.add_parser("ends", parents=[common], help="classify simple ends")
    sub.add_parser("verify", parents=[common], help="run the numerical verification suite")
    return parser


def _apply_overrides(cfg: JobConfig, args) -> JobConfig:
    changes = {}
    if args.out is not None:
        changes["out_dir"] = args.out
    if args.delta is not None:
        changes["delta"] = args.delta
    if args.grid is not None:
        changes["grid"] = args.grid
    return validate(dataclasses.replace(cfg, **changes)) if changes else cfg


def run(argv=None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    cfg = _apply_overrides(load_config(args.config), args)
    out = Path(cfg.out_dir)
    cmd = args.command
    if cmd == "solve":
        report, code = cmd_solve(cfg, out)
    elif cmd == "check":
        report, code = cmd_check(cfg, args.mode)
    elif cmd == "eval":
        report, code = cmd_eval(cfg, args.x1, args.x4)
    elif cmd == "mesh":
        report, code = cmd_mesh(cfg, out)
    elif cmd == "sing":
        report, code = cmd_sing(cfg, out)
    elif cmd == "ends":
        report, code = cmd_ends(cfg)
    else:
        report, code = cmd_verify(cfg)
    if cmd != "eval":
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cmd}_report.json").write_text(dumps(report))
    return report, code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        report, code = run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), end="")
        return 1
    except ValueError as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), end="")
        return 1
    print(dumps(report), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
