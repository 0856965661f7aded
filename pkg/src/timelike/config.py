"""Job configuration files (TOML) and exact data serialisation.

A job file either gives Weierstrass data directly::

    ends = [["0", "0"]]            # optional; paired real ends (p1, p2)

    [factor1]
    g = {num = [0, -1]}
    f = {num = [-1], den = [0, 0, 1]}

    [factor2]
    g = {num = [0, -1]}
    f = {num = [-1], den = [0, 0, 1]}

or asks for a solve::

    [solve]
    augment = "zero"               # "zero", "all" or "none"

    [solve.factor1]
    g = {num = [1, -1, 1], den = [-1, 1]}
    poles = ["1"]

plus optional ``[domain]``, ``[output]``, ``[verify]`` and ``[analysis]``
tables.  Rationals are ``"p/q"`` strings so they survive serialisation.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from .algebra import as_exact
from .ratfunc import RationalFunction

__all__ = ["ConfigError", "SolveSpec", "JobConfig", "load_config", "parse_config", "dump_solved"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolveSpec:
    g1: RationalFunction
    poles1: tuple
    g2: RationalFunction
    poles2: tuple
    augment: str = "zero"


@dataclass(frozen=True)
class JobConfig:
    factors: tuple | None = None
    """``((g1, f1), (g2, f2))`` for explicit data."""
    solve: SolveSpec | None = None
    ends: tuple | None = None
    x1_range: tuple = (-3.0, 3.0)
    x4_range: tuple = (-3.0, 3.0)
    grid: int = 100
    delta: float = 0.05
    base: object = "auto"
    out_dir: str = "out"
    verify: dict = field(default_factory=dict)
    fd_step: float = 1e-3
    conformality_rtol: float = 1e-3
    radii: tuple = (0.2, 0.1, 0.05, 0.025)
    A1: tuple | None = None
    A2: tuple | None = None
    source: dict = field(default_factory=dict, repr=False)

    @property
    def box(self) -> tuple:
        return (self.x1_range, self.x4_range)


def _rf(spec, where: str) -> RationalFunction:
    try:
        return RationalFunction.from_config(spec)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _range(v, where: str) -> tuple:
    try:
        lo, hi = (float(as_exact(x).re) for x in v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be a pair of numbers: {exc}") from None
    if not lo < hi:
        raise ConfigError(f"{where} must satisfy min < max, got {v!r}")
    return (lo, hi)


def _poles(v, where: str) -> tuple:
    try:
        return tuple(as_exact(p) for p in v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _base(v):
    if v in ("auto", "raw"):
        return v
    if isinstance(v, list) and len(v) == 2:
        return tuple(b if b in ("auto", "raw") else as_exact(b) for b in v)
    raise ConfigError(f"domain.base must be 'auto', 'raw' or a pair, got {v!r}")


def parse_config(doc: dict) -> JobConfig:
    """Validate a parsed TOML document."""
    kw: dict = {"source": doc}
    if "solve" in doc:
        s = doc["solve"]
        try:
            f1, f2 = s["factor1"], s["factor2"]
            kw["solve"] = SolveSpec(
                _rf(f1["g"], "solve.factor1.g"),
                _poles(f1.get("poles", []), "solve.factor1.poles"),
                _rf(f2["g"], "solve.factor2.g"),
                _poles(f2.get("poles", []), "solve.factor2.poles"),
                s.get("augment", "zero"),
            )
        except KeyError as exc:
            raise ConfigError(f"solve section is missing {exc}") from None
        if kw["solve"].augment not in ("zero", "all", "none"):
            raise ConfigError(f"solve.augment must be zero, all or none, got {kw['solve'].augment!r}")
    elif "factor1" in doc and "factor2" in doc:
        facs = []
        for k in ("factor1", "factor2"):
            try:
                facs.append((_rf(doc[k]["g"], f"{k}.g"), _rf(doc[k]["f"], f"{k}.f")))
            except KeyError as exc:
                raise ConfigError(f"{k} is missing {exc}") from None
        kw["factors"] = tuple(facs)
    else:
        raise ConfigError("config needs [factor1]/[factor2] tables or a [solve] table")
    if "ends" in doc:
        try:
            kw["ends"] = tuple((as_exact(a), as_exact(b)) for a, b in doc["ends"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"ends: {exc}") from None

    dom = doc.get("domain", {})
    if "x1" in dom:
        kw["x1_range"] = _range(dom["x1"], "domain.x1")
    if "x4" in dom:
        kw["x4_range"] = _range(dom["x4"], "domain.x4")
    if "grid" in dom:
        kw["grid"] = dom["grid"]
    if "delta" in dom:
        kw["delta"] = dom["delta"]
    if "base" in dom:
        kw["base"] = _base(dom["base"])
    kw["out_dir"] = doc.get("output", {}).get("dir", "out")

    ver = dict(doc.get("verify", {}))
    kw["fd_step"] = float(ver.pop("fd_step", 1e-3))
    kw["conformality_rtol"] = float(ver.pop("conformality_rtol", 1e-3))
    kw["verify"] = {k: bool(v) for k, v in ver.items()}

    an = doc.get("analysis", {})
    if "radii" in an:
        kw["radii"] = tuple(float(r) for r in an["radii"])
    if "A1" in an:
        kw["A1"] = _range(an["A1"], "analysis.A1")
    if "A2" in an:
        kw["A2"] = _range(an["A2"], "analysis.A2")
    return validate(JobConfig(**kw))


def validate(cfg: JobConfig) -> JobConfig:
    if not isinstance(cfg.grid, int) or isinstance(cfg.grid, bool) or cfg.grid < 2:
        raise ConfigError(f"grid must be an integer >= 2, got {cfg.grid!r}")
    if not isinstance(cfg.delta, (int, float)) or not cfg.delta > 0:
        raise ConfigError(f"delta must be positive, got {cfg.delta!r}")
    if cfg.fd_step <= 0:
        raise ConfigError("verify.fd_step must be positive")
    return cfg


def load_config(path) -> JobConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc)


def dump_solved(g1, f1, g2, f2, ends, cfg: JobConfig | None = None) -> str:
    """TOML text for explicit data that :func:`load_config` reads back exactly."""
    doc: dict = {}
    if ends:
        doc["ends"] = [[str(as_exact(a).re), str(as_exact(b).re)] for a, b in ends]
    doc["factor1"] = {"g": g1.to_config(), "f": f1.to_config()}
    doc["factor2"] = {"g": g2.to_config(), "f": f2.to_config()}
    if cfg is not None:
        for key in ("domain", "output", "verify", "analysis"):
            if key in cfg.source:
                doc[key] = cfg.source[key]
    return tomli_w.dumps(doc)
