"""Line-oriented scenario configuration.

The format is flat ``key = value`` lines under ``[section]`` headers, with
``#`` comments.  Parsing validates everything and reports *all* errors at
once, each with its line number, instead of stopping at the first.

Sections and keys (defaults in parentheses):

    [model]        kind, velocity_nodes (32), v_max (8.0)
    [grid]         x_max, dx
    [initial]      family (equilibrium_bump), x_lo, x_hi, center, width, path
    [time]         t_max
    [solver]       cfl (0.9), splitting (strang), transport (upwind1),
                   damping (none), dt_cap (none)
    [diagnostics]  sample_t0 (0.25), samples_per_decade (8),
                   decades (10,100,1000)
    [output]       name
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import collision as col
from . import velocity as vel
from .errors import ConfigurationError
from .grid import PhaseGrid
from .solver import DiagnosticsSchedule, SolverConfig

FAMILIES = ("equilibrium_bump", "box", "shifted_gaussian", "custom_table")


class ConfigParseError(ConfigurationError):
    """Carries the full list of validation errors."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ScenarioConfig:
    kind: str = "relaxation_bounded"
    velocity_nodes: int = 32
    v_max: float = 8.0
    x_max: float = 300.0
    dx: float = 0.1
    family: str = "equilibrium_bump"
    x_lo: float = 1.0
    x_hi: float = 2.0
    center: float = 2.0
    width: float = 0.5
    path: str = ""
    t_max: float = 2000.0
    cfl: float = 0.9
    splitting: str = "strang"
    transport: str = "upwind1"
    damping: float | None = None
    dt_cap: float | None = None
    sample_t0: float = 0.25
    samples_per_decade: int = 8
    decades: tuple[float, ...] = (10.0, 100.0, 1000.0)
    name: str = "run"

    # -- builders -----------------------------------------------------------

    def build_domain(self) -> vel.VelocityDomain:
        if self.kind == col.RELAXATION_BOUNDED:
            return vel.ball(self.velocity_nodes)
        if self.kind in (col.RELAXATION_GAUSSIAN, col.FOKKER_PLANCK):
            return vel.real_line(self.velocity_nodes, self.v_max)
        return vel.circle(self.velocity_nodes)

    def build_model(self) -> col.CollisionModel:
        return col.build_collision(self.kind, self.build_domain())

    def build_grid(self, domain=None) -> PhaseGrid:
        return PhaseGrid(self.x_max, self.dx, domain or self.build_domain())

    def solver_config(self) -> SolverConfig:
        return SolverConfig(cfl=self.cfl, splitting=self.splitting,
                            transport=self.transport, damping=self.damping,
                            dt_cap=self.dt_cap)

    def schedule(self) -> DiagnosticsSchedule:
        return DiagnosticsSchedule(t0=self.sample_t0,
                                   per_decade=self.samples_per_decade,
                                   decades=self.decades)

    def initial_profile(self):
        """Spatial profile g(x); the initial datum is f = M(v) g(x)."""
        if self.family == "equilibrium_bump":
            return lambda x: np.maximum(x, 0.0) * np.exp(-np.square(x))
        if self.family == "box":
            lo, hi = self.x_lo, self.x_hi
            return lambda x: ((x >= lo) & (x <= hi)).astype(float)
        if self.family == "shifted_gaussian":
            c, s = self.center, self.width
            return lambda x: np.exp(-((x - c) / s) ** 2)
        table = np.loadtxt(self.path, delimiter=",", ndmin=2)
        xs, gs = table[:, 0], table[:, 1]
        return lambda x: np.interp(x, xs, gs, left=0.0, right=0.0)

    def initial_datum(self, model: col.CollisionModel):
        g = self.initial_profile()
        M = model.equilibrium
        v_nodes = model.domain.v1

        def f_in(x, v):
            mv = np.interp(np.asarray(v), v_nodes, M)
            return mv * g(np.asarray(x))

        return f_in


# -- the parser ---------------------------------------------------------------

_SCHEMA: dict[str, dict[str, tuple]] = {
    "model": {
        "kind": (str, lambda v: v in col.KINDS, f"one of {col.KINDS}"),
        "velocity_nodes": (int, lambda v: v >= 4, ">= 4"),
        "v_max": (float, lambda v: v > 0, "> 0"),
    },
    "grid": {
        "x_max": (float, lambda v: v >= 100.0, ">= 100 (long runs need room to spread)"),
        "dx": (float, lambda v: v > 0, "> 0"),
    },
    "initial": {
        "family": (str, lambda v: v in FAMILIES, f"one of {FAMILIES}"),
        "x_lo": (float, lambda v: v >= 0, ">= 0"),
        "x_hi": (float, lambda v: v > 0, "> 0"),
        "center": (float, lambda v: v > 0, "> 0"),
        "width": (float, lambda v: v > 0, "> 0"),
        "path": (str, lambda v: True, ""),
    },
    "time": {
        "t_max": (float, lambda v: v >= 0, ">= 0"),
    },
    "solver": {
        "cfl": (float, lambda v: 0 < v <= 1, "in (0, 1]"),
        "splitting": (str, lambda v: v in ("strang", "lie"), "strang or lie"),
        "transport": (str, lambda v: v in ("upwind1", "muscl2"), "upwind1 or muscl2"),
        "damping": (float, lambda v: v >= 0, ">= 0"),
        "dt_cap": (float, lambda v: v > 0, "> 0"),
    },
    "diagnostics": {
        "sample_t0": (float, lambda v: v > 0, "> 0"),
        "samples_per_decade": (int, lambda v: v >= 1, ">= 1"),
        "decades": (tuple, lambda v: all(d > 0 for d in v), "positive values"),
    },
    "output": {
        "name": (str, lambda v: v and all(c.isalnum() or c in "-_." for c in v),
                 "alphanumeric with - _ ."),
    },
}

_OPTIONAL_NONE = {("solver", "damping"), ("solver", "dt_cap")}


def _convert(raw: str, typ):
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    if typ is tuple:
        return tuple(float(p) for p in raw.split(",") if p.strip())
    return raw


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate; raises ConfigParseError with all problems."""
    errors: list[str] = []
    seen: dict[tuple[str, str], int] = {}
    values: dict[tuple[str, str], object] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                errors.append(f"line {lineno}: unknown section [{section}]")
                section = None
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        if section is None:
            errors.append(f"line {lineno}: key outside any known section")
            continue
        key, _, raw_val = line.partition("=")
        key = key.strip()
        raw_val = raw_val.strip()
        if key not in _SCHEMA[section]:
            errors.append(f"line {lineno}: unknown key {key!r} in section [{section}]")
            continue
        if (section, key) in seen:
            errors.append(
                f"line {lineno}: duplicate key {key!r} "
                f"(first set on line {seen[(section, key)]})"
            )
            continue
        seen[(section, key)] = lineno
        typ, check, expect = _SCHEMA[section][key]
        if raw_val == "" and (section, key) in _OPTIONAL_NONE:
            values[(section, key)] = None
            continue
        try:
            val = _convert(raw_val, typ)
        except ValueError:
            errors.append(
                f"line {lineno}: key {key!r} expects {typ.__name__}, got {raw_val!r}"
            )
            continue
        if not check(val):
            errors.append(f"line {lineno}: key {key!r} must be {expect}, got {raw_val!r}")
            continue
        values[(section, key)] = val

    cfg = ScenarioConfig()
    for (section, key), val in values.items():
        setattr(cfg, key, val)

    # cross-field constraints
    if cfg.dx >= cfg.x_max:
        errors.append(f"grid: dx = {cfg.dx!r} must be smaller than x_max = {cfg.x_max!r}")
    if cfg.family == "box" and cfg.x_hi <= cfg.x_lo:
        errors.append("initial: box needs x_lo < x_hi")
    if cfg.family == "custom_table" and not cfg.path:
        errors.append("initial: custom_table needs a path")
    if cfg.family != "custom_table":
        support_hi = {"equilibrium_bump": 8.0, "box": cfg.x_hi,
                      "shifted_gaussian": cfg.center + 8 * cfg.width}[cfg.family]
        if support_hi > cfg.x_max / 4.0:
            errors.append(
                "initial: datum must be supported in the first quarter of the domain"
            )
    if cfg.transport == "muscl2" and cfg.cfl > 0.5:
        errors.append("solver: muscl2 transport needs cfl <= 0.5")
    if errors:
        raise ConfigParseError(errors)
    try:
        cfg.solver_config()
    except ConfigurationError as exc:
        raise ConfigParseError([str(exc)]) from exc
    return cfg


def format_config(cfg: ScenarioConfig) -> str:
    """Inverse of parse_config for documentation and golden files."""
    damping = "" if cfg.damping is None else repr(cfg.damping)
    dt_cap = "" if cfg.dt_cap is None else repr(cfg.dt_cap)
    decades = ",".join(repr(d) for d in cfg.decades)
    return (
        "[model]\n"
        f"kind = {cfg.kind}\n"
        f"velocity_nodes = {cfg.velocity_nodes}\n"
        f"v_max = {cfg.v_max!r}\n\n"
        "[grid]\n"
        f"x_max = {cfg.x_max!r}\n"
        f"dx = {cfg.dx!r}\n\n"
        "[initial]\n"
        f"family = {cfg.family}\n\n"
        "[time]\n"
        f"t_max = {cfg.t_max!r}\n\n"
        "[solver]\n"
        f"cfl = {cfg.cfl!r}\n"
        f"splitting = {cfg.splitting}\n"
        f"transport = {cfg.transport}\n"
        f"damping = {damping}\n"
        f"dt_cap = {dt_cap}\n\n"
        "[diagnostics]\n"
        f"sample_t0 = {cfg.sample_t0!r}\n"
        f"samples_per_decade = {cfg.samples_per_decade}\n"
        f"decades = {decades}\n\n"
        "[output]\n"
        f"name = {cfg.name}\n"
    )
