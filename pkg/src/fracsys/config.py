"""Run configuration: INI-style ``key = value`` text with section headers.

Recognised sections and keys (everything except ``[params]`` is optional)::

    [params]      s, p, N, mu1, mu2, beta
    [grid]        n, L
    [tolerances]  gs_tol, eig_tol, root_tol, grid_tol, descent_tol
    [run]         seed, restarts, K, workers
    [landscape]   tau_lo, tau_hi, points
    [sweep]       variable, lo, hi, count, spacing (linear | log)

Unknown sections or keys are rejected so that typos do not pass silently.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .coupling_algebra import SystemParams
from .errors import ConfigError, ConstraintError
from .spectral_core import Grid, default_grid

__all__ = ["RunConfig", "SweepAxis", "load_config", "parse_config", "MODES"]

MODES = ("analyze", "ground-state", "landscape", "nondegen", "rayleigh", "sweep")

_SCHEMA = {
    "params": {"s": float, "p": float, "N": int, "mu1": float, "mu2": float, "beta": float},
    "grid": {"n": int, "L": float},
    "tolerances": {"gs_tol": float, "eig_tol": float, "root_tol": float, "grid_tol": float,
                   "descent_tol": float},
    "run": {"seed": int, "restarts": int, "K": int, "workers": int},
    "landscape": {"tau_lo": float, "tau_hi": float, "points": int},
    "sweep": {"variable": str, "lo": float, "hi": float, "count": int, "spacing": str},
}
_REQUIRED = {"params": ("s", "p", "N", "mu1", "mu2", "beta"),
             "sweep": ("variable", "lo", "hi", "count")}

DEFAULT_TOLERANCES = {"gs_tol": 1e-10, "eig_tol": 0.0, "root_tol": 1e-10, "grid_tol": 1e-6,
                      "descent_tol": 1e-8}


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    grid_n: int
    grid_L: float
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    restarts: int = 8
    K: int = 8
    workers: int = 4
    tau_lo: float = 1e-3
    tau_hi: float = 1e3
    points: int = 2001
    sweep: SweepAxis | None = None

    @property
    def grid(self) -> Grid:
        return Grid(self.params.N, self.grid_n, self.grid_L)

    def with_overrides(self, **kw) -> RunConfig:
        tol = dict(self.tolerances)
        for key in list(kw):
            if key in tol:
                value = kw.pop(key)
                if value is not None:
                    tol[key] = value
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, tolerances=tol, **kw)
        _validate(cfg)
        return cfg


def _convert(section, key, raw, kind, lineno):
    where = f"[{section}] {key}" + (f" (line {lineno})" if lineno else "")
    try:
        if kind is int:
            value = int(raw, 0) if raw.strip().lower().startswith("0x") else int(float(raw))
            if float(raw) != value:
                raise ValueError
            return value
        if kind is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{where}: cannot read {raw!r} as {kind.__name__}") from None


def _line_numbers(text: str) -> dict:
    """(section, key) -> 1-based line number, for diagnostics."""
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
        elif section and ("=" in stripped or ":" in stripped) and not stripped.startswith(("#", ";")):
            key = stripped.replace(":", "=", 1).split("=", 1)[0].strip()
            out[(section, key)] = i
    return out


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case sensitive (N vs n)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    lines = _line_numbers(text)

    data = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        data[section] = {}
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                ln = lines.get((section, key))
                raise ConfigError(f"{source}: unknown key [{section}] {key}" + (f" (line {ln})" if ln else ""))
            data[section][key] = _convert(section, key, raw, _SCHEMA[section][key],
                                          lines.get((section, key)))
    for section, keys in _REQUIRED.items():
        if section == "sweep" and section not in data:
            continue
        missing = [k for k in keys if k not in data.get(section, {})]
        if missing:
            raise ConfigError(f"{source}: [{section}] is missing {', '.join(missing)}")

    try:
        params = SystemParams(**data["params"])
    except ConstraintError as exc:
        raise ConfigError(f"{source}: [params] {exc}") from None
    base = default_grid(params.N)
    grid = data.get("grid", {})
    tolerances = dict(DEFAULT_TOLERANCES, **data.get("tolerances", {}))
    sweep = None
    if "sweep" in data:
        sweep = SweepAxis(**data["sweep"])
    cfg = RunConfig(
        params=params,
        grid_n=grid.get("n", base.n),
        grid_L=grid.get("L", base.L),
        tolerances=tolerances,
        sweep=sweep,
        **data.get("run", {}),
        **data.get("landscape", {}),
    )
    _validate(cfg, source)
    return cfg


def _validate(cfg: RunConfig, source: str = "<config>"):
    try:
        cfg.grid
    except ValueError as exc:
        raise ConfigError(f"{source}: [grid] {exc}") from None
    for key, value in cfg.tolerances.items():
        if key == "eig_tol":
            if value < 0:
                raise ConfigError(f"{source}: [tolerances] eig_tol must be >= 0")
        elif not value > 0:
            raise ConfigError(f"{source}: [tolerances] {key} must be positive")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        raise ConfigError(f"{source}: [run] seed must be an unsigned 64-bit integer")
    if cfg.restarts < 0 or cfg.workers < 1 or not 1 <= cfg.K <= 40:
        raise ConfigError(f"{source}: [run] needs restarts >= 0, workers >= 1, 1 <= K <= 40")
    if not 0 < cfg.tau_lo < cfg.tau_hi or cfg.points < 2:
        raise ConfigError(f"{source}: [landscape] needs 0 < tau_lo < tau_hi and points >= 2")
    sw = cfg.sweep
    if sw is not None:
        if sw.variable not in ("s", "p", "mu1", "mu2", "beta"):
            raise ConfigError(f"{source}: [sweep] variable must be one of s, p, mu1, mu2, beta")
        if sw.spacing not in ("linear", "log"):
            raise ConfigError(f"{source}: [sweep] spacing must be linear or log")
        if sw.count < 1 or sw.hi < sw.lo or (sw.spacing == "log" and sw.lo <= 0):
            raise ConfigError(f"{source}: [sweep] needs count >= 1, lo <= hi (lo > 0 for log)")
        for value in (sw.lo, sw.hi):
            try:
                cfg.params.with_(**{sw.variable: value})
            except ConstraintError as exc:
                raise ConfigError(f"{source}: [sweep] {sw.variable}={value} is inadmissible: {exc}") from None


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))
