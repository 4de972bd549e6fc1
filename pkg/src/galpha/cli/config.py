"""Subcommand configurations: JSON document plus ``--set key=value`` overrides."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_CONTINUITIES = {"c0", "c1", "c2", "cp-1", "max"}


@dataclass
class CommonConfig:
    dim: int = 2
    p: int = 2
    continuity: str = "C1"
    T: float = 0.1
    rho_inf: Any = 0.5
    variant: str = "split"
    initial_projection: str = "l2"
    output_path: str | None = None


@dataclass
class ConvergenceSpaceConfig(CommonConfig):
    n_elements: list = field(default_factory=lambda: [8, 16, 32, 64])
    tau: float = 1e-3


@dataclass
class ConvergenceTimeConfig(CommonConfig):
    n_elements: int = 32
    tau: list = field(default_factory=lambda: [1e-3, 5e-4, 2.5e-4, 1.25e-4])
    reference: bool = True


@dataclass
class StabilityScanConfig:
    schemes: list = field(default_factory=lambda: ["split", "naive_lhs", "standard"])
    rho_inf: Any = field(default_factory=lambda: [0.0, 0.5, 1.0])
    sigma_min: float = 1e-8
    sigma_max: float = 1e8
    n_sigma: int = 200
    form: str = "printed"
    emit_grid: bool = False
    output_path: str | None = None


@dataclass
class CostBenchConfig:
    dim: int = 2
    p: int = 2
    continuity: str = "C1"
    dofs_per_direction: list = field(default_factory=lambda: [64, 128, 256, 512, 1024])
    steps: int = 10
    repeats: int = 3
    rho_inf: float = 0.5
    tau: float = 1e-3
    output_path: str | None = None


@dataclass
class SolveConfig(CommonConfig):
    n_elements: int = 16
    tau: float = 1e-3
    sample_every: int = 1
    snapshot_path: str | None = None


SUBCOMMANDS = {
    "convergence-space": ConvergenceSpaceConfig,
    "convergence-time": ConvergenceTimeConfig,
    "stability-scan": StabilityScanConfig,
    "cost-bench": CostBenchConfig,
    "solve": SolveConfig,
}


def parse_override(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def load_config(subcommand: str, path: str | None = None, overrides: list[str] = ()) -> Any:
    cls = SUBCOMMANDS[subcommand]
    data: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top-level JSON value must be an object")
    for item in overrides:
        key, value = parse_override(item)
        data[key] = value
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown key '{key}' for {subcommand} (allowed: {', '.join(sorted(names))})")
    cfg = cls(**data)
    validate(cfg)
    return cfg


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _number(key, value, *, positive=True, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key '{key}' must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"key '{key}' must be an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"key '{key}' must be positive, got {value!r}")
    return int(value) if integer else float(value)


def validate(cfg) -> None:
    fields = {f.name for f in dataclasses.fields(cfg)}
    if "dim" in fields and cfg.dim not in (2, 3):
        raise ConfigError(f"key 'dim' must be 2 or 3, got {cfg.dim!r}")
    if "p" in fields:
        cfg.p = _number("p", cfg.p, integer=True)
    if "continuity" in fields:
        if str(cfg.continuity).lower() not in _CONTINUITIES:
            raise ConfigError(f"key 'continuity' must be one of C0, C1, C2, Cp-1; got {cfg.continuity!r}")
        c = str(cfg.continuity).lower()
        if c in ("c1", "c2") and int(c[1]) != cfg.p - 1:
            raise ConfigError(f"key 'continuity' {cfg.continuity} requires p = {int(c[1]) + 1}")
    if "T" in fields:
        cfg.T = _number("T", cfg.T)
    if "rho_inf" in fields:
        rhos = _as_list(cfg.rho_inf)
        if not rhos:
            raise ConfigError("key 'rho_inf' must not be empty")
        for r in rhos:
            _number("rho_inf", r, positive=False)
            if not 0.0 <= r <= 1.0:
                raise ConfigError(f"key 'rho_inf' values must lie in [0, 1], got {r!r}")
    if "variant" in fields and cfg.variant not in ("standard", "split", "both"):
        raise ConfigError(f"key 'variant' must be standard, split or both; got {cfg.variant!r}")
    if "initial_projection" in fields and cfg.initial_projection not in ("l2", "ritz"):
        raise ConfigError(f"key 'initial_projection' must be l2 or ritz, got {cfg.initial_projection!r}")
    if "n_elements" in fields:
        ns = _as_list(cfg.n_elements)
        if not ns:
            raise ConfigError("key 'n_elements' must not be empty")
        for n in ns:
            if _number("n_elements", n, integer=True) < 2:
                raise ConfigError(f"key 'n_elements' values must be >= 2, got {n!r}")
    if "tau" in fields:
        taus = _as_list(cfg.tau)
        if not taus:
            raise ConfigError("key 'tau' must not be empty")
        for t in taus:
            _number("tau", t)
    for key in ("sample_every", "steps", "repeats", "n_sigma"):
        if key in fields:
            _number(key, getattr(cfg, key), integer=True)
    for key in ("sigma_min", "sigma_max"):
        if key in fields:
            _number(key, getattr(cfg, key))
    if "sigma_min" in fields and not cfg.sigma_min < cfg.sigma_max:
        raise ConfigError("key 'sigma_min' must be smaller than 'sigma_max'")
    if "form" in fields and cfg.form not in ("printed", "scheme"):
        raise ConfigError(f"key 'form' must be printed or scheme, got {cfg.form!r}")
    if "schemes" in fields:
        for s in _as_list(cfg.schemes):
            if str(s).lower() not in ("split", "naive_lhs", "naive", "standard"):
                raise ConfigError(f"key 'schemes' has unknown scheme {s!r}")
    if "dofs_per_direction" in fields:
        ds = _as_list(cfg.dofs_per_direction)
        if len(ds) < 2:
            raise ConfigError("key 'dofs_per_direction' needs at least two sizes for a slope")
        for d in ds:
            if _number("dofs_per_direction", d, integer=True) < 2:
                raise ConfigError(f"key 'dofs_per_direction' values must be >= 2, got {d!r}")
    for key in ("emit_grid", "reference"):
        if key in fields and not isinstance(getattr(cfg, key), bool):
            raise ConfigError(f"key '{key}' must be true or false")
