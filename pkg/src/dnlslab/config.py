"""Experiment configuration: defaults, TOML files and command-line overrides.

A config file is a flat TOML table whose keys are the field names of
:class:`ExperimentConfig`; unknown keys are rejected.  Lengths are in the
nondimensional units of the equation, times likewise.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = (
    "soliton-dump",
    "kappa0-table",
    "evolve",
    "stability-sweep",
    "remark33-sweep",
    "variational-check",
    "corollary-constant",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str = ""
    out: str = "results"
    seed: int = 0
    threads: int = 1
    # grid; None lets the experiment pick its own box
    num_points: int | None = None
    half_width: float | None = None
    # physics; c = None selects the degenerate speed 2 kappa0(b) sqrt(omega)
    omega: float = 1.0
    c: float | None = None
    b: float = 0.0
    amplitude: float = 1.0
    alphas: tuple = (0.04, 0.02, 0.01, 0.005)
    rs: tuple = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)
    bs: tuple = (0.0, 0.25, 0.5, 1.0, 2.0)
    rows: tuple = ((0.5, None, 0.5), (1.0, None, 0.5), (2.0, None, 0.5), (1.0, 1.0, 0.5))
    # solver
    dt: float | None = None
    horizon: float | None = None
    record_every: int | None = None
    dealias_fraction: float = 1.0
    steps: int = 20000
    preconditioner: str = "h1"
    tol: float = 1e-12

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if (self.num_points is None) != (self.half_width is None):
            raise ConfigError("resolution needs both num_points and half_width")
        if self.num_points is not None and (self.num_points < 4 or self.num_points % 2):
            raise ConfigError("num_points must be an even integer >= 4")
        if self.half_width is not None and not self.half_width > 0:
            raise ConfigError("half_width must be positive")
        if self.b < 0 or any(b < 0 for b in self.bs):
            raise ConfigError("the quintic coefficient b must be non-negative")
        if not self.omega > 0:
            raise ConfigError("omega must be positive")
        if self.c is not None and not -2 * math.sqrt(self.omega) < self.c <= 2 * math.sqrt(self.omega):
            raise ConfigError(f"speed c={self.c} outside (-2 sqrt(omega), 2 sqrt(omega)]")
        if any(a < 0 for a in self.alphas):
            raise ConfigError("alphas must be non-negative")
        if any(not r > 0 for r in self.rs):
            raise ConfigError("twist values r must be positive")
        for om, c, b in self.rows:
            if not om > 0 or b < 0:
                raise ConfigError(f"inadmissible variational row {(om, c, b)}")
            if c is not None and not -2 * math.sqrt(om) < c <= 2 * math.sqrt(om):
                raise ConfigError(f"inadmissible variational row {(om, c, b)}")
        for name in ("dt", "horizon"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"{name} must be positive")
        if self.preconditioner not in ("h1", "l2"):
            raise ConfigError("preconditioner must be 'h1' or 'l2'")
        return self

    def snapshot(self) -> dict:
        return asdict(self)


FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}
_LIST_FIELDS = {"alphas", "rs", "bs"}


def _coerce(key: str, value):
    if key in _LIST_FIELDS:
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list of numbers")
        return tuple(float(v) for v in value)
    if key == "rows":
        if not isinstance(value, list):
            raise ConfigError("rows must be a list of [omega, c, b] triples")
        return tuple(parse_row(v) for v in value)
    if key == "c" and value == "degenerate":
        return None
    if key in ("num_points", "seed", "threads", "record_every", "steps"):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer")
        return value
    if key in ("kind", "out", "preconditioner"):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number")
    return float(value)


def parse_row(v) -> tuple:
    """``[omega, c, b]`` with ``c`` a number or the string ``"degenerate"``."""
    if isinstance(v, str):
        v = [s.strip() for s in v.split(",")]
    if len(v) != 3:
        raise ConfigError(f"variational row needs three entries, got {v!r}")
    om, c, b = v
    c = None if c in ("degenerate", None) else float(c)
    return (float(om), c, float(b))


def load_toml(path) -> dict:
    """Read and type-check a config file; unknown keys raise :class:`ConfigError`."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = sorted(set(raw) - FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return {k: _coerce(k, v) for k, v in raw.items()}


def build_config(kind: str, file_values: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Defaults, then file values, then command-line overrides."""
    values = dict(file_values or {})
    if values.get("kind", kind) != kind:
        raise ConfigError(f"config file is for {values['kind']!r}, not {kind!r}")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["kind"] = kind
    if values.get("c") == "degenerate":
        values["c"] = None
    return ExperimentConfig(**values).validate()
