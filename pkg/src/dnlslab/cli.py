"""Command-line front end: ``dnlslab <experiment> [options]``.

Every run writes its CSV tables and SVG plots to ``--out`` and finishes with
``manifest.json`` (config, version, timing, file list, checks).  The exit
status is 0 when every check passed, 1 when any failed and 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .artifacts import OutputDir
from .config import ConfigError, ExperimentConfig, build_config, load_toml, parse_row
from .evolve import EvolveConfig
from .experiments import (
    corollary_constant_table,
    evolve_experiment,
    kappa0_table,
    remark33_sweep,
    soliton_dump,
    stability_sweep,
    variational_check,
)
from .grid import SpectralGrid
from .soliton import SolitonParams, kappa0, periodic_half_width

log = logging.getLogger("dnlslab")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _resolution(text: str) -> tuple[int, float]:
    try:
        n, L = text.split(",")
        return int(n), float(L)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,L (e.g. 1024,40), got {text!r}") from None


def _speed(text: str):
    if text == "degenerate":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'degenerate', got {text!r}") from None


def _rows(text: str) -> tuple:
    try:
        return tuple(parse_row(chunk) for chunk in text.split(";") if chunk.strip())
    except (ConfigError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnlslab",
        description="Solitons, degenerate thresholds and stability sweeps for the quintic derivative NLS.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML file with ExperimentConfig keys")
    common.add_argument("--out", metavar="DIR", help="output directory (default: results)")
    common.add_argument("--seed", type=int, help="random seed, recorded in the manifest")
    common.add_argument("--threads", type=int, help="worker threads for sweep rows")
    common.add_argument("--resolution", type=_resolution, metavar="N,L", help="grid points and half-width")
    common.add_argument("--dt", type=float, help="time step")
    common.add_argument("--horizon", type=float, help="final time")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    sub = parser.add_subparsers(dest="kind", required=True, metavar="experiment")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    def physics(p, with_c=True):
        p.add_argument("--omega", type=float, help="frequency (default 1)")
        if with_c:
            p.add_argument("--c", type=_speed, help="speed, or 'degenerate' for 2 kappa0 sqrt(omega) (default)")
        p.add_argument("--b", type=float, help="quintic coefficient (default 0)")

    p = add("soliton-dump", "Sample a soliton and tabulate its functionals.")
    physics(p)
    p = add("kappa0-table", "Degenerate speed ratio, threshold mass and corollary constant per b.")
    p.add_argument("--bs", type=_floats, help="comma-separated b values")
    p = add("evolve", "Evolve an amplitude-scaled soliton and export the trajectory.")
    physics(p)
    p.add_argument("--amplitude", type=float, help="initial amplitude factor (default 1)")
    p.add_argument("--record-every", type=int, dest="record_every", help="steps between records")
    p.add_argument("--dealias-fraction", type=float, dest="dealias_fraction", help="retained share of the band")
    p = add("stability-sweep", "Orbit distance of (1 + alpha) phi_{1, 2 kappa0} over the horizon.")
    physics(p, with_c=False)
    p.add_argument("--alphas", type=_floats, help="comma-separated amplitude perturbations")
    p = add("remark33-sweep", "c(r) = E M / P^2 for the twisted degenerate soliton.")
    p.add_argument("--b", type=float, help="quintic coefficient (default 0.5)")
    p.add_argument("--rs", type=_floats, help="comma-separated twist values")
    p = add("variational-check", "Constrained action minimization against the soliton family.")
    p.add_argument("--rows", type=_rows, help="'omega,c,b;...' with c a number or 'degenerate'")
    p.add_argument("--steps", type=int, help="iteration budget per row")
    p.add_argument("--preconditioner", choices=("h1", "l2"), help="gradient metric (default h1)")
    p = add("corollary-constant", "kappa0 sqrt(1 + kappa0^2) - kappa0^2 per b.")
    p.add_argument("--bs", type=_floats, help="comma-separated b values")
    return parser


_OVERRIDE_KEYS = ("out", "seed", "threads", "dt", "horizon", "omega", "c", "b", "amplitude", "record_every",
                  "dealias_fraction", "alphas", "rs", "bs", "rows", "steps", "preconditioner")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_values = load_toml(args.config) if args.config else {}
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    if args.resolution is not None:
        overrides["num_points"], overrides["half_width"] = args.resolution
    if args.kind == "remark33-sweep" and "b" not in file_values and overrides["b"] is None:
        overrides["b"] = 0.5
    return build_config(args.kind, file_values, overrides)


def _grid(cfg: ExperimentConfig, default: SpectralGrid | None) -> SpectralGrid | None:
    if cfg.num_points is None:
        return default
    return SpectralGrid(cfg.half_width, cfg.num_points)


def _soliton_params(cfg: ExperimentConfig) -> SolitonParams:
    if cfg.c is None:
        return kappa0(cfg.b, tol=max(cfg.tol, 1e-12)).params(cfg.omega)
    return SolitonParams(cfg.omega, cfg.c, cfg.b)


def _soliton_box(params: SolitonParams) -> SpectralGrid:
    if params.is_endpoint:
        return SpectralGrid(periodic_half_width(params, 128.0 / math.sqrt(params.omega)), 4096)
    return SpectralGrid(max(40.0, 30.0 / params.decay_rate), 1024)


def run_experiment(cfg: ExperimentConfig):
    kind = cfg.kind
    if kind == "kappa0-table":
        return kappa0_table(cfg.bs, tol=cfg.tol, threads=cfg.threads)
    if kind == "corollary-constant":
        return corollary_constant_table(cfg.bs, tol=cfg.tol)
    if kind == "soliton-dump":
        params = _soliton_params(cfg)
        return soliton_dump(params, _grid(cfg, _soliton_box(params)))
    if kind == "evolve":
        params = _soliton_params(cfg)
        dt = cfg.dt or 1e-3
        every = cfg.record_every or max(1, int(round(0.1 / dt)))
        ec = EvolveConfig(dt=dt, t_end=cfg.horizon or 1.0, b=cfg.b, dealias_fraction=cfg.dealias_fraction, record_every=every)
        return evolve_experiment(params, _grid(cfg, _soliton_box(params)), ec, amplitude=cfg.amplitude)
    if kind == "stability-sweep":
        return stability_sweep(cfg.alphas, cfg.b, omega=cfg.omega, horizon=cfg.horizon or 5.0, grid=_grid(cfg, None),
                               dt=cfg.dt or 1e-3, threads=cfg.threads)
    if kind == "remark33-sweep":
        return remark33_sweep(cfg.rs, cfg.b, grid=_grid(cfg, None))
    if kind == "variational-check":
        return variational_check(cfg.rows, grid=_grid(cfg, None), seed=cfg.seed, steps=cfg.steps,
                                 preconditioner=cfg.preconditioner, threads=cfg.threads)
    raise ConfigError(f"unknown experiment kind {kind!r}")


def execute(cfg: ExperimentConfig) -> tuple[int, dict]:
    """Run one experiment, write its files and manifest; return ``(exit_code, manifest)``."""
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    out = OutputDir(cfg.out)
    for name, table in result.tables.items():
        out.write_csv(name, table.header, table.rows)
    for name, svg in result.plots.items():
        out.write_svg(name, svg)
    manifest = {
        "tool": "dnlslab",
        "version": __version__,
        "experiment": cfg.kind,
        "seed": cfg.seed,
        "config": cfg.snapshot(),
        "started_utc": started.isoformat(),
        "wall_clock_seconds": time.perf_counter() - t0,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in result.checks],
        "passed": result.passed,
    }
    out.finalize(manifest)
    return (0 if result.passed else 1), manifest


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ConfigError, OSError) as exc:
        parser.error(str(exc))
    try:
        code, manifest = execute(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"dnlslab: error: {exc}", file=sys.stderr)
        return 2
    for c in manifest["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}" + (f"  [{c['detail']}]" if c["detail"] else ""))
    n_fail = sum(not c["passed"] for c in manifest["checks"])
    print(f"{cfg.kind}: {len(manifest['checks']) - n_fail} passed, {n_fail} failed; results in {cfg.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
