"""Command-line interface: synth, forward, invert, verify, repro.

Every run writes a resolved configuration (all values explicit, seeds
included) next to its outputs, so any result can be reproduced exactly.
Wall-clock timings go to a separate ``timings.txt`` because everything
else a run writes is byte-deterministic for a fixed seed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GravTvError
from .fileio import (dump_sensitivity, load_sensitivity, parse_sections_spec,
                     read_config, read_data_grid, read_model_volume,
                     write_config, write_data_grid, write_model_volume,
                     write_section, write_vtk_volume)
from .forward import assemble_sensitivity, predict
from .inversion import InversionResult, invert
from .mesh import SurveyGrid
from .presets import RunConfig, preset, run_config_from_tables, with_q
from .synthetic import (add_noise, build_dikes_model, build_multibody_model,
                        noisy_prior_model)
from .verify import run_all

log = logging.getLogger("gravtv")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_LOG_COLUMNS = "k direction alpha chi2 re rel_change h_norm"


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("GRAVTV_OUTDIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_run_config(args) -> RunConfig:
    if getattr(args, "preset", None):
        return preset(args.preset)
    if getattr(args, "config", None):
        return run_config_from_tables(read_config(args.config))
    raise ValueError("either --preset or --config is required")


def _truth_model(cfg: RunConfig):
    if cfg.model_preset == "dikes":
        return build_dikes_model(cfg.mesh).values
    if cfg.model_preset == "multibody":
        return build_multibody_model(cfg.mesh).values
    if cfg.model_preset == "none":
        return None
    raise ValueError(f"unknown model preset {cfg.model_preset!r}")


def _prior_model(cfg: RunConfig, truth):
    if cfg.prior == "zero":
        return None
    if cfg.prior == "noisy-truth":
        if truth is None:
            raise ValueError("prior 'noisy-truth' needs a truth model")
        return noisy_prior_model(truth, seed=cfg.prior_seed)
    raise ValueError(f"unknown prior {cfg.prior!r}")


def _sensitivity(cfg: RunConfig, grid, cache: str | None):
    if cache and Path(cache).exists():
        log.info("loading sensitivity matrix from %s", cache)
        return load_sensitivity(cache, cfg.mesh, grid)
    t0 = time.perf_counter()
    S = assemble_sensitivity(cfg.mesh, grid)
    log.info("assembled %dx%d sensitivity in %.1fs",
             *S.shape, time.perf_counter() - t0)
    if cache:
        dump_sensitivity(cache, S)
    return S


def _floor_stds(eta: np.ndarray, d_exact: np.ndarray) -> np.ndarray:
    """Noise-free runs still need positive stds for the data weighting."""
    if np.all(eta > 0):
        return eta
    scale = np.linalg.norm(d_exact) / max(1, np.sqrt(d_exact.size))
    floor = 1e-8 * (scale if scale > 0 else 1.0)
    return np.maximum(eta, floor)


def _write_resolved(out: Path, cfg: RunConfig) -> None:
    write_config(out / "resolved.ini", cfg.to_tables())


def _write_iteration_log(path, result: InversionResult) -> None:
    with open(path, "w") as fh:
        fh.write(_LOG_COLUMNS + "\n")
        for r in result.records:
            re_s = "%.17g" % r.re if r.re is not None else "nan"
            fh.write(f"{r.k} {r.direction} {'%.17g' % r.alpha} "
                     f"{'%.17g' % r.chi2} {re_s} {'%.17g' % r.rel_change} "
                     f"{'%.17g' % r.h_norm}\n")


def _write_timings(path, result: InversionResult, total_s: float) -> None:
    with open(path, "w") as fh:
        fh.write("# wall-clock diagnostics; not byte-reproducible\n")
        fh.write("k time_s\n")
        for r in result.records:
            fh.write(f"{r.k} {r.time_s:.3f}\n")
        fh.write(f"total {total_s:.3f}\n")


def _write_summary(path, rows: list[dict]) -> None:
    cols = ["q", "re", "alpha", "K", "chi2", "chi2_target", "converged",
            "reason"]
    with open(path, "w") as fh:
        fh.write(" ".join(cols) + "\n")
        for row in rows:
            fh.write(" ".join(_summary_cell(row[c]) for c in cols) + "\n")


def _summary_cell(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return "%.6g" % value
    if value is None:
        return "-"
    return str(value)


def _summary_row(q: int, result: InversionResult) -> dict:
    alpha = result.records[-1].alpha if result.records else float("nan")
    return {"q": q, "re": result.re, "alpha": alpha, "K": result.k_final,
            "chi2": result.chi2, "chi2_target": result.chi2_target,
            "converged": result.converged, "reason": result.reason}


# ------------------------------------------------------------ subcommands

def cmd_synth(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    truth = _truth_model(cfg)
    if truth is None:
        raise ValueError("synth needs a model preset (dikes or multibody)")
    grid = cfg.build_survey()
    S = _sensitivity(cfg, grid, args.sensitivity_cache)
    d_exact = predict(S, truth)
    d_obs, eta = add_noise(d_exact, cfg.noise.a, cfg.noise.b, cfg.noise.seed)
    eta = _floor_stds(eta, d_exact)
    write_model_volume(out / "truth_model.txt", cfg.mesh, truth)
    write_data_grid(out / "data_exact.txt", grid.stations, d_exact)
    write_data_grid(out / "data_observed.txt", grid.stations, d_obs)
    write_data_grid(out / "noise_std.txt", grid.stations, eta)
    _write_resolved(out, cfg)
    print(f"synth: wrote {grid.m} stations to {out}")
    return EXIT_OK


def cmd_forward(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    shape, values = read_model_volume(args.model)
    if shape != cfg.mesh.shape:
        raise ValueError(
            f"model volume shape {shape} != mesh {cfg.mesh.shape}")
    grid = cfg.build_survey()
    S = _sensitivity(cfg, grid, args.sensitivity_cache)
    write_data_grid(out / "data_predicted.txt", grid.stations,
                    predict(S, values))
    _write_resolved(out, cfg)
    print(f"forward: wrote {grid.m} predictions to {out}")
    return EXIT_OK


def _run_inversion(cfg: RunConfig, grid, d_obs, eta, truth, cache):
    S = _sensitivity(cfg, grid, cache)
    inv_cfg = cfg.inversion
    prior = _prior_model(cfg, truth)
    if prior is not None:
        inv_cfg = replace(inv_cfg, m_apr=prior)
    t0 = time.perf_counter()
    result = invert(d_obs, S, eta, inv_cfg, m_exact=truth)
    return result, S, time.perf_counter() - t0


def cmd_invert(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    for path in (args.data, args.noise_std):
        if not Path(path).exists():
            raise FileNotFoundError(f"required input file missing: {path}")
    stations, d_obs = read_data_grid(args.data)
    stations_eta, eta = read_data_grid(args.noise_std)
    if stations.shape != stations_eta.shape or not np.allclose(
            stations, stations_eta):
        raise ValueError(
            f"stations in {args.noise_std} do not match {args.data}")
    grid = SurveyGrid(stations)
    truth = None
    if args.truth:
        t_shape, truth = read_model_volume(args.truth)
        if t_shape != cfg.mesh.shape:
            raise ValueError(
                f"truth volume shape {t_shape} != mesh {cfg.mesh.shape}")
    elif cfg.model_preset != "none":
        truth = _truth_model(cfg)
    result, S, total_s = _run_inversion(
        cfg, grid, d_obs, eta, truth, args.sensitivity_cache)

    write_model_volume(out / "model.txt", cfg.mesh, result.model)
    write_vtk_volume(out / "model.vtk", cfg.mesh, result.model)
    write_data_grid(out / "data_predicted.txt", grid.stations,
                    predict(S, result.model))
    _write_iteration_log(out / "iterations.log", result)
    _write_timings(out / "timings.txt", result, total_s)
    _write_summary(out / "summary.txt",
                   [_summary_row(cfg.inversion.q, result)])
    _write_resolved(out, cfg)
    if args.sections:
        for axis, coord in parse_sections_spec(args.sections):
            name = f"section_{axis}{'%g' % coord}.txt"
            write_section(out / name, cfg.mesh, result.model, axis, coord)
    print(f"invert: K={result.k_final} chi2={result.chi2:.1f} "
          f"(target {result.chi2_target:.1f}) reason={result.reason}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(quick=args.quick)
    for res in results:
        print(res)
    n_fail = sum(not r.passed for r in results)
    print(f"verify: {len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_NUMERICAL


_REPRO_QS = {"table1": (100, 300, 500), "table2": (250, 500)}


def cmd_repro(args) -> int:
    base = preset("dikes-table1" if args.table == "table1" else
                  ("multibody-full" if args.full_scale else
                   "multibody-table2"))
    if args.seed is not None:
        base = replace(base, noise=replace(base.noise, seed=args.seed),
                       inversion=replace(base.inversion, seed=args.seed + 1))
    qs = ([int(s) for s in args.qs.split(",")] if args.qs
          else list(_REPRO_QS[args.table]))
    out = _out_dir(args)
    truth = _truth_model(base)
    grid = base.build_survey()
    S = _sensitivity(base, grid, args.sensitivity_cache)
    d_exact = predict(S, truth)
    d_obs, eta = add_noise(d_exact, base.noise.a, base.noise.b,
                           base.noise.seed)
    eta = _floor_stds(eta, d_exact)
    write_data_grid(out / "data_observed.txt", grid.stations, d_obs)
    write_data_grid(out / "noise_std.txt", grid.stations, eta)
    write_model_volume(out / "truth_model.txt", base.mesh, truth)

    rows, timing_lines = [], []
    for q in qs:
        cfg = with_q(base, q)
        log.info("repro %s: q=%d", args.table, q)
        t0 = time.perf_counter()
        result = invert(d_obs, S, eta, cfg.inversion, m_exact=truth)
        elapsed = time.perf_counter() - t0
        _write_iteration_log(out / f"iterations_q{q}.log", result)
        write_model_volume(out / f"model_q{q}.txt", base.mesh, result.model)
        rows.append(_summary_row(q, result))
        timing_lines.append(f"q={q} {elapsed:.1f}s K={result.k_final}")
        print(f"repro {args.table} q={q}: K={result.k_final} "
              f"chi2={result.chi2:.1f} RE={result.re:.4f}")
    _write_summary(out / "summary.txt", rows)
    _write_resolved(out, base)
    with open(out / "timings.txt", "w") as fh:
        fh.write("# wall-clock diagnostics; not byte-reproducible\n")
        fh.write("\n".join(timing_lines) + "\n")
    return EXIT_OK


# -------------------------------------------------------------- wiring

def _add_config_options(p, model=False):
    p.add_argument("--preset", help="named configuration (see presets)")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--out", help="output directory "
                   "(default: $GRAVTV_OUTDIR or the working directory)")
    p.add_argument("--sensitivity-cache",
                   help="binary cache for the sensitivity matrix")
    if model:
        p.add_argument("--model", required=True,
                       help="model volume file (flat i j k x y z density)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravtv",
        description="TV-regularized 3-D gravity inversion via randomized GSVD")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS threads (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic data for a preset model")
    _add_config_options(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("forward", help="predict data for a model volume")
    _add_config_options(p, model=True)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("invert", help="run the TV inversion on a data grid")
    _add_config_options(p)
    p.add_argument("--data", required=True, help="observed data grid")
    p.add_argument("--noise-std", required=True,
                   help="per-datum noise standard deviations")
    p.add_argument("--truth", help="true model volume for error reporting")
    p.add_argument("--sections",
                   help='plane sections to export, e.g. "z=100,y=725"')
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify", help="run the independent-oracle check suite")
    p.add_argument("--quick", action="store_true",
                   help="fewer instances per check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("repro", help="reproduce a benchmark table")
    p.add_argument("table", choices=("table1", "table2"))
    p.add_argument("--qs", help="comma-separated sketch ranks to run")
    p.add_argument("--seed", type=int, help="override the preset seeds")
    p.add_argument("--full-scale", action="store_true",
                   help="table2 at full 100x60x10 size (hours)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--sensitivity-cache")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads is not None:
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=args.threads):
                return args.func(args)
        return args.func(args)
    except (GravTvError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
