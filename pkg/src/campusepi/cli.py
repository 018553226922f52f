"""Command-line interface: simulate | stats | r0 | fit | ensemble | policy | serve.

Every command that draws random numbers takes --seed; when omitted, a default
of 0 is used and logged so runs stay reproducible.  Output directories always
receive a manifest.json echoing the effective configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import abc as abc_mod
from . import dataio, ensemble as ensemble_mod, policy as policy_mod, rzero
from .config import RunConfig, config_to_dict, load_config
from .model import simulate
from .peaks import detect_peaks, weekly_cases

log = logging.getLogger("campusepi")

DEFAULT_SEED = 0


def _sim_config(config: RunConfig) -> abc_mod.SimConfig:
    return abc_mod.SimConfig(
        params=config.params,
        init=config.initial_state(),
        horizon=config.horizon,
        thresholds=config.thresholds,
    )


def _resolve_seed(args) -> int:
    if args.seed is None:
        log.info("no --seed given; defaulting to %d", DEFAULT_SEED)
        return DEFAULT_SEED
    return args.seed


def _prepare_outdir(args, config: RunConfig, command: str, seed: int) -> Path:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    dataio.write_manifest(outdir, command, seed, config_to_dict(config))
    return outdir


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    seed = _resolve_seed(args)
    outdir = _prepare_outdir(args, config, "simulate", seed)
    trajectory = simulate(
        config.params, config.initial_state(), config.horizon, seed=seed
    )
    dataio.write_trajectory_csv(trajectory, outdir / "trajectory.csv")
    weekly = weekly_cases(trajectory)
    dataio.write_weekly_csv(weekly, outdir / "weekly_cases.csv")
    peaks = detect_peaks(weekly, config.thresholds.peak_floor)
    print(json.dumps({
        "outdir": str(outdir),
        "cumulative_cases": int(weekly.sum()),
        "peaks": peaks.as_records(),
    }, sort_keys=True))
    return 0


def _cmd_stats(args) -> int:
    config = load_config(args.config)
    series = dataio.parse_observed_csv(args.observed)
    peaks = detect_peaks(series.values, config.thresholds.peak_floor)
    print(json.dumps({"peaks": peaks.as_records()}, sort_keys=True))
    return 0


def _cmd_r0(args) -> int:
    inputs = rzero.NextGenInputs(alpha=args.alpha, beta=args.beta)
    print(json.dumps({
        "alpha": args.alpha,
        "beta": args.beta,
        "spectral": rzero.r0_spectral(inputs),
        "closed_form": rzero.r0_closed_form(args.alpha, args.beta),
    }, sort_keys=True))
    return 0


def _cmd_fit(args) -> int:
    config = load_config(args.config)
    seed = _resolve_seed(args)
    series = dataio.parse_observed_csv(args.observed)
    observed = detect_peaks(series.values, config.thresholds.peak_floor)
    if observed.count == 0:
        print("error: observed series has no qualifying peaks; nothing to fit",
              file=sys.stderr)
        return 2
    outdir = _prepare_outdir(args, config, "fit", seed)
    grid = abc_mod.build_grid(config.grid)
    n_traj = args.n_traj if args.n_traj is not None else config.n_trajectories
    posterior, surface = abc_mod.run_abc(
        grid, observed, n_traj, _sim_config(config), seed, n_jobs=args.jobs
    )
    dataio.write_posterior_csv(posterior, outdir / "posterior_draws.csv")
    dataio.write_surface_csv(surface, outdir / "acceptance_surface.csv")
    try:
        intervals = abc_mod.marginal_ci(posterior, level=args.level)
    except abc_mod.NoAcceptancesError as err:
        print(f"error: {err} (maximum acceptance rate anywhere: "
              f"{surface.max_rate:.4f})", file=sys.stderr)
        return 1
    dataio.write_intervals_json(
        intervals, outdir / "intervals.json",
        extra={"total_accepted": posterior.total_accepted},
    )
    print(json.dumps({
        "outdir": str(outdir),
        "total_accepted": posterior.total_accepted,
        "intervals": intervals.as_dict(),
    }, sort_keys=True))
    return 0


def _cmd_ensemble(args) -> int:
    config = load_config(args.config)
    seed = _resolve_seed(args)
    posterior = dataio.read_posterior_csv(args.posterior)
    outdir = _prepare_outdir(args, config, "ensemble", seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 5))))
    draws = ensemble_mod.draw_posterior_params(posterior, args.curves, rng)
    matrix = ensemble_mod.simulate_ensemble(draws, _sim_config(config), seed)
    band = ensemble_mod.functional_band(matrix)
    dataio.write_band_csv(band, outdir / "band.csv")
    dataio.write_curves_csv(matrix, outdir / "curves.csv")
    print(json.dumps({
        "outdir": str(outdir),
        "curves": int(matrix.curves.shape[0]),
        "outliers": [int(i) for i in band.outliers],
        "median_peak_week": int(np.argmax(band.median)) + 1,
    }, sort_keys=True))
    return 0


def _cmd_policy(args) -> int:
    config = load_config(args.config)
    seed = _resolve_seed(args)
    posterior = dataio.read_posterior_csv(args.posterior)
    outdir = _prepare_outdir(args, config, "policy", seed)
    strategies = policy_mod.default_strategy_grid()
    reports = policy_mod.run_policy_sweep(
        strategies, posterior, args.draws, _sim_config(config), seed,
        common_random_numbers=not args.independent_streams,
    )
    dataio.write_policy_report_json(reports, outdir / "policy_report.json")
    for report in reports:
        matrix = ensemble_mod.CurveMatrix(
            curves=np.vstack([
                report.daily_cases_median,
                report.daily_cases_q25,
                report.daily_cases_q75,
            ]).astype(np.int64),
            draws=np.zeros((3, 3)),
        )
        safe = report.strategy.label.replace(" ", "_").replace("%", "pct")
        dataio.write_curves_csv(matrix, outdir / f"curve_{safe}.csv")
    print(json.dumps({
        "outdir": str(outdir),
        "strategies": [r.strategy.label for r in reports],
    }, sort_keys=True))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(
        output_dir=args.out,
        static_dir=args.static_dir,
        n_jobs=args.jobs,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="campusepi",
        description="Campus epidemic simulation, fitting and policy analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, config=True, seed=True, out=False):
        if config:
            p.add_argument("--config", help="TOML config file (defaults apply if omitted)")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help=f"base random seed (default: {DEFAULT_SEED}, logged)")
        if out:
            p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("simulate", help="simulate one trajectory and export CSVs")
    add_common(p, out=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("stats", help="peak statistics of a weekly-series CSV")
    p.add_argument("--observed", required=True, help="CSV with columns week,cases")
    add_common(p, seed=False)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("r0", help="basic reproduction number for (alpha, beta)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=_cmd_r0)

    p = sub.add_parser("fit", help="rejection-sample the parameter grid against observed peaks")
    p.add_argument("--observed", required=True, help="CSV with columns week,cases")
    p.add_argument("--n-traj", type=int, default=None,
                   help="trajectories per grid point (default from config)")
    p.add_argument("--level", type=float, default=0.95, help="credible level")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    add_common(p, out=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("ensemble", help="posterior-predictive curves and functional band")
    p.add_argument("--posterior", required=True, help="posterior_draws.csv from fit")
    p.add_argument("--curves", type=int, default=1000, help="ensemble size")
    add_common(p, out=True)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("policy", help="sweep the nine surveillance strategies")
    p.add_argument("--posterior", required=True, help="posterior_draws.csv from fit")
    p.add_argument("--draws", type=int, default=200, help="posterior draws per strategy")
    p.add_argument("--independent-streams", action="store_true",
                   help="disable common random numbers across strategies")
    add_common(p, out=True)
    p.set_defaults(func=_cmd_policy)

    p = sub.add_parser("serve", help="run the HTTP API (and dashboard, if built)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None,
                   help="directory with the built dashboard (e.g. frontend/dist)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers per job")
    add_common(p, config=False, seed=False, out=True)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
