"""Command-line entry point.

Exit codes: 0 success, 2 infeasible scenario, 3 solver failure, 4 bad config
or arguments.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

import numpy as np

from ..array_model import steering_vector
from ..closed_form import su_solve
from .config import DEFAULT_TRIALS_PER_POINT, SWEEP_OUTPUTS, ConfigError, ScenarioConfig, SweepSpec
from .runner import (
    draw_channels, emit_beampattern, exit_status, run_scenario, run_sweep, theta_grid_deg,
    validate_outage, validation_csv,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3, 4
FULL_TRIALS = 1000


def _interleave(w):
    out = np.empty(2 * len(w))
    out[0::2] = w.real
    out[1::2] = w.imag
    return out.tolist()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_values(text, param):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--values: {exc}") from exc
    if param in ("n_antennas", "n_users"):
        if any(v != int(v) for v in vals):
            raise ConfigError(f"{param} values must be integers")
        vals = [int(v) for v in vals]
    return vals


def cmd_solve(args, config):
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    result = run_scenario(config)
    doc = {
        "config_sha256": config.digest(),
        "feasible": result.feasible,
        "solution": json.loads(result.solution.to_text()) if result.solution else None,
        "report": asdict(result.report),
        "closed_form_delta": result.closed_form_delta,
    }
    _write(args.out, json.dumps(_jsonable(doc), indent=2) + "\n")
    return exit_status(result)


def cmd_sweep(args, config):
    trials = FULL_TRIALS if args.full else args.trials
    outputs = tuple(args.outputs.split(",")) if args.outputs else ("sum_rate",)
    spec = SweepSpec(args.param, tuple(_parse_values(args.values, args.param)), trials, outputs)
    table = run_sweep(config, spec, workers=args.workers)
    _write(args.out, table.to_csv())
    return EXIT_OK


def cmd_beampattern(args, config):
    grid = np.radians(theta_grid_deg(args.grid_step_deg))
    result = run_scenario(config)
    code = exit_status(result)
    if code != EXIT_OK:
        return code
    _write(args.out, emit_beampattern(config, result.w_set, grid))
    return EXIT_OK


def cmd_validate(args, config):
    if args.mc_trials < 1:
        raise ConfigError("--mc-trials must be at least 1")
    result = run_scenario(config)
    code = exit_status(result)
    if code != EXIT_OK:
        return code
    _write(args.out, validation_csv(config, validate_outage(result, args.mc_trials)))
    return EXIT_OK


def cmd_closed_form(args, config):
    if config.n_users != 1:
        raise ConfigError("closed-form needs a single-user config")
    if args.epsilon < 0:
        raise ConfigError("--epsilon must be nonnegative")
    user = config.users[0]
    channels = draw_channels(config)
    a = steering_vector(config.array, config.theta0)
    sol = su_solve(channels.nominal[0], a, user.gamma, config.noise_var, user.sigma_delta,
                   args.epsilon, config.power_budget)
    doc = {
        "config_sha256": config.digest(),
        "feasible": sol.feasible,
        "branch": sol.branch.value,
        "rho": sol.rho,
        "lambda_threshold": sol.lambda_threshold,
        "radar_gain": sol.radar_gain(a),
        "w": _interleave(sol.w),
    }
    _write(args.out, json.dumps(_jsonable(doc), indent=2) + "\n")
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dfrc-outage",
        description="Outage-constrained radar-communication beamforming experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output file, or - for stdout")
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "solve one scenario and write the solution and metrics as JSON")
    p.add_argument("--seed", type=int, help="override the config seed")

    p = add("sweep", cmd_sweep, "Monte Carlo sweep over one parameter, written as CSV")
    p.add_argument("--param", required=True, help="gamma_db, outage_p, n_antennas, n_users or theta0_deg")
    p.add_argument("--values", required=True, help="comma-separated parameter values")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS_PER_POINT, help="channel draws per point")
    p.add_argument("--full", action="store_true", help=f"use {FULL_TRIALS} draws per point")
    p.add_argument("--outputs", help=f"comma-separated metrics from {','.join(SWEEP_OUTPUTS)}")
    p.add_argument("--workers", type=int, default=1, help="worker processes")

    p = add("beampattern", cmd_beampattern, "normalized beampattern of the solved scenario as CSV")
    p.add_argument("--grid-step-deg", type=float, default=0.1)

    p = add("validate-outage", cmd_validate, "Monte Carlo outage check of the solved scenario")
    p.add_argument("--mc-trials", type=int, default=10_000)

    p = add("closed-form", cmd_closed_form, "single-user closed-form beamformer")
    p.add_argument("--epsilon", type=float, required=True, help="outage margin, -ln(p)")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = ScenarioConfig.load(args.config)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
