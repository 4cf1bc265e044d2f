"""Scenario solving, Monte Carlo sweeps and CSV output.

Every trial draws from its own random stream, derived from the config seed
and the trial index: channels come from stream (seed, trial, 0) and the
outage Monte Carlo from (seed, trial, 1).  Sweep points therefore share
their channel draws (common random numbers), and results do not depend on
how trials are distributed over worker processes.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..array_model import bartlett_power, steering_vector
from ..channel_model import ChannelSet, linear_to_db, make_rng, sample_nominal_channels
from ..closed_form import su_solve
from ..metrics import MetricReport, report
from ..chance_constraint import monte_carlo_outage
from ..sdp import PROBE_TOL, Status, check_beamformers, solve_p7

CHANNEL_STREAM = 0
OUTAGE_STREAM = 1
VALIDATION_STREAM = 2
POWER_FLOOR_DB = -300.0


@dataclass
class ScenarioResult:
    config: object
    channels: ChannelSet
    solution: object
    beamformers: list
    feasible: bool
    report: MetricReport
    closed_form_delta: float = None

    @property
    def w_set(self):
        return [bf.w for bf in self.beamformers] if self.beamformers else None

    @property
    def max_defect(self):
        if not self.beamformers:
            return float("nan")
        return max(bf.defect for bf in self.beamformers)


def draw_channels(config, trial=0):
    rng = make_rng(config.seed, trial, CHANNEL_STREAM)
    h = sample_nominal_channels(rng, config.n_users, config.array.n_antennas)
    return ChannelSet(h, config.users, config.noise_var)


def run_trial(config, trial=0, probe_tol=PROBE_TOL):
    """Solve one channel draw and evaluate its metrics."""
    channels = draw_channels(config, trial)
    try:
        sol = solve_p7(channels, config.array, config.theta0, config.power_budget, config.settings)
    except (np.linalg.LinAlgError, FloatingPointError):
        sol = None
    bfs = sol.beamformers() if sol is not None and sol.optimal else None
    feasible = bfs is not None and check_beamformers(
        channels, [bf.w for bf in bfs], config.power_budget, probe_tol)
    rng = make_rng(config.seed, trial, OUTAGE_STREAM)
    rep = report(channels, config.array, config.theta0, [bf.w for bf in bfs] if feasible else None,
                 rng, config.mc_trials, config.radar, feasible=feasible)
    return ScenarioResult(config, channels, sol, bfs, feasible, rep)


def run_scenario(config, probe_tol=PROBE_TOL):
    """Trial 0 of ``config``; single-user scenarios also carry the closed-form gap."""
    result = run_trial(config, 0, probe_tol)
    if config.n_users == 1 and result.solution is not None and result.solution.optimal:
        user = config.users[0]
        a = steering_vector(config.array, config.theta0)
        cf = su_solve(result.channels.nominal[0], a, user.gamma, config.noise_var,
                      user.sigma_delta, user.epsilon, config.power_budget)
        if cf.feasible:
            gain = cf.radar_gain(a)
            result.closed_form_delta = abs(result.solution.objective - gain) / max(gain, 1e-300)
    return result


def exit_status(result):
    """CLI exit code for a solved scenario: 0 feasible, 2 infeasible, 3 solver trouble."""
    sol = result.solution
    if sol is None or sol.status in (Status.MAX_ITERATIONS, Status.NUMERICAL_FAILURE):
        return 3
    if not result.feasible:
        return 2
    return 0


def trial_metrics(result):
    rep = result.report
    return {
        "feasible": result.feasible,
        "solver_ok": result.solution is not None and result.solution.status not in
        (Status.MAX_ITERATIONS, Status.NUMERICAL_FAILURE),
        "sum_rate": rep.sum_rate,
        "avg_rate_per_user": rep.avg_rate_per_user,
        "min_rate": float(np.min(rep.per_user_rate)),
        "max_outage": float(np.max(rep.empirical_outage)),
        "ismr_inv_db": rep.ismr_inv_db,
        "p_detect": rep.p_detect,
        "max_defect": result.max_defect if result.feasible else float("nan"),
    }


def _sweep_task(args):
    config, trial, probe_tol = args
    return trial_metrics(run_trial(config, trial, probe_tol))


@dataclass
class SweepTable:
    config: object
    sweep: object
    columns: list
    rows: list

    def column(self, name):
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# config_sha256={self.config.digest()}\n")
        buf.write(f"# config={self.config.to_json()}\n")
        buf.write(f"# sweep parameter={self.sweep.parameter} trials_per_point={self.sweep.trials_per_point}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def mean_and_se(values):
    """Mean and standard error of the finite entries (NaN when there are none)."""
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return float("nan"), float("nan")
    se = float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")
    return float(np.mean(x)), se


def run_sweep(config, sweep, workers=1, probe_tol=PROBE_TOL):
    """One row per parameter value, averaging ``sweep.outputs`` over feasible trials."""
    points = [config.with_param(sweep.parameter, v) for v in sweep.values]
    tasks = [(cfg, t, probe_tol) for cfg in points for t in range(sweep.trials_per_point)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=4))
    else:
        results = [_sweep_task(t) for t in tasks]

    columns = ["parameter", "value", "trials", "n_feasible", "n_solver_failures",
               "feasibility_rate", "feasibility_rate_se"]
    for name in sweep.outputs:
        columns += [f"{name}_mean", f"{name}_se"]
    rows = []
    n = sweep.trials_per_point
    for i, value in enumerate(sweep.values):
        chunk = results[i * n:(i + 1) * n]
        feas = np.array([r["feasible"] for r in chunk], dtype=float)
        rate = float(feas.mean())
        row = [sweep.parameter, value, n, int(feas.sum()), sum(not r["solver_ok"] for r in chunk),
               rate, math.sqrt(rate * (1 - rate) / n)]
        for name in sweep.outputs:
            row += list(mean_and_se([r[name] for r in chunk if r["feasible"]]))
        rows.append(row)
    return SweepTable(config, sweep, columns, rows)


def beampattern_rows(array, w_set, theta_grid):
    """(theta_deg, power_db) pairs with the pattern normalized to a 0 dB peak."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    p = bartlett_power(array, w_set, theta_grid)
    p = np.atleast_1d(np.maximum(p, 0.0))
    peak = p.max()
    if not peak > 0:
        return [(math.degrees(t), POWER_FLOOR_DB) for t in theta_grid]
    db = np.maximum(linear_to_db(np.maximum(p / peak, 1e-300)), POWER_FLOOR_DB)
    return list(zip(np.degrees(theta_grid).tolist(), db.tolist()))


def theta_grid_deg(step_deg):
    if not step_deg > 0:
        raise ValueError("grid step must be positive")
    count = int(round(180.0 / step_deg))
    if not math.isclose(count * step_deg, 180.0, rel_tol=1e-9):
        raise ValueError("grid step must divide 180 degrees")
    return np.linspace(-90.0, 90.0, count + 1)


def emit_beampattern(config, w_set, theta_grid):
    """CSV text of the normalized beampattern of ``w_set`` over ``theta_grid`` (radians)."""
    buf = io.StringIO()
    buf.write(f"# config_sha256={config.digest()}\n")
    buf.write(f"# config={config.to_json()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta_deg", "power_db"])
    for t, db in beampattern_rows(config.array, w_set, theta_grid):
        writer.writerow([_fmt(t), _fmt(db)])
    return buf.getvalue()


def validate_outage(result, mc_trials):
    """Per-user Monte Carlo outage of a solved scenario against its target."""
    config = result.config
    rng = make_rng(config.seed, 0, VALIDATION_STREAM)
    rows = []
    for k, (h, user) in enumerate(zip(result.channels.nominal, result.channels.users)):
        emp = monte_carlo_outage(result.w_set, k, h, user, config.noise_var, mc_trials, rng)
        bound = user.outage_p + 3 * math.sqrt(user.outage_p * (1 - user.outage_p) / mc_trials)
        rows.append([k, float(linear_to_db(user.gamma)), user.outage_p, emp, bound, emp <= bound])
    return rows


def validation_csv(config, rows):
    buf = io.StringIO()
    buf.write(f"# config_sha256={config.digest()}\n")
    buf.write(f"# config={config.to_json()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["user", "gamma_db", "outage_p", "empirical_outage", "bound", "conservative"])
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()
