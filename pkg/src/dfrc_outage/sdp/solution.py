"""Solver front end: status-carrying solutions, serialization and the feasibility probe."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..chance_constraint import build_bernstein
from .ipm import interior_point
from .p7 import assemble_p7
from .problem import SolverSettings, Status
from .rank_one import extract_beamformer


@dataclass
class SdpSolution:
    status: Status
    objective: float
    duality_gap: float
    iterations: int
    w_matrices: list = field(default_factory=list)
    nu: np.ndarray = None
    mu: np.ndarray = None
    y: np.ndarray = None
    pinf: float = np.nan
    dinf: float = np.nan
    rel_gap: float = np.nan
    history: list = field(default_factory=list)

    @property
    def optimal(self):
        return self.status == Status.OPTIMAL

    def beamformers(self, tol_rank=1e-6):
        return [extract_beamformer(W, tol_rank) for W in self.w_matrices]

    def to_text(self):
        """JSON document with the status, objective, beamformers (interleaved re/im) and slacks."""
        doc = {
            "status": self.status.value,
            "objective": _num(self.objective),
            "duality_gap": _num(self.duality_gap),
            "iterations": int(self.iterations),
            "beamformers": [],
            "rank_defect": [],
            "nu": [_num(v) for v in (self.nu if self.nu is not None else [])],
            "mu": [_num(v) for v in (self.mu if self.mu is not None else [])],
        }
        for bf in self.beamformers():
            inter = np.empty(2 * len(bf.w))
            inter[0::2] = bf.w.real
            inter[1::2] = bf.w.imag
            doc["beamformers"].append([float(v) for v in inter])
            doc["rank_defect"].append(bf.defect)
        return json.dumps(doc, indent=2)

    @classmethod
    def from_text(cls, text):
        """Rebuild a solution from :meth:`to_text` output (covariances become w w^H)."""
        doc = json.loads(text)
        ws = [np.array(b[0::2]) + 1j * np.array(b[1::2]) for b in doc["beamformers"]]
        return cls(
            status=Status(doc["status"]),
            objective=_unnum(doc["objective"]),
            duality_gap=_unnum(doc["duality_gap"]),
            iterations=doc["iterations"],
            w_matrices=[np.outer(w, w.conj()) for w in ws],
            nu=np.array([_unnum(v) for v in doc["nu"]]),
            mu=np.array([_unnum(v) for v in doc["mu"]]),
        )


def _num(v):
    v = float(v)
    return v if np.isfinite(v) else None


def _unnum(v):
    return np.nan if v is None else float(v)


# Rounding a solver-accurate W_k to w_k w_k^H moves the constraint values by
# up to ~1e-7 of the noise level, so the probe cannot use the solver's own
# feasibility tolerance.
PROBE_TOL = 1e-6


def solve(problem, settings=None):
    """Solve a conic program; beamforming programs also get their covariances unpacked."""
    res = interior_point(problem, settings)
    sol = SdpSolution(
        status=res.status, objective=res.objective, duality_gap=res.duality_gap,
        iterations=res.iterations, y=res.y, pinf=res.pinf, dinf=res.dinf,
        rel_gap=res.rel_gap, history=res.history,
    )
    if problem.layout is not None:
        sol.w_matrices, sol.nu, sol.mu = problem.layout.unpack(res.y)
    return sol


def solve_p7(channels, array, theta0, power_budget=1.0, settings=None):
    return solve(assemble_p7(channels, array, theta0, power_budget), settings)


def check_beamformers(channels, w_set, power_budget, tol):
    """True when rank-one covariances from ``w_set`` satisfy every constraint of the model.

    Constraints are the power budget and each user's Bernstein surrogate,
    with violations measured relative to the noise level.
    """
    mats = [np.outer(w, np.conj(w)) for w in w_set]
    power = sum(np.vdot(w, w).real for w in w_set)
    if power > power_budget * (1 + tol):
        return False
    for k, (h, user) in enumerate(zip(channels.nominal, channels.users)):
        bd = build_bernstein(mats, k, user, h, channels.noise_var)
        if bd.sigma_k2 > bd.u_bound + tol * channels.noise_var:
            return False
    return True


def feasibility_probe(channels, array, theta0, power_budget=1.0, settings=None, tol=PROBE_TOL):
    """Whether the model admits a solution whose extracted beamformers meet all constraints."""
    settings = settings or SolverSettings()
    try:
        sol = solve_p7(channels, array, theta0, power_budget, settings)
    except (np.linalg.LinAlgError, ValueError, FloatingPointError):
        return False
    if not sol.optimal:
        return False
    ws = [bf.w for bf in sol.beamformers()]
    return check_beamformers(channels, ws, power_budget, tol)
