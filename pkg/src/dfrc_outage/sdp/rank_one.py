"""Recovery of beamforming vectors from (ideally rank-one) covariance matrices."""

from typing import NamedTuple

import numpy as np

ZERO_POWER = 1e-12


class Beamformer(NamedTuple):
    w: np.ndarray
    defect: float       # lambda_2 / lambda_1
    zero_power: bool
    rank_one: bool


def fix_phase(w, rel=1e-9):
    """Rotate w so its first non-negligible entry is real and nonnegative."""
    w = np.asarray(w, dtype=complex)
    scale = np.linalg.norm(w)
    if scale == 0:
        return w.copy()
    idx = np.flatnonzero(np.abs(w) > rel * scale)[0]
    return w * (abs(w[idx]) / w[idx])


def extract_beamformer(W, tol_rank=1e-6):
    """Leading eigenpair of W scaled to a beamformer, plus the rank defect."""
    W = np.asarray(W, dtype=complex)
    W = (W + W.conj().T) / 2
    vals, vecs = np.linalg.eigh(W)
    lam1 = vals[-1]
    if lam1 <= ZERO_POWER:
        return Beamformer(np.zeros(len(W), dtype=complex), 0.0, True, True)
    lam2 = max(vals[-2], 0.0) if len(vals) > 1 else 0.0
    defect = float(lam2 / lam1)
    w = fix_phase(np.sqrt(lam1) * vecs[:, -1])
    return Beamformer(w, defect, False, defect <= tol_rank)
