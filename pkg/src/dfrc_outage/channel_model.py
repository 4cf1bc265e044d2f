"""Nominal channels, imperfect-CSI error draws, and per-user SINR / rate evaluation.

Randomness comes from numpy's PCG64 bit generator.  Gaussian variates use
numpy's ziggurat sampler (``Generator.standard_normal``).  Independent
streams for trials or workers are derived with ``SeedSequence`` spawn keys,
so a (seed, trial) pair always yields the same draws regardless of the order
or process in which trials run.
"""

from dataclasses import dataclass

import numpy as np

from .array_model import as_covariances


@dataclass(frozen=True)
class UserSpec:
    """QoS requirement for one user: SINR threshold ``gamma`` (linear), outage
    probability ``outage_p``, and CSI error standard deviation ``sigma_delta``."""

    gamma: float
    outage_p: float
    sigma_delta: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not 0 < self.outage_p < 1:
            raise ValueError(f"outage_p must lie in (0, 1), got {self.outage_p!r}")
        if not self.sigma_delta >= 0:
            raise ValueError(f"sigma_delta must be nonnegative, got {self.sigma_delta!r}")

    @property
    def epsilon(self):
        return -np.log(self.outage_p)


@dataclass(frozen=True)
class ChannelSet:
    nominal: np.ndarray  # (K, N) complex, row k is h_k
    users: tuple
    noise_var: float

    def __post_init__(self):
        h = np.atleast_2d(np.asarray(self.nominal, dtype=complex))
        if h.shape[0] < 1 or h.shape[1] < 1:
            raise ValueError("need at least one user and one antenna")
        if len(self.users) != h.shape[0]:
            raise ValueError(f"{h.shape[0]} channels but {len(self.users)} user specs")
        if not self.noise_var > 0:
            raise ValueError("noise_var must be positive")
        h.setflags(write=False)
        object.__setattr__(self, "nominal", h)
        object.__setattr__(self, "users", tuple(self.users))

    @property
    def n_users(self):
        return self.nominal.shape[0]

    @property
    def n_antennas(self):
        return self.nominal.shape[1]


def make_rng(seed, *stream):
    """PCG64 generator for ``seed``; extra integers select an independent substream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian(rng, shape, std=1.0):
    """Circularly-symmetric complex Gaussian with total variance std**2 per entry."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * (std / np.sqrt(2))


def sample_nominal_channels(rng, K, N):
    """K unit-variance CN(0, I_N) channel vectors, returned as a (K, N) array."""
    if K < 1 or N < 1:
        raise ValueError("K and N must be at least 1")
    return complex_gaussian(rng, (K, N))


def sample_csi_error(rng, sigma_delta, N, size=None):
    """CSI error with covariance sigma_delta**2 I_N.

    With ``size`` given, returns ``size`` independent draws stacked as rows.
    """
    if sigma_delta < 0:
        raise ValueError("sigma_delta must be nonnegative")
    shape = (N,) if size is None else (size, N)
    if sigma_delta == 0:
        return np.zeros(shape, dtype=complex)
    return complex_gaussian(rng, shape, sigma_delta)


def quad_form(h, W):
    """h^T W h* for a vector h or a stack of row vectors."""
    h = np.asarray(h)
    return np.einsum("...i,ij,...j->...", h, W, h.conj()).real


def realized_sinr(w_set, h_tilde, k, noise_var):
    """SINR of user k when its channel realisation is ``h_tilde``.

    ``w_set`` holds either beamforming vectors or covariance matrices.
    ``h_tilde`` may be a single vector or an (M, N) batch, giving M SINRs.
    """
    mats = as_covariances(w_set)
    if not 0 <= k < len(mats):
        raise IndexError(f"user index {k} out of range for K={len(mats)}")
    if not noise_var > 0:
        raise ValueError("noise_var must be positive")
    signal = quad_form(h_tilde, mats[k])
    interference = sum(quad_form(h_tilde, W) for l, W in enumerate(mats) if l != k)
    return signal / (interference + noise_var)


def achievable_rate(sinr):
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be nonnegative")
    out = np.log2(1 + sinr)
    return float(out) if out.ndim == 0 else out


def db_to_linear(db):
    return 10 ** (np.asarray(db, dtype=float) / 10)


def linear_to_db(x):
    return 10 * np.log10(x)
