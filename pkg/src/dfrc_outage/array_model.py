"""Uniform linear array geometry: steering vectors, Bartlett beampatterns and lobe matrices."""

from dataclasses import dataclass

import numpy as np

HALF_PI = np.pi / 2
_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class UlaConfig:
    """Uniform linear array with ``n_antennas`` elements spaced ``spacing`` wavelengths apart."""

    n_antennas: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 1:
            raise ValueError(f"n_antennas must be a positive integer, got {self.n_antennas!r}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")


@dataclass(frozen=True)
class AngularRegion:
    """A union of disjoint closed angle intervals in radians inside [-pi/2, pi/2]."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple(sorted((float(lo), float(hi)) for lo, hi in self.intervals))
        for lo, hi in ivs:
            if not lo < hi:
                raise ValueError(f"interval ({lo}, {hi}) is empty or reversed")
            if lo < -HALF_PI - _ANGLE_SLACK or hi > HALF_PI + _ANGLE_SLACK:
                raise ValueError(f"interval ({lo}, {hi}) leaves the visible region")
        for (_, hi), (lo, _) in zip(ivs, ivs[1:]):
            if lo < hi:
                raise ValueError("intervals overlap")
        object.__setattr__(self, "intervals", ivs)

    @property
    def width(self):
        return sum(hi - lo for lo, hi in self.intervals)

    @classmethod
    def full(cls):
        return cls(((-HALF_PI, HALF_PI),))

    @classmethod
    def mainlobe(cls, theta0, width):
        """The window theta0 +- width/2 clipped to the visible region."""
        lo = max(theta0 - width / 2, -HALF_PI)
        hi = min(theta0 + width / 2, HALF_PI)
        return cls(((lo, hi),))

    def complement(self):
        """Everything in [-pi/2, pi/2] not covered by this region."""
        pieces = []
        edge = -HALF_PI
        for lo, hi in self.intervals:
            if lo > edge:
                pieces.append((edge, lo))
            edge = max(edge, hi)
        if edge < HALF_PI:
            pieces.append((edge, HALF_PI))
        if not pieces:
            raise ValueError("region covers the whole visible range; complement is empty")
        return AngularRegion(tuple(pieces))


def _check_angle(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > HALF_PI + _ANGLE_SLACK) or not np.all(np.isfinite(theta)):
        raise ValueError("angle must lie in [-pi/2, pi/2] radians")
    return theta


def steering_vector(cfg, theta):
    """Steering vector a(theta) with entries exp(j 2 pi d n sin(theta)), n = 0..N-1.

    ``theta`` may be an array of angles, in which case one column per angle is
    returned (shape ``(N, len(theta))``).
    """
    theta = _check_angle(theta)
    n = np.arange(cfg.n_antennas)
    phase = 2 * np.pi * cfg.spacing * np.multiply.outer(n, np.sin(theta))
    return np.exp(1j * phase)


def as_covariances(w_set):
    """Accept either K beamforming vectors or K covariance matrices; return a (K, N, N) stack."""
    mats = []
    for w in w_set:
        w = np.asarray(w, dtype=complex)
        if w.ndim == 1:
            mats.append(np.outer(w, w.conj()))
        elif w.ndim == 2 and w.shape[0] == w.shape[1]:
            mats.append(w)
        else:
            raise ValueError(f"expected a vector or a square matrix, got shape {w.shape}")
    return np.array(mats)


def check_hermitian(mats, tol=1e-8):
    for m in mats:
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > tol * scale:
            raise ValueError("matrix is not Hermitian within tolerance")


def bartlett_power(cfg, w_set, theta):
    """Conventional beamformer output power sum_k a^T(theta) W_k a*(theta).

    Works on a scalar angle or an array of angles.
    """
    mats = as_covariances(w_set)
    check_hermitian(mats)
    R = mats.sum(axis=0)
    a = steering_vector(cfg, theta)
    # a^T R a* for each column of a
    vals = np.einsum("i...,ij,j...->...", a, R, a.conj())
    scale = max(np.abs(vals).max(initial=0.0), np.abs(R).max(), 1e-300)
    if np.abs(vals.imag).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("beampattern has a non-negligible imaginary part")
    out = vals.real
    return float(out) if out.ndim == 0 else out


def lobe_matrix(cfg, region, quad_points=256):
    """Integral of a(theta) a(theta)^H over ``region`` by Gauss-Legendre quadrature.

    Each interval gets its own ``quad_points``-node rule.
    """
    if quad_points < 16:
        raise ValueError("use at least 16 quadrature points per interval")
    if not region.intervals:
        raise ValueError("empty region")
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    N = cfg.n_antennas
    M = np.zeros((N, N), dtype=complex)
    for lo, hi in region.intervals:
        half = (hi - lo) / 2
        thetas = np.clip(lo + half * (nodes + 1), -HALF_PI, HALF_PI)
        a = steering_vector(cfg, thetas)
        M += (a * (half * weights)) @ a.conj().T
    return (M + M.conj().T) / 2
