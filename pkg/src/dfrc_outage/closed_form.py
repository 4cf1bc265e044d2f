"""Exact single-user beamformers.

With one user the optimal beamformer spends the full budget inside
span{a*(theta0), h*}.  Writing it in the orthonormal basis

    h_par = h* / ||h||,   h_perp = Gram-Schmidt(a*(theta0) against h_par)

as w = x e^{j phi1} h_par + sqrt(1 - x^2) e^{j phi2} h_perp, the received
power is |h^T w|^2 = x^2 ||h||^2 and the surrogate SINR constraint becomes
g(x) >= 0 with

    g(x) = x^2 ||h||^2 - (gamma s_c^2 - s^2) - s sqrt(2 eps) sqrt(s^2 + 2 x^2 ||h||^2).

The radar gain |a^T w|^2 = (x c1 + sqrt(1 - x^2) c2)^2, with
c1 = |a^T h_par| and c2 = |a^T h_perp|, peaks at x* = c1 / sqrt(N), which is
the Bartlett beamformer a* / sqrt(N).  When x* is infeasible the optimum sits
on the boundary g(x) = 0 closest to x*.
"""

from enum import Enum
from typing import NamedTuple

import numpy as np

BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
DEGENERATE = 1e-12


class Branch(str, Enum):
    BARTLETT = "Bartlett"
    MIXTURE = "Mixture"


class SuSolution(NamedTuple):
    w: np.ndarray
    branch: Branch
    rho: float
    lambda_threshold: float
    feasible: bool

    def radar_gain(self, steering):
        """|a^T w|^2 for the steering vector a(theta0)."""
        return float(abs(np.asarray(steering) @ self.w) ** 2)


class GramSchmidtPair(NamedTuple):
    e_par: np.ndarray
    e_perp: np.ndarray
    degenerate: bool


def gram_schmidt_pair(reference, other):
    reference = np.asarray(reference, dtype=complex)
    other = np.asarray(other, dtype=complex)
    norm = np.linalg.norm(reference)
    if norm == 0:
        raise ValueError("reference vector must be nonzero")
    e_par = reference / norm
    rest = other - np.vdot(e_par, other) * e_par
    rest_norm = np.linalg.norm(rest)
    if rest_norm <= DEGENERATE * max(np.linalg.norm(other), 1.0):
        return GramSchmidtPair(e_par, np.zeros_like(e_par), True)
    return GramSchmidtPair(e_par, rest / rest_norm, False)


def _unit_phase(z):
    # the gain of a component with zero projection does not depend on its phase
    return z / abs(z) if abs(z) > 0 else 1.0


def _mixture(h, steering, x):
    """x e^{j phi1} h_par + sqrt(1 - x^2) e^{j phi2} h_perp with aligned phases."""
    a = np.asarray(steering, dtype=complex)
    h_par, h_perp, degenerate = gram_schmidt_pair(np.conj(h), np.conj(a))
    w = x * _unit_phase(np.vdot(h_par, a.conj())) * h_par
    if not degenerate:
        w = w + np.sqrt(max(1 - x * x, 0.0)) * _unit_phase(np.vdot(h_perp, a.conj())) * h_perp
    return w


def _bartlett(steering):
    a = np.asarray(steering, dtype=complex)
    return a.conj() / np.linalg.norm(a)


def _g(h_norm2, gamma, noise_var, sigma_delta, epsilon):
    s2 = sigma_delta**2
    base = gamma * noise_var - s2
    slope = sigma_delta * np.sqrt(2 * epsilon)

    def g(x):
        return x * x * h_norm2 - base - slope * np.sqrt(s2 + 2 * x * x * h_norm2)

    return g


def _bisect(g, lo, hi):
    """Root of g on [lo, hi] given a sign change between the ends."""
    g_lo = g(lo)
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = (lo + hi) / 2
        g_mid = g(mid)
        if (g_mid >= 0) == (g_lo >= 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return (lo + hi) / 2


def _normalize(noise_var, power_budget):
    if not power_budget > 0:
        raise ValueError("power_budget must be positive")
    # at full power P the constraint reads like unit power with noise s_c^2 / P
    return noise_var / power_budget, np.sqrt(power_budget)


def su_solve_eps_zero(h, steering, gamma, noise_var, sigma_delta, power_budget=1.0):
    """Single-user optimum in the limit of a vanishing outage margin."""
    h = np.asarray(h, dtype=complex)
    steering = np.asarray(steering, dtype=complex)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    noise, scale = _normalize(noise_var, power_budget)
    n = len(steering)
    h_norm2 = float(np.vdot(h, h).real)
    corr = float(abs(h @ steering.conj()) ** 2)
    base = gamma * noise - sigma_delta**2
    rho = base / h_norm2 if h_norm2 > 0 else (np.inf if base > 0 else 0.0)
    lam = n * base
    feasible = rho <= 1
    if not feasible:
        return SuSolution(np.zeros(n, dtype=complex), Branch.MIXTURE, float(rho), lam, False)
    if lam <= corr:
        return SuSolution(scale * _bartlett(steering), Branch.BARTLETT, float(rho), lam, True)
    w = _mixture(h, steering, np.sqrt(rho))
    return SuSolution(scale * w, Branch.MIXTURE, float(rho), lam, True)


def su_solve(h, steering, gamma, noise_var, sigma_delta, epsilon, power_budget=1.0):
    """Single-user optimum under the Bernstein outage surrogate with margin ``epsilon``."""
    h = np.asarray(h, dtype=complex)
    steering = np.asarray(steering, dtype=complex)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    noise, scale = _normalize(noise_var, power_budget)
    n = len(steering)
    h_norm2 = float(np.vdot(h, h).real)
    corr = float(abs(h @ steering.conj()) ** 2)
    s = sigma_delta
    lam = n * (gamma * noise - s**2 + np.sqrt(2 * epsilon) * s * np.sqrt(s**2 + 2 * corr / n))
    g = _g(h_norm2, gamma, noise, s, epsilon)

    if g(1.0) < 0:
        return SuSolution(np.zeros(n, dtype=complex), Branch.MIXTURE, np.nan, lam, False)
    if lam <= corr:
        return SuSolution(scale * _bartlett(steering), Branch.BARTLETT, _tight_fraction(g, epsilon, h_norm2, gamma * noise - s**2), lam, True)

    # The Bartlett point x* violates the constraint.  On x >= 0, g first
    # dips (when 2 eps > 1) and then increases, so {g >= 0} is [x_up, 1]
    # plus possibly an interval starting at 0 when g(0) >= 0.
    x_star = np.sqrt(corr / (n * h_norm2))
    candidates = [_bisect(g, x_star, 1.0)]
    if g(0.0) >= 0:
        candidates.append(_bisect(g, 0.0, x_star))
    a = steering
    best = max(candidates, key=lambda x: abs(a @ _mixture(h, a, x)))
    return SuSolution(scale * _mixture(h, a, best), Branch.MIXTURE, best**2, lam, True)


def _tight_fraction(g, epsilon, h_norm2, base):
    """Power fraction on h_par at which the constraint becomes tight.

    Without an outage margin this is (gamma s_c^2 - s^2) / ||h||^2, possibly
    negative; otherwise it is the squared root of g when one exists.
    """
    if g(0.0) < 0:
        return _bisect(g, 0.0, 1.0) ** 2
    return base / h_norm2 if epsilon == 0 else 0.0


def max_average_sinr(h, noise_var, sigma_delta, power_budget=1.0):
    """Largest mean SINR reachable by a single user: (P ||h||^2 + P s^2) / s_c^2."""
    h = np.asarray(h, dtype=complex)
    return power_budget * (float(np.vdot(h, h).real) + sigma_delta**2) / noise_var
