"""Bernstein-type deterministic surrogate for the per-user outage constraint.

With h~ = h + e and e ~ CN(0, s^2 I), write e = s z.  User k is in outage
when h~^T Wbar h~* <= noise_var, which expands to

    z^T A z* + 2 Re(z^T b) <= sigma_k2,   A = s^2 Wbar,  b = s Wbar h*,
    sigma_k2 = noise_var - h^T Wbar h*.

The Bernstein-type inequality says the left side is at least

    U = Tr(A) - sqrt(2 eps) c - eps lambda_minus

with probability at least 1 - exp(-eps).  Requiring sigma_k2 <= U therefore
keeps the outage probability below p = exp(-eps).
"""

from dataclasses import dataclass

import numpy as np

from .array_model import as_covariances
from .channel_model import realized_sinr, sample_csi_error


@dataclass(frozen=True)
class BernsteinData:
    wbar: np.ndarray
    a_mat: np.ndarray
    b_vec: np.ndarray
    sigma_k2: float
    epsilon: float
    lambda_minus: float
    c_norm: float
    u_bound: float


def build_wbar(w_set, k, gamma_k):
    """W_k / gamma_k minus the sum of every other user's covariance."""
    mats = as_covariances(w_set)
    if not 0 <= k < len(mats):
        raise IndexError(f"user index {k} out of range for K={len(mats)}")
    if not gamma_k > 0:
        raise ValueError("gamma_k must be positive")
    out = mats[k] / gamma_k
    for l, W in enumerate(mats):
        if l != k:
            out = out - W
    return out


def bernstein_from_parts(a_mat, b_vec, sigma_k2, epsilon, wbar=None):
    """Fill in the derived Bernstein quantities for given A, b, sigma_k^2 and eps."""
    a_mat = np.asarray(a_mat, dtype=complex)
    b_vec = np.asarray(b_vec, dtype=complex)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    lam_max_neg = np.linalg.eigvalsh(-(a_mat + a_mat.conj().T) / 2)[-1]
    lambda_minus = max(float(lam_max_neg), 0.0)
    c_norm = float(np.sqrt(np.linalg.norm(a_mat) ** 2 + 2 * np.linalg.norm(b_vec) ** 2))
    u_bound = float(np.trace(a_mat).real - np.sqrt(2 * epsilon) * c_norm - epsilon * lambda_minus)
    return BernsteinData(
        wbar=wbar, a_mat=a_mat, b_vec=b_vec, sigma_k2=float(sigma_k2), epsilon=float(epsilon),
        lambda_minus=lambda_minus, c_norm=c_norm, u_bound=u_bound,
    )


def build_bernstein(w_set, k, user, h_k, noise_var):
    wbar = build_wbar(w_set, k, user.gamma)
    h_k = np.asarray(h_k, dtype=complex)
    s = user.sigma_delta
    a_mat = s**2 * wbar
    b_vec = s * (wbar @ h_k.conj())
    sigma_k2 = noise_var - (h_k @ wbar @ h_k.conj()).real
    return bernstein_from_parts(a_mat, b_vec, sigma_k2, user.epsilon, wbar=wbar)


def surrogate_satisfied(bd, tol=0.0):
    return bd.sigma_k2 <= bd.u_bound + tol


def monte_carlo_outage(w_set, k, h_k, user, noise_var, trials, rng, chunk=20000):
    """Empirical Pr(SINR_k <= gamma_k) over ``trials`` CSI error draws."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    mats = as_covariances(w_set)
    h_k = np.asarray(h_k, dtype=complex)
    hits = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        h_tilde = h_k + sample_csi_error(rng, user.sigma_delta, len(h_k), size=m)
        sinr = realized_sinr(mats, h_tilde, k, noise_var)
        hits += int(np.count_nonzero(sinr <= user.gamma))
        done += m
    return hits / trials
