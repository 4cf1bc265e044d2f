"""Assembly of the outage-constrained beamforming program.

For each user k the unknowns are the Hermitian covariance W_k (N**2 real
coordinates, see :mod:`hermitian`) and two slacks nu_k >= 0, mu_k.  With
Wbar_k = W_k / gamma_k - sum_{l != k} W_l, A_k = s^2 Wbar_k and
b_k = s Wbar_k h_k*, the program is

    maximize    sum_k a^T W_k a*
    subject to  noise - h_k^T Wbar_k h_k* <= Tr(A_k) - sqrt(2 eps_k) mu_k - eps_k nu_k
                nu_k I + A_k  PSD
                Q_k = [[mu_k, u_k^H], [u_k, mu_k I]]  PSD,  u_k = [sqrt(2) b_k; vec(A_k)]
                W_k  PSD,   nu_k >= 0
                sum_k Tr(W_k) <= P0

Q_k PSD is the Schur-complement form of mu_k >= ||u_k||, and together with
nu_k >= lambda_max(-A_k) it makes the linear constraint a conservative
stand-in for the Bernstein bound.  Complex LMIs enter the solver through the
real embedding of :mod:`embedding`.

Two redundant bounds, nu_k <= nu_cap and mu_k <= mu_cap, are added.  Every
feasible point stays feasible after lowering nu_k to lambda_max(-A_k) and
mu_k to ||u_k||, and both of those are below the caps whenever the power
budget holds, so the caps do not change the achievable covariances.  They
keep the slack directions bounded, which the interior-point method needs when
eps_k is tiny and nu_k, mu_k barely enter the constraints.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..array_model import steering_vector
from . import hermitian as hb
from .problem import PsdBlock, SdpProblem


@dataclass(frozen=True)
class P7Layout:
    n_antennas: int
    n_users: int

    @property
    def per_user(self):
        return self.n_antennas**2

    def w_slice(self, k):
        n2 = self.per_user
        return slice(k * n2, (k + 1) * n2)

    def nu_index(self, k):
        return self.n_users * self.per_user + k

    def mu_index(self, k):
        return self.n_users * (self.per_user + 1) + k

    @property
    def n_vars(self):
        return self.n_users * (self.per_user + 2)

    def unpack(self, y):
        y = np.asarray(y, dtype=float)
        N, K = self.n_antennas, self.n_users
        W = [hb.to_matrix(y[self.w_slice(k)], N) for k in range(K)]
        nu = y[self.nu_index(0): self.nu_index(0) + K].copy()
        mu = y[self.mu_index(0): self.mu_index(0) + K].copy()
        return W, nu, mu

    def pack(self, W, nu, mu):
        y = np.zeros(self.n_vars)
        for k, Wk in enumerate(W):
            y[self.w_slice(k)] = hb.from_matrix(Wk)
        y[self.nu_index(0): self.nu_index(0) + self.n_users] = nu
        y[self.mu_index(0): self.mu_index(0) + self.n_users] = mu
        return y


def coupling(gammas, k, l):
    """Weight of W_l inside Wbar_k."""
    return 1.0 / gammas[k] if k == l else -1.0


def slack_caps(channels, power_budget):
    """Redundant upper bounds (nu_cap, mu_cap) per user; see the module docstring."""
    caps = []
    for h, user in zip(channels.nominal, channels.users):
        s = user.sigma_delta
        wbar = power_budget * max(1.0 / user.gamma, 1.0)
        nu_cap = 1.0 + 2 * s**2 * wbar
        mu_cap = 1.0 + 2 * s * wbar * (s + np.sqrt(2) * np.linalg.norm(h))
        caps.append((nu_cap, mu_cap))
    return caps


def assemble_p7(channels, array, theta0, power_budget=1.0):
    """Build the conic program for ``channels`` steering toward ``theta0`` (radians)."""
    h_all = channels.nominal
    K, N = h_all.shape
    if array.n_antennas != N:
        raise ValueError(f"array has {array.n_antennas} antennas but channels have length {N}")
    if not power_budget > 0:
        raise ValueError("power budget must be positive")
    lay = P7Layout(N, K)
    m = lay.n_vars
    n2 = N * N
    gammas = [u.gamma for u in channels.users]

    labels = []
    for k in range(K):
        labels += hb.labels(N, f"W{k + 1}")
    labels += [f"nu{k + 1}" for k in range(K)] + [f"mu{k + 1}" for k in range(K)]

    a = steering_vector(array, theta0)
    objective = np.zeros(m)
    for k in range(K):
        objective[lay.w_slice(k)] = hb.quadratic_forms(a, N)

    et, er, ec, ev = hb.embedded_entries(N)
    vt, vidx, vval = hb.vec_entries(N)
    tr = hb.traces(N)
    blocks = []
    G_rows, G_cols, G_vals, h_rhs = [], [], [], []

    def add_row(cols, vals, rhs):
        r = len(h_rhs)
        G_rows.extend([r] * len(cols))
        G_cols.extend(cols)
        G_vals.extend(vals)
        h_rhs.append(rhs)

    caps = slack_caps(channels, power_budget)
    for k in range(K):
        off = k * n2
        blocks.append(PsdBlock.from_triplets(f"W{k + 1}", 2 * N, m, et + off, er, ec, ev, embedded=True))

    for k, (hk, user) in enumerate(zip(h_all, channels.users)):
        s = user.sigma_delta
        eps = user.epsilon
        nu_k, mu_k = lay.nu_index(k), lay.mu_index(k)

        # nu_k I + s^2 Wbar_k, embedded
        var = [np.full(2 * N, nu_k)]
        rows = [np.arange(2 * N)]
        cols = [np.arange(2 * N)]
        vals = [np.ones(2 * N)]
        if s > 0:
            for l in range(K):
                c = coupling(gammas, k, l)
                var.append(et + l * n2)
                rows.append(er)
                cols.append(ec)
                vals.append(s**2 * c * ev)
        blocks.append(PsdBlock.from_triplets(
            f"nu{k + 1}", 2 * N, m, np.concatenate(var), np.concatenate(rows),
            np.concatenate(cols), np.concatenate(vals), embedded=True))

        # Q_k, embedded: dimension 2 nc with nc = 1 + N + N^2
        nc = 1 + N + n2
        var = [np.full(2 * nc, mu_k)]
        rows = [np.arange(2 * nc)]
        cols = [np.arange(2 * nc)]
        vals = [np.ones(2 * nc)]
        if s > 0:
            bh = hb.times_vector(hk.conj(), N)  # B_t h_k*
            for l in range(K):
                c = coupling(gammas, k, l)
                t_b, i_b = np.nonzero(bh)
                t_all = np.concatenate([t_b, vt])
                pos = np.concatenate([1 + i_b, 1 + N + vidx])
                delta = np.concatenate([np.sqrt(2) * s * c * bh[t_b, i_b], s**2 * c * vval])
                t_all = t_all + l * n2
                for r_, c_, v_ in (
                    (0, pos, delta.real),
                    (0, nc + pos, delta.imag),
                    (pos, nc, -delta.imag),
                    (nc, nc + pos, delta.real),
                ):
                    keep = v_ != 0
                    var.append(t_all[keep])
                    rows.append(np.broadcast_to(r_, pos.shape)[keep])
                    cols.append(np.broadcast_to(c_, pos.shape)[keep])
                    vals.append(v_[keep])
        blocks.append(PsdBlock.from_triplets(
            f"Q{k + 1}", 2 * nc, m, np.concatenate(var), np.concatenate(rows),
            np.concatenate(cols), np.concatenate(vals), embedded=True))

        # surrogate SINR constraint, moved to  (...) <= -noise
        cols_, vals_ = [], []
        qf = hb.quadratic_forms(hk, N)
        for l in range(K):
            c = coupling(gammas, k, l)
            cols_.extend(range(l * n2, (l + 1) * n2))
            vals_.extend(-c * (qf + s**2 * tr))
        cols_ += [mu_k, nu_k]
        vals_ += [np.sqrt(2 * eps), eps]
        add_row(cols_, vals_, -channels.noise_var)

    # power budget
    diag_cols = [k * n2 + i for k in range(K) for i in range(N)]
    add_row(diag_cols, [1.0] * len(diag_cols), power_budget)
    for k, (nu_cap, mu_cap) in enumerate(caps):
        add_row([lay.nu_index(k)], [1.0], nu_cap)
        add_row([lay.mu_index(k)], [1.0], mu_cap)

    G = sp.csr_matrix((G_vals, (G_rows, G_cols)), shape=(len(h_rhs), m))
    G.sum_duplicates()

    y0 = lay.pack(
        [power_budget / (2 * K * N) * np.eye(N)] * K,
        [cap[0] / 2 for cap in caps],
        [cap[1] / 2 for cap in caps],
    )
    return SdpProblem(
        var_labels=labels, objective=objective, psd_blocks=blocks,
        G=G, h=np.array(h_rhs, dtype=float),
        E=sp.csr_matrix((0, m)), f=np.zeros(0),
        nonneg_vars=[lay.nu_index(k) for k in range(K)],
        y0=y0, layout=lay,
    )


def direct_constraints(channels, array, theta0, power_budget, W, nu, mu):
    """Constraint values computed straight from (W, nu, mu), for cross-checking assembly.

    Returns a dict with the complex matrices each PSD block should equal and
    the slack of every scalar constraint.
    """
    K, N = channels.nominal.shape
    out = {"W": [], "nu": [], "Q": [], "sinr_slack": [], "objective": 0.0}
    gammas = [u.gamma for u in channels.users]
    a = steering_vector(array, theta0)
    for k, (hk, user) in enumerate(zip(channels.nominal, channels.users)):
        s = user.sigma_delta
        eps = user.epsilon
        wbar = sum(coupling(gammas, k, l) * W[l] for l in range(K))
        A = s**2 * wbar
        u = np.concatenate([np.sqrt(2) * s * wbar @ hk.conj(), A.flatten(order="F")])
        nc = 1 + N + N * N
        Q = mu[k] * np.eye(nc, dtype=complex)
        Q[0, 1:] = u.conj()
        Q[1:, 0] = u
        out["W"].append(W[k])
        out["nu"].append(nu[k] * np.eye(N) + A)
        out["Q"].append(Q)
        sigma_k2 = channels.noise_var - (hk @ wbar @ hk.conj()).real
        rhs = np.trace(A).real - np.sqrt(2 * eps) * mu[k] - eps * nu[k]
        out["sinr_slack"].append(rhs - sigma_k2)
        out["objective"] += (a @ W[k] @ a.conj()).real
    out["power_slack"] = power_budget - sum(np.trace(Wk).real for Wk in W)
    return out
