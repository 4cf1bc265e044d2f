"""Real coordinates for N x N Hermitian matrices.

A Hermitian W is written as sum_t y_t B_t with N**2 real coordinates:
first the N diagonal entries, then for every pair p < q the real part and
the imaginary part of W[p, q].  The basis matrices are

    diagonal p:   e_p e_p^T
    real (p, q):  e_p e_q^T + e_q e_p^T
    imag (p, q):  j (e_p e_q^T - e_q e_p^T)
"""

from functools import lru_cache

import numpy as np

DIAG, RE, IM = 0, 1, 2


@lru_cache(maxsize=None)
def basis(N):
    """Arrays (kind, p, q) describing each basis matrix, length N**2."""
    iu, ju = np.triu_indices(N, k=1)
    kind = np.concatenate([np.full(N, DIAG), np.tile([RE, IM], len(iu))])
    p = np.concatenate([np.arange(N), np.repeat(iu, 2)])
    q = np.concatenate([np.arange(N), np.repeat(ju, 2)])
    for arr in (kind, p, q):
        arr.setflags(write=False)
    return kind, p, q


def labels(N, prefix):
    names = {DIAG: "d", RE: "re", IM: "im"}
    kind, p, q = basis(N)
    return [f"{prefix}[{names[k]},{a},{b}]" for k, a, b in zip(kind, p, q)]


def to_matrix(coords, N):
    kind, p, q = basis(N)
    c = np.asarray(coords, dtype=float)
    d, r, i = kind == DIAG, kind == RE, kind == IM
    W = np.zeros((N, N), dtype=complex)
    W[p[d], p[d]] = c[d]
    W[p[r], q[r]] = c[r]
    W[p[i], q[i]] += 1j * c[i]
    return W + np.triu(W, 1).conj().T


def from_matrix(W):
    W = np.asarray(W)
    N = W.shape[0]
    kind, p, q = basis(N)
    vals = W[p, q]
    return np.where(kind == IM, vals.imag, vals.real)


def quadratic_forms(h, N):
    """h^T B_t h* for every basis matrix (real numbers)."""
    kind, p, q = basis(N)
    cross = h[p] * np.conj(h[q])
    return np.select([kind == DIAG, kind == RE], [np.abs(h[p]) ** 2, 2 * cross.real], -2 * cross.imag)


def traces(N):
    kind, _, _ = basis(N)
    return (kind == DIAG).astype(float)


def times_vector(v, N):
    """B_t v for every basis matrix, as an (N**2, N) complex array."""
    kind, p, q = basis(N)
    out = np.zeros((len(kind), N), dtype=complex)
    t = np.arange(len(kind))
    d = kind == DIAG
    out[t[d], p[d]] = v[p[d]]
    r = kind == RE
    out[t[r], p[r]] = v[q[r]]
    out[t[r], q[r]] = v[p[r]]
    i = kind == IM
    out[t[i], p[i]] = 1j * v[q[i]]
    out[t[i], q[i]] = -1j * v[p[i]]
    return out


def vec_entries(N):
    """Nonzero entries of vec(B_t) (column-major) as (t, index, value) arrays."""
    kind, p, q = basis(N)
    t = np.arange(len(kind))
    d = kind == DIAG
    r = kind == RE
    i = kind == IM
    ts = np.concatenate([t[d], t[r], t[r], t[i], t[i]])
    idx = np.concatenate([p[d] + N * p[d], p[r] + N * q[r], q[r] + N * p[r], p[i] + N * q[i], q[i] + N * p[i]])
    val = np.concatenate([np.ones(d.sum()), np.ones(r.sum()), np.ones(r.sum()),
                          np.full(i.sum(), 1j), np.full(i.sum(), -1j)])
    return ts, idx, val


def embedded_entries(N):
    """Upper-triangle entries of real_embed(B_t) as (t, row, col, value) arrays."""
    kind, p, q = basis(N)
    t = np.arange(len(kind))
    d = kind == DIAG
    r = kind == RE
    i = kind == IM
    ts = np.concatenate([t[d], t[d], t[r], t[r], t[i], t[i]])
    rows = np.concatenate([p[d], N + p[d], p[r], N + p[r], p[i], q[i]])
    cols = np.concatenate([p[d], N + p[d], q[r], N + q[r], N + q[i], N + p[i]])
    vals = np.concatenate([np.ones(2 * d.sum()), np.ones(2 * r.sum()),
                           -np.ones(i.sum()), np.ones(i.sum())])
    return ts, rows, cols, vals
