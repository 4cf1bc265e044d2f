"""Real symmetric embedding of complex Hermitian matrices.

H = Hr + j Hi maps to [[Hr, -Hi], [Hi, Hr]].  The map is linear, preserves
positive semidefiniteness, doubles every eigenvalue's multiplicity, and
doubles the trace, so Tr(H) = Tr(embed(H)) / 2.
"""

import numpy as np


def real_embed(H):
    H = np.asarray(H)
    Hr, Hi = H.real, H.imag
    return np.block([[Hr, -Hi], [Hi, Hr]])


def complex_from_embed(M):
    """Inverse of :func:`real_embed`, averaging the redundant copies."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0] // 2
    re = (M[:n, :n] + M[n:, n:]) / 2
    im = (M[n:, :n] - M[:n, n:]) / 2
    return re + 1j * im


def embedded_trace(M):
    return np.trace(M) / 2
