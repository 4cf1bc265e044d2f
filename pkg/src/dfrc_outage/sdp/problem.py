"""Standard-form data for linear conic programs over PSD blocks and the nonnegative orthant.

The program is stated in the unknown vector y:

    maximize    c^T y
    subject to  S_j(y) = C_j + sum_i y_i B_ji  is PSD      (one per block j)
                G y <= h
                E y  = f
                y_i >= 0 for i in nonneg_vars

Each block's coefficient matrices are stored sparsely, restricted to the
upper triangle of the block ("support" positions).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class SolverSettings:
    tol_gap: float = 1e-7
    tol_feas: float = 1e-8
    max_iter: int = 200
    tol_infeas: float = 1e-8
    divergence: float = 1e12


@dataclass
class PsdBlock:
    """One affine LMI block S(y) = const + sum_i y_i B_i.

    ``coef`` is an (n_vars x P) sparse matrix; column p holds the coefficient
    of every variable at upper-triangle position (rows[p], cols[p]).  The
    symmetric mirror entry is implied.

    ``embedded`` marks blocks that are the real embedding of a complex
    Hermitian LMI; the solver then works with the half-size complex matrices.
    """

    label: str
    dim: int
    const: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    coef: sp.csr_matrix
    embedded: bool = False

    @classmethod
    def from_triplets(cls, label, dim, n_vars, var, rows, cols, vals, const=None, embedded=False):
        """Build a block from (variable, row, col, value) entries.

        Entries may sit in either triangle; they are moved to the upper
        triangle and duplicates are summed.  Only one of each mirrored pair
        should be given.
        """
        var = np.asarray(var, dtype=np.int64)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if dim < 1:
            raise ValueError("block dimension must be at least 1")
        if len(rows) and (rows.min() < 0 or cols.min() < 0 or max(rows.max(), cols.max()) >= dim):
            raise ValueError(f"block {label!r}: entry outside a {dim}x{dim} matrix")
        if len(var) and (var.min() < 0 or var.max() >= n_vars):
            raise ValueError(f"block {label!r}: reference to an undeclared variable")
        r = np.minimum(rows, cols)
        c = np.maximum(rows, cols)
        key = r * dim + c
        support, pos = np.unique(key, return_inverse=True)
        coef = sp.csr_matrix((vals, (var, pos)), shape=(n_vars, len(support)))
        coef.sum_duplicates()
        if const is None:
            const = np.zeros((dim, dim))
        const = np.asarray(const, dtype=float)
        if const.shape != (dim, dim) or not np.allclose(const, const.T, atol=1e-14):
            raise ValueError(f"block {label!r}: constant term must be symmetric {dim}x{dim}")
        return cls(label, dim, const, support // dim, support % dim, coef, embedded)

    def evaluate(self, y):
        """Dense value of S(y)."""
        vals = self.coef.T @ np.asarray(y, dtype=float)
        M = np.zeros((self.dim, self.dim))
        M[self.rows, self.cols] = vals
        M[self.cols, self.rows] = vals
        return self.const + M

    def coefficient(self, i):
        """Dense coefficient matrix B_i."""
        e = np.zeros(self.coef.shape[0])
        e[i] = 1.0
        return self.evaluate(e) - self.const


@dataclass
class SdpProblem:
    var_labels: list
    objective: np.ndarray
    psd_blocks: list
    G: sp.csr_matrix
    h: np.ndarray
    E: sp.csr_matrix
    f: np.ndarray
    nonneg_vars: list = field(default_factory=list)
    y0: np.ndarray = None
    layout: object = None

    def __post_init__(self):
        m = len(self.var_labels)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (m,):
            raise ValueError("objective length must match the number of variables")
        for blk in self.psd_blocks:
            if blk.coef.shape[0] != m:
                raise ValueError(f"block {blk.label!r} is built for a different variable count")
        if self.G.shape[1] != m or self.E.shape[1] != m:
            raise ValueError("linear constraint width must match the number of variables")
        if self.G.shape[0] != len(self.h) or self.E.shape[0] != len(self.f):
            raise ValueError("linear constraint right-hand sides have the wrong length")

    @property
    def n_vars(self):
        return len(self.var_labels)

    @property
    def free_vars(self):
        nn = set(self.nonneg_vars)
        return [i for i in range(self.n_vars) if i not in nn]

    def lp_rows(self):
        """All scalar inequalities, including y_i >= 0 rows, as (G, h)."""
        if not self.nonneg_vars:
            return self.G, self.h
        idx = np.asarray(self.nonneg_vars)
        neg = sp.csr_matrix((-np.ones(len(idx)), (np.arange(len(idx)), idx)),
                            shape=(len(idx), self.n_vars))
        return sp.vstack([self.G, neg], format="csr"), np.concatenate([self.h, np.zeros(len(idx))])

    def residuals(self, y):
        """Constraint slacks at y: min eigenvalue per block, LP slacks, equality errors."""
        y = np.asarray(y, dtype=float)
        G, h = self.lp_rows()
        return {
            "psd_min_eig": [float(np.linalg.eigvalsh(b.evaluate(y))[0]) for b in self.psd_blocks],
            "lp_slack": h - G @ y,
            "eq_error": self.f - self.E @ y,
        }


class ProblemBuilder:
    """Incremental construction of an :class:`SdpProblem` from named variables."""

    def __init__(self):
        self.labels = []
        self.nonneg = []
        self._obj = {}
        self._le = []
        self._eq = []
        self._blocks = []

    def add_var(self, label, nonneg=False):
        self.labels.append(label)
        if nonneg:
            self.nonneg.append(len(self.labels) - 1)
        return len(self.labels) - 1

    def add_vars(self, labels, nonneg=False):
        return [self.add_var(lab, nonneg) for lab in labels]

    def set_objective(self, coeffs):
        self._obj = dict(coeffs)

    def add_le(self, coeffs, rhs):
        self._le.append((dict(coeffs), float(rhs)))

    def add_eq(self, coeffs, rhs):
        self._eq.append((dict(coeffs), float(rhs)))

    def add_psd_block(self, label, dim, entries, const=None, embedded=False):
        """``entries`` is an iterable of (var, row, col, value) with row <= col."""
        self._blocks.append((label, dim, list(entries), const, embedded))

    @staticmethod
    def _rows(rows, m):
        r, c, v = [], [], []
        for k, (coeffs, _) in enumerate(rows):
            for i, val in coeffs.items():
                r.append(k)
                c.append(i)
                v.append(val)
        return sp.csr_matrix((v, (r, c)), shape=(len(rows), m))

    def build(self):
        m = len(self.labels)
        obj = np.zeros(m)
        for i, v in self._obj.items():
            obj[i] = v
        blocks = []
        for label, dim, entries, const, embedded in self._blocks:
            arr = np.array(entries, dtype=float).reshape(-1, 4)
            blocks.append(PsdBlock.from_triplets(
                label, dim, m, arr[:, 0].astype(int), arr[:, 1].astype(int),
                arr[:, 2].astype(int), arr[:, 3], const, embedded))
        return SdpProblem(
            var_labels=list(self.labels), objective=obj, psd_blocks=blocks,
            G=self._rows(self._le, m), h=np.array([r for _, r in self._le]),
            E=self._rows(self._eq, m), f=np.array([r for _, r in self._eq]),
            nonneg_vars=list(self.nonneg),
        )
