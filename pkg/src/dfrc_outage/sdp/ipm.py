"""Primal-dual interior-point method for the programs in :mod:`problem`.

Internally the problem is read in the usual dual standard form

    max  b^T y   s.t.  S_j = C_j - A_j^*(y) PSD,   s = h - G y >= 0,   E y = f

with primal partner

    min  sum <C_j, X_j> + h^T x + f^T lam   s.t.  sum A_j(X_j) + G^T x + E^T lam = b.

Search directions use the HKM scaling with a Mehrotra predictor-corrector.
The Schur complement entries Tr(A_i X A_k S^-1) are formed by gathering X and
S^-1 on the support of each block's coefficient matrices, which is exact and
cheap for the sparse arrow-shaped blocks produced by the beamforming model.

Blocks flagged as real embeddings of complex Hermitian matrices keep that
structure along the whole central path (the embedding is an algebra
homomorphism and the starting point is a multiple of the identity), so their
dense factorizations, products and eigenvalue problems are carried out on the
half-size complex matrices.  The Schur complement and all residuals are still
formed from the real embedded matrices.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .embedding import complex_from_embed, real_embed
from .problem import SolverSettings, Status


ARROW_MIN_SUPPORT = 400
ARROW_MAX_HUBS = 4


@dataclass
class _Block:
    """Solver-side view of one PSD block, with coefficient matrices A_i = -B_i.

    Small blocks form the Schur complement by gathering X and S^-1 on the
    coefficient support.  Large blocks whose off-diagonal support lies in a
    few rows ("hubs") use the split

        A_i = sum_h (e_h w_hi^T + w_hi e_h^T) + diag(d_i),

    which turns Tr(A_i X A_k S^-1) into a handful of thin sparse products.
    Only variables that appear in the block ("active") take part.
    """

    dim: int
    C: np.ndarray
    a: np.ndarray      # support rows (a <= b)
    b: np.ndarray      # support cols
    half: np.ndarray   # 1/2 on diagonal positions, 1 elsewhere
    mult: np.ndarray   # 1 on diagonal positions, 2 elsewhere
    F: object          # sparse (m x P): coefficient of A_i at each support position
    FT: object
    active: np.ndarray
    Fa: object         # rows of F for active variables
    cplx: bool = False
    hubs: list = None  # [(h, sparse n x m_active)] when the arrow split is used
    diag: object = None

    @classmethod
    def build(cls, blk):
        diag = blk.rows == blk.cols
        F = (-blk.coef).tocsr()
        F.eliminate_zeros()
        active = np.flatnonzero(np.diff(F.indptr))
        out = cls(
            dim=blk.dim, C=np.array(blk.const, dtype=float), a=blk.rows, b=blk.cols,
            half=np.where(diag, 0.5, 1.0), mult=np.where(diag, 1.0, 2.0),
            F=F, FT=F.T.tocsr(), active=active, Fa=F[active].tocsr(),
        )
        if blk.embedded:
            out._check_embedded()
            out.cplx = True
        if len(blk.rows) >= ARROW_MIN_SUPPORT:
            out._split_arrow()
        return out

    @property
    def native_dim(self):
        return self.dim // 2 if self.cplx else self.dim

    @property
    def weight(self):
        """Factor converting native inner products to real-embedded ones."""
        return 2.0 if self.cplx else 1.0

    def to_real(self, M):
        return real_embed(M) if self.cplx else M

    def to_native(self, M):
        return complex_from_embed(M) if self.cplx else M

    def _check_embedded(self):
        n2 = self.dim
        if n2 % 2:
            raise ValueError("an embedded block must have even dimension")
        n = n2 // 2
        a, b = self.a, self.b
        key = a * n2 + b
        tl = b < n
        br = a >= n
        tr = ~tl & ~br
        pa = np.where(tl, a + n, np.where(br, a - n, b - n))
        pb = np.where(tl, b + n, np.where(br, b - n, a + n))
        sign = np.where(tr, -1.0, 1.0)
        pkey = pa * n2 + pb
        idx = np.searchsorted(key, pkey)
        idx = np.minimum(idx, len(key) - 1)
        found = key[idx] == pkey
        Fc = self.F.tocsc()
        colnorm = np.sqrt(np.asarray(Fc.multiply(Fc).sum(axis=0)).ravel())
        bad_tr = tr & (b - n == a) & (colnorm > 0)
        if np.any(~found & (colnorm > 0)) or np.any(bad_tr):
            raise ValueError("block is flagged as embedded but lacks the embedding structure")
        partner = Fc[:, idx[found]].multiply(sign[found])
        diff = Fc[:, np.flatnonzero(found)] - partner
        scale = max(np.abs(self.F).max(), 1.0)
        if diff.nnz and np.abs(diff).max() > 1e-12 * scale:
            raise ValueError("block is flagged as embedded but lacks the embedding structure")
        if np.abs(real_embed(complex_from_embed(self.C)) - self.C).max() > 1e-12 * max(np.abs(self.C).max(), 1.0):
            raise ValueError("constant term of an embedded block lacks the embedding structure")

    def _split_arrow(self):
        a, b = self.a, self.b
        off = np.flatnonzero(a != b)
        hubs = []
        left = off
        while len(left) and len(hubs) < ARROW_MAX_HUBS:
            counts = np.bincount(np.concatenate([a[left], b[left]]), minlength=self.dim)
            h = int(np.argmax(counts))
            hubs.append(h)
            left = left[(a[left] != h) & (b[left] != h)]
        if len(left):
            return
        Fc = self.Fa.tocsc()
        owner = np.full(len(a), -1)
        for h in reversed(hubs):
            owner[(a == h) | (b == h)] = h
        hub_mats = []
        for h in hubs:
            pos = np.flatnonzero(owner == h)
            other = np.where(a[pos] == h, b[pos], a[pos])
            scale = np.where(a[pos] == b[pos], 0.5, 1.0)
            sub = Fc[:, pos].multiply(scale).tocsc()
            place = sp.csr_matrix((np.ones(len(pos)), (other, np.arange(len(pos)))), shape=(self.dim, len(pos)))
            hub_mats.append((h, (place @ sub.T).tocsc()))  # n x m_active
        rest = np.flatnonzero(owner < 0)
        place = sp.csr_matrix((np.ones(len(rest)), (np.arange(len(rest)), a[rest])), shape=(len(rest), self.dim))
        self.diag = (Fc[:, rest] @ place).tocsr()  # m_active x n
        self.hubs = hub_mats

    def op(self, Y):
        """A(Y)_i = <A_i, Y> for a symmetric Y given in native form."""
        Y = self.to_real(Y)
        return self.F @ (Y[self.a, self.b] * self.mult)

    def adj(self, y):
        """A^*(y) = sum_i y_i A_i in native form."""
        vals = self.FT @ y
        M = np.zeros((self.dim, self.dim))
        M[self.a, self.b] = vals
        M[self.b, self.a] = vals
        return self.to_native(M)

    def schur(self, X, Si):
        """Tr(A_i X A_k S^-1) for active variable pairs (X, Si in native form)."""
        X = self.to_real(X)
        Si = self.to_real(Si)
        if self.hubs is not None:
            return self._schur_arrow(X, Si)
        a, b = self.a, self.b
        Xba = X[np.ix_(b, a)]
        Sba = Si[np.ix_(b, a)]
        K = Xba * Sba.T
        K += Xba.T * Sba
        K += X[np.ix_(b, b)] * Si[np.ix_(a, a)]
        K += X[np.ix_(a, a)] * Si[np.ix_(b, b)]
        K *= np.outer(self.half, self.half)
        return np.asarray(self.Fa @ (self.Fa @ K.T).T)

    def _schur_arrow(self, X, Si):
        hubs = [h for h, _ in self.hubs]
        Ws = [Wh for _, Wh in self.hubs]
        WX = [np.asarray(Wh.T @ X) for Wh in Ws]     # row i is (X w_hi)^T
        WS = [np.asarray(Wh.T @ Si) for Wh in Ws]
        XH = X[np.ix_(hubs, hubs)]
        SH = Si[np.ix_(hubs, hubs)]
        M = np.zeros((len(self.active),) * 2)
        for i, Wh in enumerate(Ws):
            # sum_g Si[g, h] w_h^T X w_g  and  sum_g X[h, g] w_h^T Si w_g
            ZX = sum(SH[j, i] * WX[j] for j in range(len(Ws)))
            ZS = sum(XH[i, j] * WS[j] for j in range(len(Ws)))
            M += np.asarray(Wh.T @ (ZX + ZS).T)
        U = np.column_stack([WX[i][:, g] for i in range(len(Ws)) for g in hubs]
                            + [WS[i][:, g] for i in range(len(Ws)) for g in hubs])
        V = np.column_stack([WS[j][:, h] for h in hubs for j in range(len(Ws))]
                            + [WX[j][:, h] for h in hubs for j in range(len(Ws))])
        M += U @ V.T
        D = self.diag
        if D.nnz:
            cross = sum(WX[i] * Si[:, h] + WS[i] * X[:, h] for i, h in enumerate(hubs))
            C = np.asarray(D @ cross.T)
            M += C + C.T
            M += np.asarray(D @ (D @ (X * Si)).T)
        return M


def _herm(V):
    return (V + V.conj().T) / 2


@dataclass
class IpmResult:
    status: Status
    y: np.ndarray
    X: list
    S: list
    x: np.ndarray
    lam: np.ndarray
    primal_objective: float
    dual_objective: float
    iterations: int
    pinf: float
    dinf: float
    rel_gap: float
    history: list = field(default_factory=list)

    @property
    def objective(self):
        return self.dual_objective

    @property
    def duality_gap(self):
        return self.primal_objective - self.dual_objective


def _inv_chol(M):
    """Inverse of the lower Cholesky factor of M, or None if M is not positive definite."""
    potrf, trtri = la.get_lapack_funcs(("potrf", "trtri"), (M,))
    L, info = potrf(M, lower=1, clean=1)
    if info != 0:
        return None
    Li, info = trtri(L, lower=1)
    return Li if info == 0 else None


def _max_step(Linv, D):
    """Largest alpha with M + alpha D PSD, given Linv = chol(M)^-1 (inf if unrestricted)."""
    if len(D) == 1:
        lam = (abs(Linv[0, 0]) ** 2 * D[0, 0]).real
    else:
        T = Linv @ D @ Linv.conj().T
        lam = la.eigh(_herm(T), eigvals_only=True, subset_by_index=[0, 0],
                      check_finite=False, driver="evr")[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def interior_point(problem, settings=None):
    """Run the interior-point method on ``problem`` and return an :class:`IpmResult`."""
    st = settings or SolverSettings()
    blocks = [_Block.build(blk) for blk in problem.psd_blocks]
    G, h = problem.lp_rows()
    G = G.tocsr()
    GT = G.T.tocsr()
    h = np.asarray(h, dtype=float)
    E = problem.E.tocsr()
    ET = E.T.tocsr()
    f = np.asarray(problem.f, dtype=float)
    bvec = problem.objective
    m = problem.n_vars
    n_lp = G.shape[0]
    n_eq = E.shape[0]

    def inner(blk, A, B):
        return blk.weight * np.vdot(A, B).real

    # Starting point: multiples of the identity.  The data-scaled start of
    # SDPT3 was tried too; on these problems its large primal start costs
    # a few extra iterations.
    y = np.zeros(m) if problem.y0 is None else np.array(problem.y0, dtype=float)
    Cn = [blk.to_native(blk.C) for blk in blocks]
    X, S = [], []
    for blk in blocks:
        xi = max(10.0, np.sqrt(blk.dim))
        X.append(xi * np.eye(blk.native_dim, dtype=complex if blk.cplx else float))
        S.append(X[-1].copy())
    if n_lp:
        gnorm = np.sqrt(np.asarray(G.multiply(G).sum(axis=1)).ravel())
        colnorm = np.sqrt(np.asarray(G.multiply(G).sum(axis=0)).ravel())
        xi = max(10.0, np.sqrt(n_lp), n_lp * np.max((1 + np.abs(bvec)) / (1 + colnorm)))
        eta = max(10.0, np.sqrt(n_lp), gnorm.max(), np.linalg.norm(h))
        x = np.full(n_lp, xi)
        s = np.full(n_lp, eta)
    else:
        x = np.zeros(0)
        s = np.zeros(0)
    lam = np.zeros(n_eq)

    nu_total = sum(blk.dim for blk in blocks) + n_lp
    norm_b = np.linalg.norm(bvec)
    norm_c = np.sqrt(sum(np.linalg.norm(blk.C) ** 2 for blk in blocks) + h @ h + f @ f)
    history = []
    tau = 0.9
    stalls = 0
    status = Status.MAX_ITERATIONS
    it = 0
    pinf = dinf = rel_gap = np.inf
    pobj = dobj = np.nan

    for it in range(st.max_iter + 1):
        AX = np.zeros(m)
        for blk, Xj in zip(blocks, X):
            AX += blk.op(Xj)
        rp = bvec - AX - GT @ x - ET @ lam
        Rd = [C - blk.adj(y) - Sj for blk, C, Sj in zip(blocks, Cn, S)]
        rdl = h - G @ y - s
        req = f - E @ y
        pobj = sum(inner(blk, C, Xj) for blk, C, Xj in zip(blocks, Cn, X)) + h @ x + f @ lam
        dobj = bvec @ y
        comp = sum(inner(blk, Xj, Sj) for blk, Xj, Sj in zip(blocks, X, S)) + x @ s
        mu = comp / nu_total
        pinf = np.linalg.norm(rp) / (1 + norm_b)
        dinf = np.sqrt(sum(inner(blk, R, R) for blk, R in zip(blocks, Rd)) + rdl @ rdl + req @ req) / (1 + norm_c)
        rel_gap = max(abs(pobj - dobj), comp) / (1 + abs(pobj) + abs(dobj))
        history.append([it, pobj, dobj, pinf, dinf, rel_gap])

        if not (np.isfinite(pobj) and np.isfinite(dobj)):
            status = Status.NUMERICAL_FAILURE
            break
        if rel_gap <= st.tol_gap and pinf <= st.tol_feas and dinf <= st.tol_feas:
            status = Status.OPTIMAL
            break
        # a primal ray with negative cost certifies that no feasible y exists
        if pobj < 0:
            ray = np.linalg.norm(AX + GT @ x + ET @ lam) / abs(pobj)
            if ray <= st.tol_infeas:
                status = Status.INFEASIBLE
                break
        # a dual ray with positive objective certifies unboundedness
        if dobj > 0:
            ray = np.sqrt(sum(inner(blk, V, V) for blk, V in
                              ((blk, blk.adj(y) + Sj) for blk, Sj in zip(blocks, S)))
                          + np.linalg.norm(G @ y + s) ** 2 + np.linalg.norm(E @ y) ** 2) / dobj
            if ray <= st.tol_infeas:
                status = Status.UNBOUNDED
                break
        xnorm = max([np.abs(Xj).max() for Xj in X] + [np.abs(x).max(initial=0.0)])
        if xnorm > st.divergence:
            status = Status.INFEASIBLE
            break
        if np.abs(y).max(initial=0.0) > st.divergence and dobj > 0:
            status = Status.UNBOUNDED
            break
        if it == st.max_iter:
            status = Status.MAX_ITERATIONS
            break

        LS = [_inv_chol(Sj) for Sj in S]
        LX = [_inv_chol(Xj) for Xj in X]
        if any(L is None for L in LS + LX):
            status = Status.NUMERICAL_FAILURE
            break
        Si = [L.conj().T @ L for L in LS]

        M = np.zeros((m, m))
        for blk, Xj, Sij in zip(blocks, X, Si):
            act = blk.active
            if len(act) == m:
                M += blk.schur(Xj, Sij)
            elif len(act):
                M[np.ix_(act, act)] += blk.schur(Xj, Sij)
        if n_lp:
            M += np.asarray((GT.multiply(x / s) @ G).todense())
        M = (M + M.T) / 2
        fac = _factor(M)
        if fac is None:
            status = Status.NUMERICAL_FAILURE
            break
        if n_eq:
            MiET = la.cho_solve(fac, E.T.toarray())
            try:
                eqfac = la.cho_factor(_herm(E @ MiET))
            except la.LinAlgError:
                status = Status.NUMERICAL_FAILURE
                break
        XRdSi = [Xj @ R @ Sij for Xj, R, Sij in zip(X, Rd, Si)]

        def direction(RcSi, rc):
            rhs = rp.copy()
            for blk, T, U in zip(blocks, RcSi, XRdSi):
                rhs -= blk.op(_herm(T - U))
            if n_lp:
                rhs -= GT @ ((rc - x * rdl) / s)
            if n_eq:
                u = la.cho_solve(fac, rhs)
                dlam = la.cho_solve(eqfac, E @ u - req)
                dy = u - MiET @ dlam
            else:
                dlam = np.zeros(0)
                dy = la.cho_solve(fac, rhs)
            dS = [R - blk.adj(dy) for blk, R in zip(blocks, Rd)]
            dX = [_herm(T - Xj @ D @ Sij) for T, Xj, D, Sij in zip(RcSi, X, dS, Si)]
            ds = rdl - G @ dy
            dx = (rc - x * ds) / s if n_lp else np.zeros(0)
            return dy, dX, dS, dx, ds, dlam

        def steps(dX, dS, dx, ds):
            ap = min([_max_step(L, D) for D, L in zip(dX, LX)] + [_max_step_lp(x, dx)])
            ad = min([_max_step(L, D) for D, L in zip(dS, LS)] + [_max_step_lp(s, ds)])
            return ap, ad

        # predictor
        dy, dX, dS, dx, ds, dlam = direction([-Xj for Xj in X], -x * s)
        ap, ad = steps(dX, dS, dx, ds)
        ap, ad = min(1.0, ap), min(1.0, ad)
        comp_aff = sum(inner(blk, Xj + ap * a, Sj + ad * b_)
                       for blk, Xj, a, Sj, b_ in zip(blocks, X, dX, S, dS))
        comp_aff += (x + ap * dx) @ (s + ad * ds)
        sigma = min(1.0, max(0.0, comp_aff / comp)) ** 3 if comp > 0 else 0.0

        # corrector
        RcSi = [sigma * mu * Sij - Xj - a @ b_ @ Sij for Sij, Xj, a, b_ in zip(Si, X, dX, dS)]
        rc = sigma * mu - x * s - dx * ds
        dy, dX, dS, dx, ds, dlam = direction(RcSi, rc)
        ap, ad = steps(dX, dS, dx, ds)
        ap = min(1.0, tau * ap)
        ad = min(1.0, tau * ad)
        tau = 0.9 + 0.09 * min(ap, ad)
        history[-1] += [ap, ad, sigma]

        if not (np.isfinite(ap) and np.isfinite(ad)):
            status = Status.NUMERICAL_FAILURE
            break
        X = [Xj + ap * D for Xj, D in zip(X, dX)]
        x = x + ap * dx
        lam = lam + ap * dlam
        y = y + ad * dy
        S = [Sj + ad * D for Sj, D in zip(S, dS)]
        s = s + ad * ds

        stalls = stalls + 1 if max(ap, ad) < 1e-10 else 0
        if stalls >= 3:
            status = Status.NUMERICAL_FAILURE
            break

    return IpmResult(
        status=status, y=y,
        X=[blk.to_real(Xj) for blk, Xj in zip(blocks, X)],
        S=[blk.to_real(Sj) for blk, Sj in zip(blocks, S)],
        x=x, lam=lam,
        primal_objective=float(pobj), dual_objective=float(dobj), iterations=it,
        pinf=float(pinf), dinf=float(dinf), rel_gap=float(rel_gap), history=history,
    )


def _factor(M):
    """Cholesky of the Schur complement, nudging the diagonal if it has lost definiteness."""
    scale = max(np.abs(np.diag(M)).max(initial=0.0), 1e-300)
    for shift in (0.0, 1e-14, 1e-12, 1e-10):
        try:
            return la.cho_factor(M + shift * scale * np.eye(len(M)) if shift else M)
        except la.LinAlgError:
            continue
    return None
