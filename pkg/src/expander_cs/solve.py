"""Estimators and the dense LP core.

The three l1 estimators share one scaling convention: the lasso objective
is ||y - X b||_2^2 + lam ||b||_1 with no 1/2 and no 1/n factor. Under that
scaling the coordinate-descent soft threshold sits at lam/2 and the
all-zero solution appears exactly at lam >= 2 ||X^T y||_inf; most library
lassos scale differently, which is why the solver lives here.

Linear programs are solved by a dense two-phase simplex with Bland's
smallest-index anti-cycling rule. Instances are desk scale (a few hundred
variables), where the dense tableau is fast enough and every pivot is
auditable. Optimality means all reduced costs >= -1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix
from .errors import SolverStatusError

RC_TOL = 1e-10   # reduced-cost optimality tolerance
PIV_TOL = 1e-9   # smallest acceptable pivot magnitude


# ---------------------------------------------------------------------------
# linear programming
# ---------------------------------------------------------------------------

@dataclass
class LinearProgram:
    """min c^T x subject to A x = b, x >= 0."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64)
        self.A = np.asarray(self.A, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.A.ndim != 2 or self.c.ndim != 1 or self.b.ndim != 1:
            raise ValueError("c and b must be vectors, A a matrix")
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise ValueError(f"inconsistent LP dimensions: A is {m}x{n}, "
                             f"c has {self.c.shape[0]}, b has {self.b.shape[0]}")


@dataclass
class LpResult:
    status: str          # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None
    iterations: int


def _pivot(T: np.ndarray, zrow: np.ndarray, basis: np.ndarray,
           in_basis: np.ndarray, prow: int, pcol: int) -> None:
    T[prow] /= T[prow, pcol]
    factor = T[:, pcol].copy()
    factor[prow] = 0.0
    T -= np.outer(factor, T[prow])
    zrow -= zrow[pcol] * T[prow]
    T[:, pcol] = 0.0
    T[prow, pcol] = 1.0
    zrow[pcol] = 0.0
    in_basis[basis[prow]] = False
    in_basis[pcol] = True
    basis[prow] = pcol


def _simplex(T: np.ndarray, zrow: np.ndarray, basis: np.ndarray,
             in_basis: np.ndarray, allowed: np.ndarray,
             max_iter: int) -> tuple[str, int]:
    """Bland-rule simplex on a canonical tableau. T's last column is the
    right side; zrow holds reduced costs with -objective in its last slot."""
    ncols = T.shape[1] - 1
    it = 0
    while True:
        pcol = -1
        for j in range(ncols):
            if allowed[j] and not in_basis[j] and zrow[j] < -RC_TOL:
                pcol = j
                break
        if pcol < 0:
            return "optimal", it
        col = T[:, pcol]
        best_ratio = math.inf
        prow = -1
        for i in range(T.shape[0]):
            if col[i] > PIV_TOL:
                ratio = T[i, -1] / col[i]
                if (ratio < best_ratio - PIV_TOL
                        or (abs(ratio - best_ratio) <= PIV_TOL
                            and (prow < 0 or basis[i] < basis[prow]))):
                    best_ratio = ratio
                    prow = i
        if prow < 0:
            return "unbounded", it
        _pivot(T, zrow, basis, in_basis, prow, pcol)
        it += 1
        if it > max_iter:
            raise RuntimeError(f"simplex exceeded {max_iter} pivots")


def lp_solve(lp: LinearProgram, max_iter: int = 200000) -> LpResult:
    """Two-phase dense simplex returning an optimal basic solution.

    Rows with negative right side are negated; unit columns seed the
    initial basis where possible and artificial variables fill the rest.
    """
    A = lp.A.copy()
    b = lp.b.copy()
    c = lp.c
    m, n = A.shape
    if m == 0:
        if np.any(c < -RC_TOL):
            return LpResult("unbounded", None, None, 0)
        return LpResult("optimal", np.zeros(n), 0.0, 0)

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # crash basis: exact unit columns claim their rows, artificials fill in
    basis = np.full(m, -1, dtype=np.int64)
    claimed = np.zeros(m, dtype=bool)
    for j in range(n):
        col = A[:, j]
        nz = np.nonzero(col)[0]
        if len(nz) == 1 and col[nz[0]] == 1.0 and not claimed[nz[0]]:
            basis[nz[0]] = j
            claimed[nz[0]] = True
    art_rows = [i for i in range(m) if basis[i] < 0]
    n_art = len(art_rows)
    ncols = n + n_art

    T = np.zeros((m, ncols + 1))
    T[:, :n] = A
    for t, i in enumerate(art_rows):
        T[i, n + t] = 1.0
        basis[i] = n + t
    T[:, -1] = b
    in_basis = np.zeros(ncols, dtype=bool)
    in_basis[basis] = True

    iterations = 0
    if n_art:
        cost1 = np.zeros(ncols)
        cost1[n:] = 1.0
        cost_b = cost1[basis]
        zrow = np.empty(ncols + 1)
        zrow[:ncols] = cost1 - cost_b @ T[:, :ncols]
        zrow[-1] = -float(cost_b @ T[:, -1])
        allowed = np.ones(ncols, dtype=bool)
        status, it = _simplex(T, zrow, basis, in_basis, allowed, max_iter)
        iterations += it
        if status != "optimal":
            raise AssertionError("phase 1 cannot be unbounded")
        if -zrow[-1] > 1e-8 * (1.0 + float(np.abs(b).sum())):
            return LpResult("infeasible", None, None, iterations)
        # drive leftover artificials out or drop their (redundant) rows
        drop = []
        for i in range(m):
            if basis[i] >= n:
                pcol = -1
                for j in range(n):
                    if not in_basis[j] and abs(T[i, j]) > PIV_TOL:
                        pcol = j
                        break
                if pcol >= 0:
                    _pivot(T, zrow, basis, in_basis, i, pcol)
                    iterations += 1
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            for i in drop:
                in_basis[basis[i]] = False
            T = T[keep]
            basis = basis[keep]
            m = len(keep)

    cost2 = np.zeros(ncols)
    cost2[:n] = c
    cost_b = cost2[basis]
    zrow = np.empty(ncols + 1)
    zrow[:ncols] = cost2 - cost_b @ T[:, :ncols]
    zrow[-1] = -float(cost_b @ T[:, -1])
    allowed = np.zeros(ncols, dtype=bool)
    allowed[:n] = True
    status, it = _simplex(T, zrow, basis, in_basis, allowed, max_iter)
    iterations += it
    if status == "unbounded":
        return LpResult("unbounded", None, None, iterations)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    np.clip(x, 0.0, None, out=x)
    return LpResult("optimal", x, float(lp.c @ x), iterations)


# ---------------------------------------------------------------------------
# lasso by cyclic coordinate descent
# ---------------------------------------------------------------------------

@dataclass
class LassoSolution:
    beta: np.ndarray
    kkt_residual: float
    iterations: int
    objective: float
    converged: bool


def _soft(a: float, t: float) -> float:
    return math.copysign(max(abs(a) - t, 0.0), a)


def lasso(X: DesignMatrix, y, lam: float, tol: float = 1e-8,
          max_iter: int = 100000) -> LassoSolution:
    """Minimize ||y - X b||_2^2 + lam ||b||_1 by cyclic coordinate descent.

    Coordinate update: b_j <- soft(X_j^T (y - X b + X_j b_j), lam/2) / ||X_j||^2.
    Convergence is declared when the KKT residual
    max_j |2 X_j^T (y - X b) - lam sign(b_j)| (nonzero b_j) resp.
    max(0, |2 X_j^T (y - X b)| - lam) (zero b_j) drops to ``tol``.
    Coordinates cycle in index order; no randomization, so runs repeat.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.n,):
        raise ValueError(f"expected y of length {X.n}, got {y.shape}")
    p, d = X.p, X.d
    colsq = 1.0 / d  # every column has squared l2 norm 1/d
    thresh = lam / 2.0
    cols = X.column_rows
    beta = np.zeros(p)
    resid = y.copy()

    converged = False
    it = 0
    while it < max_iter:
        it += 1
        for j in range(p):
            rows = cols[j]
            bj = beta[j]
            rho = float(resid[rows].sum()) / d + bj * colsq
            bnew = _soft(rho, thresh) / colsq
            if bnew != bj:
                resid[rows] += (bj - bnew) / d
                beta[j] = bnew
        corr = X.transpose_matvec(resid)
        kkt = 0.0
        for j in range(p):
            if beta[j] != 0.0:
                r_j = abs(2.0 * corr[j] - lam * math.copysign(1.0, beta[j]))
            else:
                r_j = max(0.0, abs(2.0 * corr[j]) - lam)
            if r_j > kkt:
                kkt = r_j
        if kkt <= tol:
            converged = True
            break

    objective = float(resid @ resid) + lam * float(np.abs(beta).sum())
    return LassoSolution(beta, kkt, it, objective, converged)


# ---------------------------------------------------------------------------
# Dantzig selector and basis pursuit as LPs
# ---------------------------------------------------------------------------

@dataclass
class DantzigSolution:
    beta: np.ndarray
    constraint_slack: float   # ||X^T (y - X beta)||_inf at the solution
    l1_norm: float
    status: str


def dantzig(X: DesignMatrix, y, lam: float) -> DantzigSolution:
    """min ||b||_1 subject to ||X^T (y - X b)||_inf <= lam.

    Solved in standard form with b = u - v and one slack block per
    inequality side. Any optimal vertex is acceptable; the deterministic
    pivot rule fixes which one is returned.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.n,):
        raise ValueError(f"expected y of length {X.n}, got {y.shape}")
    p = X.p
    dense = X.to_dense()
    gram = dense.T @ dense
    corr = X.transpose_matvec(y)

    A = np.zeros((2 * p, 4 * p))
    A[:p, :p] = -gram
    A[:p, p:2 * p] = gram
    A[:p, 2 * p:3 * p] = np.eye(p)
    A[p:, :p] = gram
    A[p:, p:2 * p] = -gram
    A[p:, 3 * p:] = np.eye(p)
    b = np.concatenate([lam - corr, lam + corr])
    c = np.concatenate([np.ones(2 * p), np.zeros(2 * p)])

    res = lp_solve(LinearProgram(c, A, b))
    if res.status == "unbounded":
        raise AssertionError("Dantzig LP cannot be unbounded: objective >= 0")
    if res.status != "optimal":
        raise SolverStatusError(f"Dantzig LP is {res.status}")
    beta = res.x[:p] - res.x[p:2 * p]
    slack = float(np.max(np.abs(X.transpose_matvec(y - X.matvec(beta)))))
    if slack > lam + 1e-8:
        raise SolverStatusError(
            f"Dantzig solution violates its constraint: {slack} > {lam} + 1e-8")
    return DantzigSolution(beta, slack, float(np.abs(beta).sum()), res.status)


def _independent_rows(M: np.ndarray, tol: float = 1e-10) -> list[int]:
    """Indices of a maximal linearly independent row subset.

    Greedy Gram-Schmidt scan (orthogonalized twice for stability); stops as
    soon as the row space is exhausted, so heavily redundant systems cost
    about rank-many passes.
    """
    M = np.asarray(M, dtype=np.float64)
    m, n = M.shape
    limit = min(m, n)
    basis = np.empty((0, n))
    kept: list[int] = []
    for i in range(m):
        if len(kept) == limit:
            break
        r = M[i].copy()
        norm0 = float(np.linalg.norm(r))
        if norm0 <= tol:
            continue
        if kept:
            r -= basis.T @ (basis @ r)
            r -= basis.T @ (basis @ r)
        norm = float(np.linalg.norm(r))
        if norm > tol * max(1.0, norm0):
            kept.append(i)
            basis = np.vstack([basis, r / norm])
    return kept


def basis_pursuit(X: DesignMatrix, y) -> np.ndarray:
    """min ||b||_1 subject to X b = y; raises when y is not in the range."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.n,):
        raise ValueError(f"expected y of length {X.n}, got {y.shape}")
    dense = X.to_dense()
    scale = 1.0 + float(np.max(np.abs(y))) if y.size else 1.0
    fit = np.linalg.lstsq(dense, y, rcond=None)[0]
    if float(np.max(np.abs(dense @ fit - y))) > 1e-8 * scale:
        raise SolverStatusError("basis pursuit is infeasible: y is not in the range of X")

    rows = _independent_rows(dense)
    A = np.concatenate([dense[rows], -dense[rows]], axis=1)
    b = y[rows]
    c = np.ones(2 * X.p)
    res = lp_solve(LinearProgram(c, A, b))
    if res.status != "optimal":
        raise SolverStatusError(f"basis pursuit LP is {res.status}")
    beta = res.x[:X.p] - res.x[X.p:]
    if float(np.max(np.abs(X.matvec(beta) - y))) > 1e-7 * scale:
        raise SolverStatusError("basis pursuit solution fails the full equality system")
    return beta


def ols_on_support(X: DesignMatrix, y, support) -> np.ndarray:
    """Least squares restricted to the given columns, zero elsewhere.

    Uses an SVD-based solve, so a rank-deficient column subset yields the
    minimum-norm coefficient vector (duplicate columns split evenly).
    """
    y = np.asarray(y, dtype=np.float64)
    support = sorted(int(i) for i in support)
    for i in support:
        if not 0 <= i < X.p:
            raise ValueError(f"support index {i} outside [0, {X.p})")
    beta = np.zeros(X.p)
    if not support:
        return beta
    A = np.zeros((X.n, len(support)))
    v = 1.0 / X.d
    for t, i in enumerate(support):
        A[X.column_rows[i], t] = v
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    beta[support] = coef
    return beta
