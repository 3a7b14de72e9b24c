"""Dense two-phase simplex with Bland's rule.

Solves  min c@x  subject to  A_ub@x <= b_ub,  A_eq@x == b_eq,  x >= 0.
Problem sizes in this package are tiny (tens of rows), so a dense tableau
with an anti-cycling pivot rule is both simple and reliable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPFailure

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float | None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _bland_iterate(T: np.ndarray, basis: np.ndarray, ncols: int, maxiter: int) -> str:
    """Run simplex iterations on tableau T (last row = reduced costs)."""
    m = T.shape[0] - 1
    for _ in range(maxiter):
        cost = T[-1, :ncols]
        entering = np.nonzero(cost < -PIVOT_TOL)[0]
        if entering.size == 0:
            return "optimal"
        col = int(entering[0])  # Bland: smallest index
        column = T[:m, col]
        positive = np.nonzero(column > PIVOT_TOL)[0]
        if positive.size == 0:
            return "unbounded"
        ratios = T[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + PIVOT_TOL * (1.0 + abs(best))]
        row = int(ties[np.argmin(basis[ties])])  # Bland: smallest basic index
        _pivot(T, basis, row, col)
    raise LPFailure("simplex iteration limit exceeded")


def solve_lp(
    c: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    *,
    maxiter: int = 50_000,
) -> LPResult:
    """Two-phase simplex over nonnegative variables."""
    c = np.asarray(c, dtype=float)
    nvar = c.shape[0]
    blocks = []
    rhs = []
    n_ub = 0
    if A_ub is not None and len(A_ub):
        A_ub = np.asarray(A_ub, dtype=float).reshape(-1, nvar)
        blocks.append(A_ub)
        rhs.append(np.asarray(b_ub, dtype=float).ravel())
        n_ub = A_ub.shape[0]
    if A_eq is not None and len(A_eq):
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, nvar)
        blocks.append(A_eq)
        rhs.append(np.asarray(b_eq, dtype=float).ravel())
    if not blocks:
        # Unconstrained over x >= 0: bounded iff c >= 0.
        if np.all(c >= -PIVOT_TOL):
            return LPResult("optimal", np.zeros(nvar), 0.0)
        return LPResult("unbounded", None, None)

    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = A.shape[0]

    slack = np.zeros((m, n_ub))
    slack[:n_ub, :n_ub] = np.eye(n_ub)
    A = np.hstack([A, slack])
    neg = b < 0
    A[neg] *= -1.0
    b = np.where(neg, -b, b)

    # Rows whose slack still has coefficient +1 start basic; others get
    # an artificial variable.
    needs_art = np.ones(m, dtype=bool)
    basis = np.full(m, -1, dtype=int)
    for i in range(n_ub):
        if not neg[i]:
            basis[i] = nvar + i
            needs_art[i] = False
    art_rows = np.nonzero(needs_art)[0]
    n_art = art_rows.size
    ncols = nvar + n_ub
    total = ncols + n_art

    T = np.zeros((m + 1, total + 1))
    T[:m, :ncols] = A
    T[:m, -1] = b
    for k, i in enumerate(art_rows):
        T[i, ncols + k] = 1.0
        basis[i] = ncols + k

    if n_art:
        # Phase 1: minimize the sum of artificials.
        T[-1, ncols:total] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        status = _bland_iterate(T, basis, total, maxiter)
        if status != "optimal":
            raise LPFailure("phase-1 simplex did not terminate at an optimum")
        scale = 1.0 + float(np.abs(b).max(initial=0.0))
        if -T[-1, -1] > FEAS_TOL * scale:
            return LPResult("infeasible", None, None)
        # Drive leftover artificials out of the basis.
        for i in range(m):
            if basis[i] >= ncols:
                pivots = np.nonzero(np.abs(T[i, :ncols]) > PIVOT_TOL)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    T[i] = 0.0  # redundant row
                    basis[i] = -1

    # Phase 2 objective.
    T[:, ncols:total] = 0.0
    T[-1] = 0.0
    T[-1, :nvar] = c
    for i in range(m):
        j = basis[i]
        if 0 <= j < ncols and abs(T[-1, j]) > 0.0:
            T[-1] -= T[-1, j] * T[i]
    status = _bland_iterate(T, basis, ncols, maxiter)
    if status == "unbounded":
        return LPResult("unbounded", None, None)

    x = np.zeros(ncols)
    for i in range(m):
        if 0 <= basis[i] < ncols:
            x[basis[i]] = T[i, -1]
    x = np.clip(x, 0.0, None)
    sol = x[:nvar]
    return LPResult("optimal", sol, float(c @ sol))


def solve_lp_mixed(
    c: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    *,
    free: np.ndarray | None = None,
    maxiter: int = 50_000,
) -> LPResult:
    """Like :func:`solve_lp` but columns flagged in ``free`` are unrestricted.

    Free columns are split into positive and negative parts internally.
    """
    c = np.asarray(c, dtype=float)
    nvar = c.shape[0]
    if free is None or not np.any(free):
        return solve_lp(c, A_ub, b_ub, A_eq, b_eq, maxiter=maxiter)
    free = np.asarray(free, dtype=bool)
    idx = np.nonzero(free)[0]

    def _split(M):
        if M is None or not len(M):
            return None
        M = np.asarray(M, dtype=float).reshape(-1, nvar)
        return np.hstack([M, -M[:, idx]])

    c2 = np.concatenate([c, -c[idx]])
    res = solve_lp(c2, _split(A_ub), b_ub, _split(A_eq), b_eq, maxiter=maxiter)
    if not res.optimal:
        return res
    x = res.x[:nvar].copy()
    x[idx] -= res.x[nvar:]
    return LPResult("optimal", x, res.value)
