'''
In-Repo Linear Programming (Two-Phase Simplex)

A dense-tableau simplex solver for the small linear programs of the toolkit: transport
feasibility for measure majorization, the spanning test for Alexandrov measures, and the
Chebyshev centre used to seed halfspace intersections. Witnesses must be reproducible, so
the pivoting is fully deterministic (Bland's rule) and no external solver is involved.

Problem Form:
-------------
    minimize    c·x
    subject to  A_eq x  = b_eq
                A_ub x <= b_ub
                x >= 0

Functions:
----------
solve_lp(c, A_eq, b_eq, A_ub, b_ub, tol, max_iter) → LPResult
    Two-phase solve. Phase I minimises the sum of artificials; phase II the real cost.

is_feasible(A_eq, b_eq, A_ub, b_ub, tol) → tuple[bool, ndarray | None]
    Phase I only; returns a feasible point when one exists.

Design Notes:
-------------
- Bland's rule (smallest eligible index, smallest basic index on ratio ties) rules out cycling.
- Rows are sign-flipped so every right-hand side is nonnegative before artificials are added.
- Artificials left in the basis after phase I are pivoted out, or their rows are dropped as redundant.
- 'iteration_limit' is reported instead of raising; callers decide what it means.

Dependencies:
-------------
- numpy
- config (tolerances)

Author:
-------
Support & Measure Project
'''

from dataclasses import dataclass
from typing import Optional
import numpy as np
from config import TOL

@dataclass
class LPResult:
    status: str                 # 'optimal', 'infeasible', 'unbounded', 'iteration_limit'
    x: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int

    @property
    def success(self):
        return self.status == "optimal"

def _stack(n, A_eq, b_eq, A_ub, b_ub):
    blocks, rhs, n_slack = [], [], 0
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        n_slack = A_ub.shape[0]
    width = n + n_slack
    if A_eq is not None and len(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        block = np.zeros((A_eq.shape[0], width))
        block[:, :n] = A_eq
        blocks.append(block)
        rhs.append(np.asarray(b_eq, dtype=float).reshape(-1))
    if n_slack:
        block = np.zeros((n_slack, width))
        block[:, :n] = A_ub
        block[:, n:] = np.eye(n_slack)
        blocks.append(block)
        rhs.append(np.asarray(b_ub, dtype=float).reshape(-1))
    if not blocks:
        return np.zeros((0, width)), np.zeros(0)
    return np.vstack(blocks), np.concatenate(rhs)

def _pivot(T, r, row, col):
    T[row] /= T[row, col]
    column = T[:, col].copy()
    column[row] = 0.0
    T -= np.outer(column, T[row])
    r -= r[col] * T[row]

def _run(T, r, basis, n_cols, tol, max_iter, counter):
    while True:
        eligible = np.flatnonzero(r[:n_cols] < -tol)
        if eligible.size == 0:
            return "optimal"
        if counter[0] >= max_iter:
            return "iteration_limit"
        col = int(eligible[0])
        positive = np.flatnonzero(T[:, col] > tol)
        if positive.size == 0:
            return "unbounded"
        ratios = T[positive, -1] / T[positive, col]
        best = ratios.min()
        ties = positive[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, row, col)
        basis[row] = col
        counter[0] += 1

def solve_lp(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, tol=None, max_iter=100000) -> LPResult:
    tol = TOL.lp if tol is None else tol
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    A, b = _stack(n, A_eq, b_eq, A_ub, b_ub)
    m, width = A.shape
    if m == 0:
        if np.any(c < -tol):
            return LPResult("unbounded", None, None, 0)
        return LPResult("optimal", np.zeros(n), 0.0, 0)

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # Phase I: one artificial per row.
    T = np.zeros((m, width + m + 1))
    T[:, :width] = A
    T[:, width:width + m] = np.eye(m)
    T[:, -1] = b
    basis = list(range(width, width + m))
    r = np.zeros(width + m + 1)
    r[width:width + m] = 1.0
    r -= T.sum(axis=0)
    counter = [0]
    status = _run(T, r, basis, width + m, tol, max_iter, counter)
    if status == "iteration_limit":
        return LPResult(status, None, None, counter[0])
    scale = max(1.0, float(np.abs(b).sum()))
    if -r[-1] > tol * scale * 10:
        return LPResult("infeasible", None, None, counter[0])

    # Drive artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] >= width:
            candidates = np.flatnonzero(np.abs(T[i, :width]) > tol)
            if candidates.size == 0:
                continue
            _pivot(T, r, i, int(candidates[0]))
            basis[i] = int(candidates[0])
        keep.append(i)
    T = np.hstack([T[keep, :width], T[keep, -1:]])
    basis = [basis[i] for i in keep]

    # Phase II.
    cost = np.zeros(width + 1)
    cost[:n] = c
    r = cost.copy()
    for i, j in enumerate(basis):
        r -= cost[j] * T[i]
    status = _run(T, r, basis, width, tol, max_iter, counter)
    if status != "optimal":
        return LPResult(status, None, None, counter[0])

    x = np.zeros(width)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult("optimal", x, float(c @ x), counter[0])

def is_feasible(A_eq=None, b_eq=None, A_ub=None, b_ub=None, n=None, tol=None):
    if n is None:
        n = np.atleast_2d(A_eq if A_eq is not None else A_ub).shape[1]
    result = solve_lp(np.zeros(n), A_eq, b_eq, A_ub, b_ub, tol=tol)
    if result.success:
        return True, result.x
    return False, None
