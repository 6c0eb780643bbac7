"""Dense two-phase tableau simplex with Bland's anticycling rule.

Problems are stated as

    minimise    c @ x
    subject to  A_eq @ x == b_eq
                A_ineq[i] @ x  (<= or >=)  b_ineq[i]
                lo <= x <= hi

and converted internally to ``A x = b, x >= 0`` with slack, split and
artificial columns.  Redundant equality rows (common in no-signalling
systems) are detected after phase one and dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError

PIVOT_TOL = 1e-9
COST_TOL = 1e-10
FEAS_TOL = 1e-9


@dataclass
class LpProblem:
    objective: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ineq: np.ndarray | None = None
    b_ineq: np.ndarray | None = None
    senses: list[str] | None = None
    bounds: list[tuple[float | None, float | None]] | None = None
    names: list[str] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "equality")
        self.A_ineq, self.b_ineq = _rows(self.A_ineq, self.b_ineq, n, "inequality")
        if self.senses is None:
            self.senses = ["<="] * len(self.b_ineq)
        if len(self.senses) != len(self.b_ineq) or any(s not in ("<=", ">=") for s in self.senses):
            raise ValueError("senses must hold one of '<=' / '>=' per inequality row")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise ValueError(f"expected {n} bounds, got {len(self.bounds)}")
        for arr in (self.objective, self.A_eq, self.b_eq, self.A_ineq, self.b_ineq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("problem data must be finite")

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def lower(self) -> np.ndarray:
        return np.array([-np.inf if lo is None else lo for lo, _ in self.bounds], dtype=float)

    def upper(self) -> np.ndarray:
        return np.array([np.inf if hi is None else hi for _, hi in self.bounds], dtype=float)

    def residual(self, x: np.ndarray) -> float:
        """Largest violation of any constraint or bound at ``x``."""
        r = [0.0]
        if len(self.b_eq):
            r.append(np.max(np.abs(self.A_eq @ x - self.b_eq)))
        if len(self.b_ineq):
            lhs = self.A_ineq @ x - self.b_ineq
            sign = np.where(np.array(self.senses) == "<=", 1.0, -1.0)
            r.append(np.max(np.clip(sign * lhs, 0.0, None)))
        r.append(np.max(np.clip(self.lower() - x, 0.0, None), initial=0.0))
        r.append(np.max(np.clip(x - self.upper(), 0.0, None), initial=0.0))
        return float(max(r))


def _rows(A, b, n, what):
    if A is None or (hasattr(A, "__len__") and len(A) == 0):
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape != (b.size, n):
        raise ValueError(f"{what} rows have shape {A.shape}, expected ({b.size}, {n})")
    return A, b


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float
    x: np.ndarray
    max_constraint_residual: float
    iterations: int = 0


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)
        self.row_ids = list(range(m))
        self.iterations = 0

    @property
    def m(self):
        return self.T.shape[0] - 1

    def set_costs(self, cost: np.ndarray):
        n = self.T.shape[1] - 1
        self.T[-1, :n] = cost
        self.T[-1, n] = 0.0
        for i, j in enumerate(self.basis):
            if self.T[-1, j] != 0.0:
                self.T[-1] -= self.T[-1, j] * self.T[i]

    def pivot(self, row: int, col: int):
        T = self.T
        T[row] /= T[row, col]
        f = T[:, col].copy()
        f[row] = 0.0
        T -= np.outer(f, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def run(self, allowed: np.ndarray, max_iter: int) -> str:
        T = self.T
        for _ in range(max_iter):
            red = T[-1, :-1]
            cand = np.flatnonzero((red < -COST_TOL) & allowed)
            if cand.size == 0:
                return "optimal"
            col = int(cand[0])  # Bland: lowest index
            colv = T[:-1, col]
            pos = colv > PIVOT_TOL
            if not np.any(pos):
                return "unbounded"
            ratios = np.full(self.m, np.inf)
            ratios[pos] = T[:-1, -1][pos] / colv[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
            row = min(ties, key=lambda i: self.basis[i])  # Bland: lowest leaving index
            self.pivot(int(row), col)
        raise ConvergenceError(f"simplex did not terminate in {max_iter} pivots")

    def drop_row(self, row: int):
        self.T = np.delete(self.T, row, axis=0)
        del self.basis[row]
        del self.row_ids[row]


def _standard_form(prob: LpProblem):
    """Map to ``A y = b, y >= 0`` with ``x = offset + M y``."""
    n = prob.n_vars
    lo, hi = prob.lower(), prob.upper()
    cols = []  # (original index, sign, offset) per standard column
    offset = np.zeros(n)
    extra_rows = []  # (std column, rhs) for finite upper bounds y <= hi - lo
    for j in range(n):
        if np.isfinite(lo[j]):
            offset[j] = lo[j]
            cols.append((j, 1.0))
            if np.isfinite(hi[j]):
                extra_rows.append((len(cols) - 1, hi[j] - lo[j]))
        elif np.isfinite(hi[j]):
            offset[j] = hi[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    M = np.zeros((n, k))
    for s, (j, sign) in enumerate(cols):
        M[j, s] = sign
    # x = offset + M y

    eq_A = prob.A_eq @ M
    eq_b = prob.b_eq - prob.A_eq @ offset
    sign = np.where(np.array(prob.senses) == "<=", 1.0, -1.0)
    in_A = (prob.A_ineq @ M) * sign[:, None]
    in_b = (prob.b_ineq - prob.A_ineq @ offset) * sign
    ub_A = np.zeros((len(extra_rows), k))
    ub_b = np.zeros(len(extra_rows))
    for r, (s, cap) in enumerate(extra_rows):
        ub_A[r, s] = 1.0
        ub_b[r] = cap
    le_A = np.vstack([in_A, ub_A])
    le_b = np.concatenate([in_b, ub_b])
    n_le = le_A.shape[0]
    m_eq = eq_A.shape[0]
    A = np.zeros((m_eq + n_le, k + n_le))
    A[:m_eq, :k] = eq_A
    A[m_eq:, :k] = le_A
    A[m_eq:, k:] = np.eye(n_le)
    b = np.concatenate([eq_b, le_b])
    c = np.concatenate([prob.objective @ M, np.zeros(n_le)])
    slack_rows = {m_eq + r: k + r for r in range(n_le)}
    return A, b, c, M, offset, slack_rows


def lp_solve(prob: LpProblem, max_iter: int = 50_000) -> LpSolution:
    """Solve ``prob`` exactly up to floating-point pivoting; deterministic."""
    A, b, c, M, offset, slack_rows = _standard_form(prob)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # start from slacks where they are usable, artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        s = slack_rows.get(i)
        if s is not None and not neg[i]:
            basis.append(s)
        else:
            basis.append(None)
            art_rows.append(i)
    n_art = len(art_rows)
    A1 = np.hstack([A, np.zeros((m, n_art))])
    for a, i in enumerate(art_rows):
        A1[i, n + a] = 1.0
        basis[i] = n + a
    tab = _Tableau(A1, b, basis)
    is_art = np.zeros(n + n_art, dtype=bool)
    is_art[n:] = True

    if n_art:
        tab.set_costs(is_art.astype(float))
        tab.run(np.ones(n + n_art, dtype=bool), max_iter)
        if -tab.T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max()):
            x = offset.copy()
            return LpSolution("infeasible", np.nan, x, prob.residual(x), tab.iterations)
        # pivot remaining artificials out, or drop their (redundant) rows
        i = 0
        while i < tab.m:
            if is_art[tab.basis[i]]:
                row = tab.T[i, :n]
                nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if nz.size:
                    tab.pivot(i, int(nz[np.argmax(np.abs(row[nz]))]))
                else:
                    tab.drop_row(i)
                    continue
            i += 1
        tab.T = np.delete(tab.T, np.arange(n, n + n_art), axis=1)

    tab.set_costs(c)
    status = tab.run(np.ones(n, dtype=bool), max_iter)
    if status == "unbounded":
        x = offset.copy()
        return LpSolution("unbounded", -np.inf, x, np.nan, tab.iterations)

    # polish: re-solve the final basis directly against the kept rows
    y = np.zeros(n)
    y[tab.basis] = tab.T[:-1, -1]
    B = A[tab.row_ids][:, tab.basis]
    try:
        y_b = np.linalg.solve(B, b[tab.row_ids])
        if np.all(y_b > -FEAS_TOL):
            y[tab.basis] = y_b
    except np.linalg.LinAlgError:
        pass
    y = np.clip(y, 0.0, None)
    x = offset + M @ y[: M.shape[1]]
    return LpSolution("optimal", float(prob.objective @ x), x, prob.residual(x), tab.iterations)


def reference_solve(prob: LpProblem) -> LpSolution:
    """Solve ``prob`` with scipy's HiGHS; an independent route for cross-checks."""
    from scipy.optimize import linprog

    sign = np.where(np.array(prob.senses) == "<=", 1.0, -1.0)
    res = linprog(
        prob.objective,
        A_ub=(prob.A_ineq * sign[:, None]) if len(prob.b_ineq) else None,
        b_ub=(prob.b_ineq * sign) if len(prob.b_ineq) else None,
        A_eq=prob.A_eq if len(prob.b_eq) else None,
        b_eq=prob.b_eq if len(prob.b_eq) else None,
        bounds=prob.bounds,
        method="highs",
    )
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    if status != "optimal":
        x = np.full(prob.n_vars, np.nan)
        return LpSolution(status, np.nan, x, np.nan)
    return LpSolution(status, float(res.fun), res.x, prob.residual(res.x), int(res.nit))
