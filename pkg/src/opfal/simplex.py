"""Dense two-phase primal simplex for linear programs with boxed variables.

Solves ``min c@x  s.t.  A@x = b,  lo <= x <= hi``. One bound per variable may
be infinite but not both (every LP built here boxes its variables). Pricing
uses Dantzig's rule and falls back to Bland's rule after a run of degenerate
pivots, so the method cannot cycle. The result carries the optimal basis,
dual values and reduced costs: binding-constraint extraction and
complementary-slackness checks read off them directly.

Phase 1 starts each structural variable at its finite bound of least
magnitude and adds one signed artificial per row; after feasibility is
proven the artificials are frozen at zero and phase 2 reuses the same
iteration loop with the real costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AT_LOWER = 0
AT_UPPER = 1

_DEGEN_STEP = 1e-10
_DEGEN_RUN_LIMIT = 12


class SimplexError(RuntimeError):
    pass


class UnboundedLpError(SimplexError):
    pass


class SimplexStallError(SimplexError):
    pass


class InfeasibleLpError(SimplexError):
    """Phase 1 could not zero the constraint residual."""

    def __init__(self, residual: float):
        super().__init__(f"LP infeasible; phase-1 residual {residual:.6g}")
        self.residual = residual


@dataclass
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        m, n = self.A.shape
        if self.b.shape != (m,) or self.c.shape != (n,):
            raise ValueError("inconsistent LP dimensions")
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("bound vectors must match variable count")
        if np.any(self.lo > self.hi):
            raise ValueError("lo > hi for some variable")
        if np.any(~np.isfinite(self.lo) & ~np.isfinite(self.hi)):
            raise ValueError("every variable needs at least one finite bound")


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_costs: np.ndarray
    basis: np.ndarray
    cs_residual: float
    duality_gap: float
    iterations: int


def _start_value(lo: float, hi: float) -> tuple[float, int]:
    if not np.isfinite(lo):
        return hi, AT_UPPER
    if not np.isfinite(hi):
        return lo, AT_LOWER
    return (lo, AT_LOWER) if abs(lo) <= abs(hi) else (hi, AT_UPPER)


class _Worker:
    """Shared iteration state across both phases."""

    def __init__(self, A: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray):
        self.A = A
        self.b = b
        self.lo = lo
        self.hi = hi
        self.m, self.n = A.shape
        self.basis = np.zeros(self.m, dtype=int)
        self.status = np.zeros(self.n, dtype=np.int8)
        self.in_basis = np.zeros(self.n, dtype=bool)
        self.x = np.zeros(self.n)
        self.duals = np.zeros(self.m)
        self.reduced = np.zeros(self.n)

    def _refresh(self, cost: np.ndarray):
        nb = ~self.in_basis
        bound_val = np.where(self.status == AT_UPPER, self.hi, self.lo)
        self.x[nb] = bound_val[nb]
        Bmat = self.A[:, self.basis]
        rhs = self.b - self.A[:, nb] @ self.x[nb]
        self.x[self.basis] = np.linalg.solve(Bmat, rhs)
        self.duals = np.linalg.solve(Bmat.T, cost[self.basis])
        self.reduced = cost - self.A.T @ self.duals
        self.reduced[self.basis] = 0.0

    def iterate(self, cost: np.ndarray, tol: float, max_iter: int) -> int:
        degen_run = 0
        for it in range(max_iter):
            self._refresh(cost)
            movable = ~self.in_basis & (self.lo < self.hi)
            want_up = movable & (self.status == AT_LOWER) & (self.reduced < -tol)
            want_dn = movable & (self.status == AT_UPPER) & (self.reduced > tol)
            eligible = np.flatnonzero(want_up | want_dn)
            if eligible.size == 0:
                return it
            if degen_run >= _DEGEN_RUN_LIMIT:
                j = int(eligible[0])  # Bland: lowest index
            else:
                j = int(eligible[np.argmax(np.abs(self.reduced[eligible]))])
            sigma = 1.0 if self.status[j] == AT_LOWER else -1.0

            Bmat = self.A[:, self.basis]
            w = np.linalg.solve(Bmat, self.A[:, j])
            # basic values move by -sigma * t * w as the entering variable moves t
            step = self.hi[j] - self.lo[j]
            leave_row = -1
            leave_status = AT_LOWER
            for i in range(self.m):
                wi = sigma * w[i]
                bi = self.basis[i]
                if wi > tol:
                    cap = max((self.x[bi] - self.lo[bi]), 0.0) / wi
                    hit = AT_LOWER
                elif wi < -tol:
                    cap = max((self.hi[bi] - self.x[bi]), 0.0) / (-wi)
                    hit = AT_UPPER
                else:
                    continue
                if cap < step - 1e-12:
                    step, leave_row, leave_status = cap, i, hit
                elif cap < step + 1e-12 and leave_row >= 0 and bi < self.basis[leave_row]:
                    leave_row, leave_status = i, hit
                elif cap < step + 1e-12 and leave_row < 0 and np.isfinite(step):
                    # tie with a bound flip: prefer the basis exchange
                    leave_row, leave_status = i, hit
            if not np.isfinite(step) and leave_row < 0:
                raise UnboundedLpError("improving ray with no blocking bound")

            degen_run = degen_run + 1 if step <= _DEGEN_STEP else 0
            if leave_row < 0:
                self.status[j] ^= 1  # bound flip, basis unchanged
            else:
                bi = self.basis[leave_row]
                self.in_basis[bi] = False
                self.status[bi] = leave_status
                self.basis[leave_row] = j
                self.in_basis[j] = True
        raise SimplexStallError(f"no convergence in {max_iter} iterations")


def solve_lp(
    problem: LpProblem,
    *,
    tol: float = 1e-9,
    feas_tol: float = 1e-7,
    max_iter: int | None = None,
) -> LpSolution:
    A, b, c, lo, hi = problem.A, problem.b, problem.c, problem.lo, problem.hi
    m, n = A.shape
    if max_iter is None:
        max_iter = 200 * (m + n + 10)

    if m == 0:
        # pure box problem: each variable sits at its cheaper bound
        x = np.where(c > 0, lo, np.where(c < 0, hi, np.where(np.isfinite(lo), lo, hi)))
        if np.any(~np.isfinite(x)):
            raise UnboundedLpError("free improving variable without constraints")
        return LpSolution(
            x=x,
            objective=float(c @ x),
            duals=np.zeros(0),
            reduced_costs=c.copy(),
            basis=np.zeros(0, dtype=int),
            cs_residual=0.0,
            duality_gap=0.0,
            iterations=0,
        )

    start = [_start_value(lo[j], hi[j]) for j in range(n)]
    x0 = np.array([s[0] for s in start])
    status0 = np.array([s[1] for s in start], dtype=np.int8)
    resid = b - A @ x0
    art_sign = np.where(resid >= 0, 1.0, -1.0)

    Afull = np.hstack([A, np.diag(art_sign)])
    lo_full = np.concatenate([lo, np.zeros(m)])
    hi_full = np.concatenate([hi, np.full(m, np.inf)])

    w = _Worker(Afull, b, lo_full, hi_full)
    w.status[:n] = status0
    w.basis = np.arange(n, n + m)
    w.in_basis[n:] = True

    phase1_c = np.concatenate([np.zeros(n), np.ones(m)])
    it1 = w.iterate(phase1_c, tol, max_iter)
    w._refresh(phase1_c)
    phase1_obj = float(phase1_c @ w.x)
    if phase1_obj > feas_tol:
        raise InfeasibleLpError(phase1_obj)

    w.hi[n:] = 0.0  # artificials frozen; any still basic are pinned at zero
    phase2_c = np.concatenate([c, np.zeros(m)])
    it2 = w.iterate(phase2_c, tol, max_iter)
    w._refresh(phase2_c)

    xs = np.clip(w.x[:n], lo, hi)
    d = w.reduced[:n]
    lam = np.maximum(d, 0.0)
    mu = np.maximum(-d, 0.0)
    comp_lo = np.where(np.isfinite(lo), lam * (xs - lo), np.where(lam > tol, np.inf, 0.0))
    comp_hi = np.where(np.isfinite(hi), mu * (hi - xs), np.where(mu > tol, np.inf, 0.0))
    return LpSolution(
        x=xs,
        objective=float(c @ xs),
        duals=w.duals.copy(),
        reduced_costs=d.copy(),
        basis=w.basis.copy(),
        cs_residual=float(max(comp_lo.max(initial=0.0), comp_hi.max(initial=0.0))),
        duality_gap=float(comp_lo.sum() + comp_hi.sum()),
        iterations=it1 + it2,
    )
