"""Equality-constrained L1 minimization ``min ||x||_1  s.t.  A x = b`` by revised simplex.

The LP is solved in the split form ``x = u - v`` with ``u, v >= 0``, plus one
logical variable per row fixed at zero.  Column ``j`` therefore appears twice,
as ``+a_j`` and ``-a_j``, both with unit cost.

The solver is a dual revised simplex.  The all-logical basis has multipliers
``y = 0``, which is dual feasible because every cost is nonnegative, and only the
rows with ``b_i != 0`` start out primal infeasible.  Dual feasibility does not
depend on ``b``, so an optimal basis from a nearby right-hand side is always a
valid warm start.

At optimality ``||A^T y||_inf <= 1`` and ``b . y = ||x||_1``; ``y`` is returned
as the dual certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .stabilizers import AMatrix

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
_PRIMAL_TOL = 1e-11
_DUAL_TOL = 1e-11
_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 50
_DEGENERATE_STREAK = 50

LOGICAL = -1


class L1SolverError(RuntimeError):
    pass


class InfeasibleError(L1SolverError):
    """``b`` is not in the column span of ``A``."""


class IterationLimitError(L1SolverError):
    """Pivot budget exhausted; ``incumbent`` holds the last basic solution."""

    def __init__(self, message: str, incumbent: "L1Solution | None" = None):
        super().__init__(message)
        self.incumbent = incumbent


def _ell_from_matrix(a) -> tuple[np.ndarray, np.ndarray, int]:
    csc = sp.csc_matrix(a, dtype=float)
    csc.eliminate_zeros()
    m, n = csc.shape
    counts = np.diff(csc.indptr)
    k = max(int(counts.max()) if n else 1, 1)
    rows = np.zeros((n, k), dtype=np.int32)
    vals = np.zeros((n, k), dtype=np.float64)
    for j in range(n):
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        rows[j, : hi - lo] = csc.indices[lo:hi]
        vals[j, : hi - lo] = csc.data[lo:hi]
    return rows, vals, m


_ELL_CACHE: dict[int, tuple] = {}


def _ell(a) -> tuple[np.ndarray, np.ndarray, int]:
    if isinstance(a, AMatrix):
        hit = _ELL_CACHE.get(id(a))
        if hit is not None and hit[0] is a:
            return hit[1]
        ell = (np.ascontiguousarray(a.rows, dtype=np.int32), np.ascontiguousarray(a.vals, dtype=np.float64), a.n_rows)
        _ELL_CACHE[id(a)] = (a, ell)
        return ell
    return _ell_from_matrix(a)


@dataclass(eq=False)
class L1Problem:
    """``min ||x||_1`` subject to ``A x = b``.

    ``A`` may be an :class:`AMatrix`, a scipy sparse matrix or a dense array.
    """

    A: object
    b: np.ndarray
    tolerance: float = DEFAULT_TOL
    _ell: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float).ravel()
        if not np.all(np.isfinite(self.b)):
            raise ValueError("b must be finite")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        self._ell = _ell(self.A)
        if self._ell[2] != self.b.size:
            raise ValueError(f"A has {self._ell[2]} rows but b has length {self.b.size}")
        if self.n_cols == 0:
            raise ValueError("A has no columns")

    @property
    def n_rows(self) -> int:
        return self._ell[2]

    @property
    def n_cols(self) -> int:
        return self._ell[0].shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        rows, vals, m = self._ell
        out = np.zeros(m)
        np.add.at(out, rows.ravel(), (vals * np.asarray(x, dtype=float)[:, None]).ravel())
        return out

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        rows, vals, _ = self._ell
        return kernels.column_dots(rows, vals, np.ascontiguousarray(y, dtype=float))

    @property
    def _csc(self) -> sp.csc_matrix:
        rows, vals, m = self._ell
        n, k = rows.shape
        cols = np.repeat(np.arange(n), k)
        return sp.csc_matrix((vals.ravel(), (rows.ravel(), cols)), shape=(m, n))

    def with_rhs(self, b: np.ndarray) -> "L1Problem":
        return L1Problem(self.A, b, self.tolerance)


@dataclass
class L1Solution:
    """Optimal point of an :class:`L1Problem`.

    ``basis`` encodes the final basis for warm starts: entry ``2j`` is ``+a_j``,
    ``2j + 1`` is ``-a_j`` and ``-1`` is the row's logical variable.  It is
    ``None`` when the solution came from the HiGHS fallback.
    """

    x: np.ndarray
    l1_norm: float
    dual_certificate: np.ndarray
    residual: float
    basis: np.ndarray | None
    iterations: int = 0
    degenerate_pivots: int = 0
    gap: float = 0.0
    dual_infeasibility: float = 0.0
    method: str = "dual-simplex"

    def diagnostics(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "degenerate_pivots": self.degenerate_pivots,
            "gap": self.gap,
            "residual": self.residual,
        }


def verify_certificate(problem: L1Problem, solution: L1Solution, tolerance: float | None = None) -> bool:
    """Primal feasibility, dual feasibility and zero duality gap, all within tolerance."""
    tol = problem.tolerance if tolerance is None else tolerance
    x = np.asarray(solution.x, dtype=float)
    y = np.asarray(solution.dual_certificate, dtype=float)
    if x.shape != (problem.n_cols,) or y.shape != (problem.n_rows,):
        return False
    primal = np.max(np.abs(problem.matvec(x) - problem.b))
    dual = np.max(np.abs(problem.rmatvec(y)))
    gap = abs(float(problem.b @ y) - float(np.sum(np.abs(x))))
    return bool(primal <= tol and dual <= 1 + tol and gap <= tol)


class _DualSimplex:
    """Solver state for one solve: basis, explicit inverse, primal and dual values."""

    def __init__(self, problem: L1Problem, max_iter: int | None):
        self.p = problem
        self.rows, self.vals, self.m = problem._ell
        self.n = self.rows.shape[0]
        self.max_iter = max_iter if max_iter is not None else 50 * (self.m + self.m)
        self.iterations = 0
        self.degenerate = 0
        self.since_refactor = 0
        self.cost = np.ones(self.n)

    # basis[i] is a variable id: 2j (+a_j), 2j+1 (-a_j) or LOGICAL (e_i, only at position i)
    def _column(self, var: int, pos: int) -> np.ndarray:
        col = np.zeros(self.m)
        if var == LOGICAL:
            col[pos] = 1.0
        else:
            j, neg = divmod(var, 2)
            np.add.at(col, self.rows[j], -self.vals[j] if neg else self.vals[j])
        return col

    def _basis_matrix(self) -> np.ndarray:
        return np.column_stack([self._column(v, i) for i, v in enumerate(self.basis)])

    def refactor(self) -> None:
        self.Binv = np.linalg.inv(self._basis_matrix())
        self.xB = self.Binv @ self.p.b
        real = self.basis != LOGICAL
        cost = np.zeros(self.m)
        cost[real] = self.cost[self.basis[real] // 2]
        self.y = cost @ self.Binv
        self.t = kernels.column_dots(self.rows, self.vals, self.y)
        self.since_refactor = 0

    def cold_start(self) -> None:
        self.basis = np.full(self.m, LOGICAL, dtype=np.int64)
        self.refactor()

    def warm_start(self, basis: np.ndarray) -> bool:
        basis = np.asarray(basis, dtype=np.int64)
        if basis.shape != (self.m,) or np.any(basis >= 2 * self.n) or np.any(basis < LOGICAL):
            return False
        real = basis[basis != LOGICAL] // 2
        if np.unique(real).size != real.size:
            return False
        self.basis = basis.copy()
        B = self._basis_matrix()
        if np.linalg.cond(B) > 1e10:
            return False
        self.refactor()
        return float(np.max(np.abs(self.t) - self.cost)) <= 1e-9

    def _infeasibility(self) -> np.ndarray:
        logical = self.basis == LOGICAL
        return np.where(logical, np.abs(self.xB), np.maximum(-self.xB, 0.0))

    def run(self) -> None:
        streak = 0
        while True:
            infeas = self._infeasibility()
            if streak >= _DEGENERATE_STREAK:
                # Bland-style: lowest basis position that is infeasible
                cand = np.flatnonzero(infeas > _PRIMAL_TOL)
                r = int(cand[0]) if cand.size else -1
            else:
                # dual steepest edge with exact weights ||e_r^T B^-1||^2
                score = infeas**2 / np.einsum("ij,ij->i", self.Binv, self.Binv)
                r = int(np.argmax(score))
                if infeas[r] <= _PRIMAL_TOL:
                    r = -1
            if r < 0:
                return
            if self.iterations >= self.max_iter:
                raise IterationLimitError(f"iteration limit {self.max_iter} reached", self.solution())
            delta = self.xB[r]  # distance from the bound 0; sign gives the direction
            rho = np.ascontiguousarray(self.Binv[r])
            alpha = kernels.column_dots(self.rows, self.vals, rho)
            q, d_q, alpha_q = self._ratio_test(alpha, delta, r, bland=streak >= _DEGENERATE_STREAK)
            if q < 0:
                raise InfeasibleError(f"b is outside the column span of A (row {r} cannot be repaired)")
            j, neg = divmod(q, 2)
            w = self.Binv[:, self.rows[j]] @ (-self.vals[j] if neg else self.vals[j])
            if abs(w[r] - alpha_q) > 1e-7 * max(1.0, abs(alpha_q)):
                # drift between the pivot row and column: refresh and retry
                self.refactor()
                continue
            tau = d_q / alpha_q
            theta = delta / w[r]
            self.iterations += 1
            if abs(tau) <= 1e-14:
                self.degenerate += 1
                streak += 1
            else:
                streak = 0
            self.y += tau * rho
            self.t += tau * alpha
            self.xB -= theta * w
            self.xB[r] = theta
            pivot_row = self.Binv[r] / w[r]
            self.Binv -= np.outer(w, pivot_row)
            self.Binv[r] = pivot_row
            self.basis[r] = q
            self.since_refactor += 1
            if self.since_refactor >= _REFACTOR_EVERY:
                self.refactor()

    def primal_feasible(self) -> bool:
        return float(np.max(self._infeasibility(), initial=0.0)) <= _PRIMAL_TOL

    def run_primal(self) -> None:
        """Primal simplex from a primal feasible basis until ``|A^T y| <= cost``.

        Cleans up the few reduced costs that rounding can push past the bound
        after a refactorization.
        """
        streak = 0
        while True:
            excess = np.abs(self.t) - self.cost
            if streak >= _DEGENERATE_STREAK:
                cand = np.flatnonzero(excess > _DUAL_TOL)
                j = int(cand[0]) if cand.size else -1
            else:
                j = int(np.argmax(excess))
                if excess[j] <= _DUAL_TOL:
                    j = -1
            if j < 0:
                return
            if self.iterations >= self.max_iter:
                raise IterationLimitError(f"iteration limit {self.max_iter} reached", self.solution())
            neg = self.t[j] < 0
            q = 2 * j + int(neg)
            w = self.Binv[:, self.rows[j]] @ (-self.vals[j] if neg else self.vals[j])
            logical = self.basis == LOGICAL
            # logicals are fixed at zero and block any move; structurals block at 0
            block = np.where(logical, np.abs(w) > _PIVOT_TOL, w > _PIVOT_TOL)
            pos = np.flatnonzero(block)
            if pos.size == 0:
                raise L1SolverError("unbounded direction in the primal cleanup")
            ratios = np.where(logical[pos], 0.0, np.maximum(self.xB[pos], 0.0) / np.abs(w[pos]))
            best = ratios.min()
            tied = pos[ratios <= best + 1e-12]
            if streak >= _DEGENERATE_STREAK:
                r = int(tied[np.argmin(self.basis[tied])])
            else:
                r = int(tied[np.argmax(np.abs(w[tied]))])
            theta = self.xB[r] / w[r] if not logical[r] else 0.0
            self.iterations += 1
            if theta <= 1e-14:
                self.degenerate += 1
                streak += 1
            else:
                streak = 0
            self.xB -= theta * w
            self.xB[r] = theta
            pivot_row = self.Binv[r] / w[r]
            self.Binv -= np.outer(w, pivot_row)
            self.Binv[r] = pivot_row
            self.basis[r] = q
            self.since_refactor += 1
            if self.since_refactor >= _REFACTOR_EVERY:
                self.refactor()
            else:
                real = self.basis != LOGICAL
                cost = np.zeros(self.m)
                cost[real] = self.cost[self.basis[real] // 2]
                self.y = cost @ self.Binv
                self.t = kernels.column_dots(self.rows, self.vals, self.y)

    def _ratio_test(self, alpha: np.ndarray, delta: float, r: int, bland: bool) -> tuple[int, float, float]:
        """Entering variable when basis position ``r`` leaves towards its bound.

        Returns ``(var, d_q, alpha_q)``: the variable id, its reduced cost and its
        signed pivot-row entry; ``var == -1`` when nothing can enter.
        """
        sgn = 1.0 if delta > 0 else -1.0
        # for each column exactly one of +a_j / -a_j moves the leaving variable the right way
        a = sgn * alpha
        mag = np.abs(alpha)
        eligible = mag > _PIVOT_TOL
        others = np.delete(self.basis, r)
        eligible[others[others != LOGICAL] // 2] = False
        idx = np.flatnonzero(eligible)
        if idx.size == 0:
            return -1, 0.0, 0.0
        plus = a[idx] > 0
        c = self.cost[idx]
        dq = np.maximum(np.where(plus, c - self.t[idx], c + self.t[idx]), 0.0)
        mq = mag[idx]
        ratios = dq / mq
        if bland:
            k = int(np.flatnonzero(ratios <= ratios.min() + 1e-12)[0])
        else:
            # Harris two-pass: bound with relaxed costs, then the largest pivot inside it
            bound = np.min((dq + _DUAL_TOL) / mq)
            inside = np.flatnonzero(ratios <= bound)
            k = int(inside[np.argmax(mq[inside])])
        j = int(idx[k])
        var = 2 * j + (0 if plus[k] else 1)
        alpha_q = alpha[j] if plus[k] else -alpha[j]
        return var, float(dq[k]), float(alpha_q)

    def solution(self) -> L1Solution:
        x = np.zeros(self.n)
        real = self.basis != LOGICAL
        j = self.basis[real] // 2
        sign = np.where(self.basis[real] % 2 == 0, 1.0, -1.0)
        np.add.at(x, j, sign * self.xB[real])
        l1 = float(np.sum(np.abs(x)))
        residual = float(np.max(np.abs(self.p.matvec(x) - self.p.b)))
        return L1Solution(
            x=x,
            l1_norm=l1,
            dual_certificate=self.y.copy(),
            residual=residual,
            basis=self.basis.copy(),
            iterations=self.iterations,
            degenerate_pivots=self.degenerate,
            gap=abs(float(self.p.b @ self.y) - l1),
            dual_infeasibility=max(0.0, float(np.max(np.abs(self.t))) - 1.0),
        )


def _solve_highs(problem: L1Problem) -> L1Solution:
    """Same LP through scipy's HiGHS dual simplex; used when the pivot budget runs out."""
    from scipy.optimize import linprog

    a = problem._csc
    m, n = a.shape
    res = linprog(
        np.ones(2 * n),
        A_eq=sp.hstack([a, -a]).tocsc(),
        b_eq=problem.b,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        raise InfeasibleError("b is outside the column span of A")
    if res.status != 0:
        raise L1SolverError(f"HiGHS failed: {res.message}")
    x = res.x[:n] - res.x[n:]
    y = np.asarray(res.eqlin.marginals, dtype=float)
    l1 = float(np.sum(np.abs(x)))
    return L1Solution(
        x=x,
        l1_norm=l1,
        dual_certificate=y,
        residual=float(np.max(np.abs(problem.matvec(x) - problem.b))),
        basis=None,
        iterations=int(res.nit),
        gap=abs(float(problem.b @ y) - l1),
        dual_infeasibility=max(0.0, float(np.max(np.abs(problem.rmatvec(y)))) - 1.0),
        method="highs",
    )


def _default_budget(m: int, fallback: bool) -> int:
    # without a fallback the cap is 50 (m + basis size); with one, give up early
    return 6 * m + 200 if fallback else 50 * (m + m)


def solve_l1(
    problem: L1Problem,
    warm_start: np.ndarray | L1Solution | None = None,
    max_iter: int | None = None,
    verbose: bool = False,
    fallback: bool = True,
) -> L1Solution:
    """Global minimizer of ``||x||_1`` subject to ``A x = b`` with a dual certificate.

    ``warm_start`` may be a previous solution or its ``basis`` array; a singular
    or dual-infeasible start falls back to the all-logical basis.  The pivot
    budget defaults to ``6 m + 200`` when ``fallback`` is set, after which the LP
    is handed to HiGHS; otherwise it is ``100 m`` and exhausting it raises
    :class:`IterationLimitError` carrying the incumbent.  Raises
    :class:`InfeasibleError` if ``b`` is outside the span of ``A``.  Every returned solution has passed the
    certificate check at ``problem.tolerance``.
    """
    solver = _DualSimplex(problem, max_iter if max_iter is not None else _default_budget(problem.n_rows, fallback))
    if isinstance(warm_start, L1Solution):
        warm_start = warm_start.basis
    try:
        if warm_start is None or not solver.warm_start(warm_start):
            solver.cold_start()
        solver.run()
        solver.refactor()
        for _ in range(5):
            solver.run_primal()
            solver.refactor()
            if solver.primal_feasible():
                break
            solver.run()  # drift exposed by the refactorization
        sol = solver.solution()
    except IterationLimitError:
        if not fallback:
            raise
        logger.info("solve_l1: pivot budget %d exhausted, switching to HiGHS", solver.max_iter)
        sol = _solve_highs(problem)
    if verbose:
        logger.info(
            "solve_l1[%s]: iterations=%d degenerate=%d gap=%.3e residual=%.3e",
            sol.method, sol.iterations, sol.degenerate_pivots, sol.gap, sol.residual,
        )
    if sol.residual > problem.tolerance or sol.gap > problem.tolerance or sol.dual_infeasibility > problem.tolerance:
        raise L1SolverError(
            f"solution failed certification (residual {sol.residual:.3e}, gap {sol.gap:.3e}, "
            f"dual infeasibility {sol.dual_infeasibility:.3e})"
        )
    return sol
