"""Dense linear algebra kernel.

Positive-definite certification by Cholesky pivots, Gaussian elimination
with partial pivoting, constraint-consistency checks, and the solve of
equality-constrained quadratic programs through their KKT block system.

All tolerances are hybrids scaled by input magnitude and can be overridden
per call.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    InconsistentConstraintsError,
    NotPositiveDefiniteError,
    SingularSystemError,
)

#: Cholesky pivots must exceed this fraction of max|Q|.
CHOLESKY_PIVOT_SCALE = 1e-12
#: Elimination pivots smaller than this fraction of max|M| count as zero.
ELIMINATION_PIVOT_SCALE = 1e-12
#: Rank / consistency decisions use this fraction of the largest entry.
CONSISTENCY_SCALE = 1e-10
#: KKT residuals must stay below RESIDUAL_TOL * (1 + ||rhs||).
RESIDUAL_TOL = 1e-8


def _as_matrix(M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={M.ndim}")
    return M


def _as_vector(v, length, name):
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != length:
        raise ValueError(f"{name} must have length {length}, got {v.size}")
    return v


def cholesky_factor(Q, *, pivot_tol=None):
    """Lower-triangular L with L @ L.T == Q, certifying Q positive definite.

    Raises NotPositiveDefiniteError (carrying the failing 0-based pivot
    index) as soon as a pivot drops to ``pivot_tol`` or below; by default
    the tolerance is 1e-12 * max|Q|.  Raises ValueError for a non-square
    or visibly asymmetric input.
    """
    Q = _as_matrix(Q)
    k = Q.shape[0]
    if Q.shape != (k, k):
        raise ValueError(f"matrix must be square, got shape {Q.shape}")
    if k == 0:
        return np.zeros((0, 0))
    scale = float(np.max(np.abs(Q)))
    if float(np.max(np.abs(Q - Q.T))) > 1e-12 * max(1.0, scale):
        raise ValueError("matrix is not symmetric within tolerance")
    Q = (Q + Q.T) / 2.0
    if pivot_tol is None:
        pivot_tol = CHOLESKY_PIVOT_SCALE * scale
    L = np.zeros_like(Q)
    for j in range(k):
        d = Q[j, j] - L[j, :j] @ L[j, :j]
        if d <= pivot_tol:
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite (pivot {j} = {d:.3g})",
                pivot_index=j,
            )
        L[j, j] = np.sqrt(d)
        if j + 1 < k:
            L[j + 1 :, j] = (Q[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def is_positive_definite(Q, *, pivot_tol=None):
    """True when ``cholesky_factor`` succeeds on Q."""
    try:
        cholesky_factor(Q, pivot_tol=pivot_tol)
    except NotPositiveDefiniteError:
        return False
    return True


def solve_linear(M, rhs, *, pivot_tol=None):
    """Solve M x = rhs by Gaussian elimination with partial pivoting.

    Raises SingularSystemError when the best available pivot falls within
    the singularity tolerance (default 1e-12 * max|M|).
    """
    M = _as_matrix(M)
    k = M.shape[0]
    if M.shape != (k, k):
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    b = _as_vector(rhs, k, "rhs")
    if k == 0:
        return np.zeros(0)
    A = M.copy()
    x = b.copy()
    if pivot_tol is None:
        pivot_tol = ELIMINATION_PIVOT_SCALE * max(1.0, float(np.max(np.abs(A))))
    for col in range(k):
        pivot_row = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[pivot_row, col]) <= pivot_tol:
            raise SingularSystemError(
                f"linear system is singular at pivot column {col}"
            )
        if pivot_row != col:
            A[[col, pivot_row]] = A[[pivot_row, col]]
            x[[col, pivot_row]] = x[[pivot_row, col]]
        factors = A[col + 1 :, col] / A[col, col]
        A[col + 1 :, col:] -= np.outer(factors, A[col, col:])
        x[col + 1 :] -= factors * x[col]
    for col in range(k - 1, -1, -1):
        x[col] = (x[col] - A[col, col + 1 :] @ x[col + 1 :]) / A[col, col]
    return x


def _echelon_pivot_rows(M, tol):
    """Original indices of the rows supplying pivots during elimination."""
    A = M.copy()
    m, cols = A.shape
    order = list(range(m))
    pivot_rows = []
    row = 0
    for col in range(cols):
        if row >= m:
            break
        best = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[best, col]) <= tol:
            continue
        if best != row:
            A[[row, best]] = A[[best, row]]
            order[row], order[best] = order[best], order[row]
        factors = A[row + 1 :, col] / A[row, col]
        A[row + 1 :, col:] -= np.outer(factors, A[row, col:])
        pivot_rows.append(order[row])
        row += 1
    return pivot_rows


def consistency_check(A, b, *, tol=None):
    """True when Ax = b has a solution: rank(A) == rank([A | b]).

    The empty system (zero rows) is consistent.  Rank decisions use
    elimination with tolerance 1e-10 * max|entry| by default.
    """
    A = _as_matrix(A)
    m = A.shape[0]
    b = _as_vector(b, m, "b")
    if m == 0:
        return True
    augmented = np.column_stack([A, b])
    if tol is None:
        scale = float(np.max(np.abs(augmented)))
        tol = CONSISTENCY_SCALE * scale if scale > 0 else 0.0
    rank_a = len(_echelon_pivot_rows(A, tol))
    rank_aug = len(_echelon_pivot_rows(augmented, tol))
    return rank_a == rank_aug


def independent_rows(A, b, *, tol=None):
    """Subset of rows of (A, b) with A-rows linearly independent.

    Returns ``(A_kept, b_kept, kept_indices)`` with indices in increasing
    original order.
    """
    A = _as_matrix(A)
    b = _as_vector(b, A.shape[0], "b")
    if tol is None:
        scale = float(np.max(np.abs(A))) if A.size else 0.0
        tol = CONSISTENCY_SCALE * scale if scale > 0 else 0.0
    kept = sorted(_echelon_pivot_rows(A, tol))
    return A[kept], b[kept], kept


@dataclass(frozen=True)
class KKTSolution:
    """Primal optimum x and multipliers y of an equality-constrained QP.

    The residual fields hold || Q x + A^T y - c || and || A x - b ||; both
    are verified against RESIDUAL_TOL * (1 + ||rhs||) before the solution
    is returned.
    """

    x: np.ndarray
    y: np.ndarray
    stationarity_residual: float
    feasibility_residual: float


def _finish(Q, c, A, b, x, y, residual_tol):
    stat = float(np.linalg.norm(Q @ x + (A.T @ y if A.size else 0.0) - c))
    feas = float(np.linalg.norm(A @ x - b)) if A.shape[0] else 0.0
    bound = residual_tol * (1.0 + float(np.linalg.norm(np.concatenate([c, b]))))
    if max(stat, feas) > bound:
        raise SingularSystemError(
            f"KKT solution failed residual verification "
            f"(stationarity {stat:.3g}, feasibility {feas:.3g}, bound {bound:.3g})"
        )
    x = x.copy()
    y = y.copy()
    x.flags.writeable = False
    y.flags.writeable = False
    return KKTSolution(x, y, stat, feas)


def solve_qp(Q, c_lin, A=None, b=None, *, pivot_tol=None, residual_tol=RESIDUAL_TOL):
    """Minimize 0.5 x^T Q x - c_lin^T x subject to A x = b.

    Q must be positive definite (certified here by Cholesky) and the
    constraints consistent.  The solution comes from the (k+m) x (k+m)
    block system [[Q, A^T], [A, 0]] @ (x, y) = (c_lin, b).  When that
    block matrix is singular because constraint rows are linearly
    dependent, the dependent rows are dropped and the solve retried;
    multipliers for dropped rows are reported as 0.

    Raises NotPositiveDefiniteError, InconsistentConstraintsError or
    SingularSystemError accordingly.
    """
    Q = _as_matrix(Q)
    k = Q.shape[0]
    c = _as_vector(c_lin, k, "c_lin")
    if A is None:
        A = np.zeros((0, k))
    A = _as_matrix(A)
    if A.shape[1] != k and A.shape[0] > 0:
        raise ValueError(f"constraint matrix must have {k} columns, got {A.shape[1]}")
    if A.shape[0] == 0:
        A = A.reshape(0, k)
    m = A.shape[0]
    b = np.zeros(0) if b is None else _as_vector(b, m, "b")

    cholesky_factor(Q, pivot_tol=pivot_tol)

    if m == 0:
        x = solve_linear(Q, c, pivot_tol=pivot_tol)
        return _finish(Q, c, A, b, x, np.zeros(0), residual_tol)

    if not consistency_check(A, b):
        raise InconsistentConstraintsError(
            "constraints are inconsistent: Ax = b has no solution"
        )

    def assemble(A_, b_):
        m_ = A_.shape[0]
        K = np.zeros((k + m_, k + m_))
        K[:k, :k] = Q
        K[:k, k:] = A_.T
        K[k:, :k] = A_
        return K, np.concatenate([c, b_])

    try:
        K, rhs = assemble(A, b)
        sol = solve_linear(K, rhs, pivot_tol=pivot_tol)
        return _finish(Q, c, A, b, sol[:k], sol[k:], residual_tol)
    except SingularSystemError:
        A2, b2, kept = independent_rows(A, b)
        if len(kept) == m:
            raise SingularSystemError("KKT system singular") from None
        K, rhs = assemble(A2, b2)
        sol = solve_linear(K, rhs, pivot_tol=pivot_tol)
        y = np.zeros(m)
        y[kept] = sol[k:]
        return _finish(Q, c, A, b, sol[:k], y, residual_tol)


def solve_lsq(Q, target, A=None, b=None, *, pivot_tol=None, residual_tol=RESIDUAL_TOL):
    """Q-norm projection: minimize ||target - x||_Q^2 subject to A x = b.

    Equivalent to ``solve_qp(2 Q, 2 Q target, A, b)``.  With no
    constraints the minimizer is the target itself, which is returned
    exactly (the projection of a point onto the whole space); Q is still
    required to be positive definite.
    """
    Q = _as_matrix(Q)
    k = Q.shape[0]
    c = _as_vector(target, k, "target")
    if A is None or _as_matrix(A).shape[0] == 0:
        cholesky_factor(Q, pivot_tol=pivot_tol)
        x = c.copy()
        x.flags.writeable = False
        return KKTSolution(x, np.zeros(0), 0.0, 0.0)
    return solve_qp(
        2.0 * Q, 2.0 * (Q @ c), A, b, pivot_tol=pivot_tol, residual_tol=residual_tol
    )
