"""Weighted least-squares approximation of games over a chosen subspace.

Given a game v, per-coalition weights and a basis (b_1, ..., b_k) of the
approximating subspace, the engine minimizes

    sum_S sum_T w_ST (v - u)(S) (v - u)(T) + sum_S c_S (v - u)(S)

over u in the span of the basis, optionally under linear constraints on
the basis coordinates.  In coordinates (u = sum x_i b_i) this is the
quadratic program

    min  x^T Q x - cbar^T x    s.t.  A x = b(v)

with q_ij = sum_S sum_T w_ST b_i(S) b_j(T) and cbar_i = sum_S ctilde_S b_i(S),
ctilde_S = c_S + 2 sum_T w_ST v_T.  Whenever Q is positive definite the
optimum is unique and the induced per-player value u*({j}) is linear in v.

Weights need not be positive: only the projected Q matters.  Weight
matrices are symmetrized on construction, which leaves the objective
unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError
from .games import (
    Game,
    check_player_count,
    coalition_sizes,
    grand_coalition,
    kadditive_basis,
)
from .linalg import cholesky_factor, solve_qp

#: Full (2**n - 1)^2 weight matrices are only accepted up to this many players.
MAX_MATRIX_PLAYERS = 10


class WeightScheme:
    """Base class for per-coalition weighting of squared residuals."""

    @property
    def n(self):
        raise NotImplementedError

    def diagonal(self):
        """Per-coalition weights as a vector, or None for a full matrix."""
        return None

    def full(self):
        """Materialized (2**n - 1)^2 symmetric weight matrix."""
        d = self.diagonal()
        return np.diag(d)


@dataclass(frozen=True)
class SizeWeights(WeightScheme):
    """Diagonal weights that depend only on coalition size: alpha(|S|)."""

    by_size: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.by_size, dtype=np.float64).ravel()
        check_player_count(w.size)
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "by_size", w)

    @classmethod
    def uniform(cls, n, value=1.0):
        return cls(np.full(check_player_count(n), float(value)))

    @property
    def n(self):
        return self.by_size.size

    def diagonal(self):
        return self.by_size[coalition_sizes(self.n) - 1]


@dataclass(frozen=True)
class DiagonalWeights(WeightScheme):
    """One weight per nonempty coalition, in mask order."""

    by_coalition: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.by_coalition, dtype=np.float64).ravel()
        n = (w.size + 1).bit_length() - 1
        if (1 << n) - 1 != w.size:
            raise ValueError(
                f"diagonal weights need 2**n - 1 entries, got {w.size}"
            )
        check_player_count(n)
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "by_coalition", w)

    @property
    def n(self):
        return (self.by_coalition.size + 1).bit_length() - 1

    def diagonal(self):
        return self.by_coalition


@dataclass(frozen=True)
class MatrixWeights(WeightScheme):
    """Full coalition-pair weight matrix w_ST, symmetrized on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.matrix, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {W.shape}")
        size = W.shape[0]
        n = (size + 1).bit_length() - 1
        if (1 << n) - 1 != size:
            raise ValueError(f"weight matrix side must be 2**n - 1, got {size}")
        check_player_count(n)
        if n > MAX_MATRIX_PLAYERS:
            raise ValueError(
                f"full weight matrices are limited to n <= {MAX_MATRIX_PLAYERS} "
                f"players, got n={n}"
            )
        if not np.all(np.isfinite(W)):
            raise ValueError("weights must be finite")
        W = (W + W.T) / 2.0
        W.flags.writeable = False
        object.__setattr__(self, "matrix", W)

    @property
    def n(self):
        return (self.matrix.shape[0] + 1).bit_length() - 1

    def diagonal(self):
        return None

    def full(self):
        return self.matrix


@dataclass(frozen=True)
class SubspaceBasis:
    """Linearly independent games spanning the approximation subspace.

    ``matrix`` stacks the game tables as rows: matrix[i, mask - 1] = b_i(S).
    """

    n: int
    games: tuple
    matrix: np.ndarray

    @classmethod
    def from_games(cls, games):
        games = tuple(games)
        if not games:
            raise ValueError("basis must contain at least one game")
        n = games[0].n
        if any(g.n != n for g in games):
            raise ValueError("all basis games must share the same player set")
        B = np.vstack([g.table for g in games])
        if np.linalg.matrix_rank(B @ B.T) < len(games):
            raise ValueError("basis games are linearly dependent")
        B.flags.writeable = False
        return cls(n, games, B)

    @property
    def k(self):
        return len(self.games)


def singleton_basis(n):
    """Basis of the additive games: the per-player unanimity games."""
    return SubspaceBasis.from_games(kadditive_basis(n, 1))


def kadditive_subspace(n, k):
    """Basis of the games whose interaction coefficients vanish above size k."""
    return SubspaceBasis.from_games(kadditive_basis(n, k))


@dataclass(frozen=True)
class LinearConstraints:
    """Constraints A x = b(v): A in basis coordinates, b linear in the game.

    ``rhs_rows`` represents b as a matrix applied to the game table, so
    consistency for a concrete game is checked at solve time.
    """

    A: np.ndarray
    rhs_rows: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        R = np.atleast_2d(np.asarray(self.rhs_rows, dtype=np.float64))
        if A.shape[0] != R.shape[0]:
            raise ValueError("A and rhs_rows must have the same number of rows")
        A = A.copy()
        R = R.copy()
        A.flags.writeable = False
        R.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs_rows", R)

    @property
    def m(self):
        return self.A.shape[0]

    def rhs(self, v):
        return self.rhs_rows @ v.table


def efficiency_constraint(basis):
    """Single row enforcing u*(N) = v(N).

    On the per-player basis this is the usual sum(x_i) = v(N).
    """
    K = (1 << basis.n) - 1
    row = np.zeros(K)
    row[K - 1] = 1.0
    return LinearConstraints(basis.matrix[:, K - 1][None, :], row[None, :])


def sum_preservation_constraint(basis):
    """Single row keeping the total over all coalitions: sum_S u*(S) = sum_S v(S)."""
    K = (1 << basis.n) - 1
    return LinearConstraints(basis.matrix.sum(axis=1)[None, :], np.ones((1, K)))


def combine_constraints(constraints, k):
    """Stack constraint blocks into one (A, rhs_rows) pair; None means none."""
    if constraints is None:
        items = []
    elif isinstance(constraints, LinearConstraints):
        items = [constraints]
    else:
        items = list(constraints)
    if not items:
        return np.zeros((0, k)), np.zeros((0, 0))
    A = np.vstack([c.A for c in items])
    R = np.vstack([c.rhs_rows for c in items])
    if A.shape[1] != k:
        raise ValueError(f"constraints expect {A.shape[1]} coordinates, basis has {k}")
    return A, R


def build_gram(weights, basis):
    """Projected quadratic form: q_ij = sum_S sum_T w_ST b_i(S) b_j(T).

    For diagonal weights this reduces to q_ij = sum_S alpha_S b_i(S) b_j(S);
    on the per-player basis that is q_ij = sum over S containing both i and
    j of alpha_S.  The result is symmetrized.
    """
    if weights.n != basis.n:
        raise ValueError(
            f"weights are for n={weights.n} players, basis for n={basis.n}"
        )
    B = basis.matrix
    d = weights.diagonal()
    if d is not None:
        Q = (B * d) @ B.T
    else:
        Q = B @ weights.full() @ B.T
    return (Q + Q.T) / 2.0


def build_linear_term(weights, v, basis, offset=None):
    """Projected linear term cbar_i = sum_S ctilde_S b_i(S).

    ctilde_S = c_S + 2 sum_T w_ST v_T, where c = offset @ v.table (zero when
    no offset is given).  For diagonal weights with no offset this is
    cbar_i = 2 sum_S alpha_S v(S) b_i(S).
    """
    if weights.n != basis.n or v.n != basis.n:
        raise ValueError("game, weights and basis must share the player set")
    d = weights.diagonal()
    if d is not None:
        ctilde = 2.0 * d * v.table
    else:
        ctilde = 2.0 * (weights.full() @ v.table)
    if offset is not None:
        C = np.asarray(offset, dtype=np.float64)
        if C.shape != (v.table.size, v.table.size):
            raise ValueError(
                f"offset matrix must be {v.table.size} x {v.table.size}, "
                f"got shape {C.shape}"
            )
        ctilde = ctilde + C @ v.table
    return basis.matrix @ ctilde


@dataclass(frozen=True)
class ApproximationResult:
    """Optimal coordinates, the approximating game, and the induced value.

    ``value[j - 1] = approximation({j})``.  Note that with a basis of degree
    above 1 the per-player values need not sum to approximation(N).
    """

    coefficients: np.ndarray
    approximation: Game
    value: np.ndarray
    multipliers: np.ndarray


def solve_approximation(v, weights, basis=None, constraints=None, offset=None,
                        *, pivot_tol=None):
    """Best weighted approximation of v in the basis span under constraints.

    Solves the coordinate program via the QP kernel (passing 2 Q for the
    kernel's 0.5 x^T Q x convention) and reads the value off the optimal
    game at singletons.  Raises NotPositiveDefiniteError when the projected
    Q is not positive definite, and InconsistentConstraintsError when the
    constraints cannot be met for this game.
    """
    if basis is None:
        basis = singleton_basis(v.n)
    Q = build_gram(weights, basis)
    try:
        cholesky_factor(Q, pivot_tol=pivot_tol)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(
            "weights do not induce a positive definite form; no unique "
            f"least-squares value (pivot {exc.pivot_index})",
            pivot_index=exc.pivot_index,
        ) from None
    cbar = build_linear_term(weights, v, basis, offset)
    A, R = combine_constraints(constraints, basis.k)
    b = R @ v.table if A.shape[0] else np.zeros(0)
    sol = solve_qp(2.0 * Q, cbar, A, b, pivot_tol=pivot_tol)
    u_table = basis.matrix.T @ sol.x
    u = Game(v.n, u_table)
    singleton_idx = np.array([(1 << j) - 1 for j in range(v.n)])
    value = u_table[singleton_idx].copy()
    return ApproximationResult(sol.x, u, value, sol.y)


def banzhaf_least_squares(v):
    """Banzhaf value via an unconstrained equal-weight least-squares fit.

    Fits a_0 + sum_i a_i [i in S] to v over all 2**n subsets (the empty set
    included, with v(empty) = 0), all residuals weighted equally.  The slope
    coefficients of the optimal fit are exactly the Banzhaf values; the
    intercept a_0 absorbs the rest.  Restricting the fit to additive games
    (no intercept, nonempty coalitions only) shifts every component by the
    same constant and is therefore a different value.

    The normal equations G a = r are solved through the QP kernel.
    """
    n = v.n
    masks = np.arange(1, (1 << n), dtype=np.uint32)
    half = float(1 << max(n - 1, 0))
    quarter = float(1 << max(n - 2, 0)) if n >= 2 else 0.5
    G = np.full((n + 1, n + 1), quarter)
    G[0, 0] = float(1 << n)
    G[0, 1:] = half
    G[1:, 0] = half
    np.fill_diagonal(G[1:, 1:], half)
    r = np.empty(n + 1)
    r[0] = float(v.table.sum())
    for i in range(n):
        r[i + 1] = float(v.table[(masks & (1 << i)) != 0].sum())
    sol = solve_qp(2.0 * G, 2.0 * r)
    return sol.x[1:].copy()
