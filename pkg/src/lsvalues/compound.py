"""Closed forms for quadratic programs with a compound-symmetric matrix.

Uniform-by-size coalition weights always project (on the per-player basis)
to a matrix with a single diagonal entry q and a single off-diagonal entry
p.  For such matrices the efficiency-constrained program

    min  x^T Q x - c^T x    s.t.  sum(x) = g

has an explicit solution, which this module provides together with the
positive-definiteness tests for the (q, p) pattern and the classical
weight profile that reproduces the Shapley value.
"""

import warnings
from dataclasses import dataclass
from math import comb

import numpy as np

from .approx import SizeWeights
from .errors import SingularSystemError, StationaryPointWarning
from .games import check_player_count, coalition_sizes

#: q - p and q + (k-1) p must exceed this to certify definiteness.
DEFINITENESS_TOL = 0.0


@dataclass(frozen=True)
class CompoundForm:
    """k x k matrix with q on the diagonal and p everywhere else."""

    q: float
    p: float
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"dimension must be positive, got {self.k}")
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "k", int(self.k))

    def materialize(self):
        Q = np.full((self.k, self.k), self.p)
        np.fill_diagonal(Q, self.q)
        return Q


@dataclass(frozen=True)
class CompoundProblem:
    """min x^T Q x - c^T x subject to sum(x) = g, with Q a CompoundForm."""

    form: CompoundForm
    c: np.ndarray
    g: float

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64).ravel()
        if c.size != self.form.k:
            raise ValueError(
                f"linear term must have length {self.form.k}, got {c.size}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "g", float(self.g))


def uniform_pq(alpha_by_size):
    """(q, p) of the projected form for uniform-by-size weights alpha(s).

    On the per-player basis, q_ii = sum_S over S containing i of alpha(|S|)
    and q_ij = the same sum over S containing both i and j, hence

        q = sum_{s=1}^{n} C(n-1, s-1) alpha(s)
        p = sum_{s=2}^{n} C(n-2, s-2) alpha(s)
    """
    if isinstance(alpha_by_size, SizeWeights):
        alpha = alpha_by_size.by_size
    else:
        alpha = np.asarray(alpha_by_size, dtype=np.float64).ravel()
    n = check_player_count(alpha.size)
    q = sum(comb(n - 1, s - 1) * alpha[s - 1] for s in range(1, n + 1))
    p = sum(comb(n - 2, s - 2) * alpha[s - 1] for s in range(2, n + 1)) if n >= 2 else 0.0
    return CompoundForm(q, p, n)


def pd_all_sizes(form):
    """True when the (q, p) pattern is positive definite at every size: q > p >= 0."""
    return form.q > form.p >= 0.0


def pd_spectral(form):
    """Exact eigenvalue test at the form's own size.

    The eigenvalues of the materialized matrix are q - p (multiplicity
    k - 1) and q + (k-1) p, so the form is positive definite iff both are
    positive.  Unlike ``pd_all_sizes`` this admits slightly negative p.
    At k = 1 the off-diagonal eigenvalue has multiplicity zero and only
    q > 0 matters.
    """
    return (
        form.k == 1 or form.q - form.p > DEFINITENESS_TOL
    ) and form.q + (form.k - 1) * form.p > DEFINITENESS_TOL


def solve_compound(problem):
    """Closed-form stationary point of the sum-constrained program.

    Returns (x, z) with

        z = (2 (q + (k-1) p) g - C) / k,   C = sum(c)
        x_i = (c_i + z - 2 p g) / (2 q - 2 p)

    The pair satisfies 2 Q x - c = z * 1 and sum(x) = g identically; when
    the form is positive definite x is the unique optimum.  Raises
    SingularSystemError when q == p (the form is singular on the
    constraint subspace).
    """
    form, c, g = problem.form, problem.c, problem.g
    if form.q == form.p:
        raise SingularSystemError(
            "compound form with q == p is singular on the constraint subspace"
        )
    k = form.k
    z = (2.0 * (form.q + (k - 1) * form.p) * g - float(c.sum())) / k
    x = (c + z - 2.0 * form.p * g) / (2.0 * form.q - 2.0 * form.p)
    return x, z


def charnes_weights(n):
    """Size weights whose efficient least-squares value is the Shapley value.

    alpha(s) = 1 / C(n-2, s-1), proportional to (s-1)! (n-1-s)!.  Matching
    the closed-form solution against the Shapley coalition coefficients
    forces exactly this profile (any positive multiple gives the same
    minimizer).  alpha(n) = 0: the grand-coalition residual is unweighted,
    its value being pinned by the efficiency constraint.  Requires n >= 2.
    """
    n = check_player_count(n)
    if n < 2:
        raise ValueError("these weights need at least 2 players")
    alpha = [1.0 / comb(n - 2, s - 1) for s in range(1, n)] + [0.0]
    return SizeWeights(alpha)


def closed_form_value(v, alpha_by_size, *, warn_uncertified=True):
    """Efficient least-squares value for uniform-by-size weights, in closed form.

    Minimizes sum_S alpha(|S|) (v(S) - x(S))^2 over payoff vectors x under
    sum(x) = v(N), via the compound-form solution with

        c_i = 2 sum over S containing i of alpha(|S|) v(S),   g = v(N).

    When the projected form is not certified positive definite the
    stationary point is still returned, with a StationaryPointWarning.
    """
    if isinstance(alpha_by_size, SizeWeights):
        weights = alpha_by_size
    else:
        weights = SizeWeights(alpha_by_size)
    if weights.n != v.n:
        raise ValueError(f"weights are for n={weights.n} players, game has n={v.n}")
    form = uniform_pq(weights)
    if warn_uncertified and not pd_spectral(form):
        warnings.warn(
            "weights induce an indefinite form; returning a stationary point "
            "that is not certified optimal",
            StationaryPointWarning,
            stacklevel=2,
        )
    alpha_per_coalition = weights.by_size[coalition_sizes(v.n) - 1]
    weighted = alpha_per_coalition * v.table
    masks = np.arange(1, (1 << v.n), dtype=np.uint32)
    c = np.empty(v.n)
    for i in range(v.n):
        c[i] = 2.0 * float(weighted[(masks & (1 << i)) != 0].sum())
    x, _ = solve_compound(CompoundProblem(form, c, v.grand_value))
    return x
