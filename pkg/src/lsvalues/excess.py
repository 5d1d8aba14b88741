"""Values minimizing weighted per-capita excess gaps between complements.

For a payoff vector x and a proper nonempty coalition S, the gap

    d(x, S) = (v(S) - x(S)) / |S|  -  (v(N \\ S) - x(N \\ S)) / (n - |S|)

compares the per-capita dissatisfaction of S with that of its complement.
The extremal problem

    min  sum over proper nonempty S of  m_S d(x, S)^2    s.t.  x(N) = v(N)

with weights m_S > 0 transforms, via the dual game, into a plain weighted
least-squares approximation by additive games and is solved through the
general engine.  On the constraint set the transformed objective equals
the original one exactly.
"""

import numpy as np

from .approx import DiagonalWeights, efficiency_constraint, singleton_basis, solve_approximation
from .games import Game, coalition_size, coalition_sizes, dual_game, grand_coalition


def check_gap_weights(m, n):
    """Validate gap weights: positive on proper coalitions, 0 on the grand one.

    ``m`` is indexed like a game table (mask order, length 2**n - 1); the
    grand-coalition entry takes no part in the objective and must be 0.
    """
    m = np.asarray(m, dtype=np.float64).ravel()
    if m.size != (1 << n) - 1:
        raise ValueError(f"gap weights need {(1 << n) - 1} entries, got {m.size}")
    if n < 2:
        raise ValueError("gap weights need at least 2 players (no proper coalitions otherwise)")
    if m[-1] != 0.0:
        raise ValueError("the grand coalition carries no gap; set its weight to 0")
    if np.any(m[:-1] <= 0.0) or not np.all(np.isfinite(m)):
        raise ValueError("gap weights must be strictly positive on proper coalitions")
    return m


def uniform_gap_weights(n, value=1.0):
    """Equal weight on every proper nonempty coalition."""
    m = np.full((1 << n) - 1, float(value))
    m[-1] = 0.0
    return m


def excess_gap(v, payoffs, S):
    """d(x, S) for a proper nonempty coalition S.

    Antisymmetric under complement: d(x, S) = -d(x, N \\ S).
    """
    n = v.n
    S = int(S)
    grand = grand_coalition(n)
    if S <= 0 or S >= grand:
        raise ValueError("the gap is defined only for proper nonempty coalitions")
    x = np.asarray(payoffs, dtype=np.float64).ravel()
    if x.size != n:
        raise ValueError(f"payoff vector must have length {n}, got {x.size}")
    bits = np.arange(n)
    members = ((S >> bits) & 1).astype(bool)
    s = coalition_size(S)
    x_s = float(x[members].sum())
    x_comp = float(x[~members].sum())
    comp = grand ^ S
    return (v.value(S) - x_s) / s - (v.value(comp) - x_comp) / (n - s)


def gap_problem(v, m):
    """Rewrite the gap objective as diagonal weights on a blended game.

    Returns ``(vbar, alpha, g)`` where, for proper nonempty S with s = |S|,

        vbar(S)  = ((n - s) v(S) + s v*(S)) / n        (v* the dual game)
        alpha_S  = n^2 m_S / (s^2 (n - s)^2)

    and g = v(N) is the right-hand side of the efficiency constraint.  On
    payoff vectors with x(N) = v(N) one has, term by term,

        m_S d(x, S)^2 = alpha_S (vbar(S) - x(S))^2.

    The grand coalition never enters the objective (alpha_N = 0); vbar(N)
    is set to v(N) so the standard efficiency constraint on vbar carries
    the original right-hand side.
    """
    n = v.n
    m = check_gap_weights(m, n)
    vstar = dual_game(v)
    sizes = coalition_sizes(n).astype(np.float64)
    vbar = ((n - sizes) * v.table + sizes * vstar.table) / n
    vbar[-1] = v.grand_value
    alpha = np.zeros_like(m)
    proper = slice(0, m.size - 1)
    denom = (sizes[proper] ** 2) * ((n - sizes[proper]) ** 2)
    alpha[proper] = (n * n) * m[proper] / denom
    return Game(n, vbar), DiagonalWeights(alpha), v.grand_value


def gap_value(v, m):
    """Payoff vector minimizing the weighted squared gaps, with x(N) = v(N).

    Linear in v for fixed weights.  Raises NotPositiveDefiniteError if the
    induced form is not positive definite (for strictly positive weights it
    always is).
    """
    vbar, alpha, _ = gap_problem(v, m)
    basis = singleton_basis(v.n)
    result = solve_approximation(
        vbar, alpha, basis, constraints=efficiency_constraint(basis)
    )
    return result.value
