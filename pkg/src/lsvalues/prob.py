"""Probabilistic values: expected marginal contributions under coalition laws.

A player's value is the expectation of their marginal contribution
v(S) - v(S \\ i) over the coalitions S containing them, for a probability
distribution on those coalitions.  Size-symmetric distributions (the same
probability for equal-size coalitions) give the semivalues; the Shapley
and Banzhaf values are the two classical members.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .games import check_player_count, coalition_sizes

#: Normalization slack allowed after converting exact weights to float.
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class SizeProfile:
    """Per-size probabilities w_s shared by all coalitions of size s.

    Valid when w_s >= 0 and sum_s C(n-1, s-1) w_s = 1, so that every
    player's induced coalition distribution is proper.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        n = check_player_count(w.size)
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("size weights must be nonnegative and finite")
        total = sum(comb(n - 1, s - 1) * w[s - 1] for s in range(1, n + 1))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"size weights are not normalized: sum C(n-1, s-1) w_s = {total!r}"
            )
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.weights.size


@dataclass(frozen=True)
class CoalitionDistribution:
    """Probability p_S on the coalitions containing one fixed player.

    ``p`` is indexed like a game table; entries on coalitions not
    containing the player must be zero, and the rest must be nonnegative
    and sum to 1 within NORMALIZATION_TOL.
    """

    n: int
    player: int
    p: np.ndarray

    def __post_init__(self):
        n = check_player_count(self.n)
        if not 1 <= self.player <= n:
            raise ValueError(f"player {self.player} out of range 1..{n}")
        p = np.asarray(self.p, dtype=np.float64).ravel()
        if p.size != (1 << n) - 1:
            raise ValueError(f"distribution needs {(1 << n) - 1} entries, got {p.size}")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be nonnegative and finite")
        masks = np.arange(1, (1 << n), dtype=np.uint32)
        contains = (masks & (1 << (self.player - 1))) != 0
        if np.any(p[~contains] != 0.0):
            raise ValueError(
                f"probabilities must vanish on coalitions without player {self.player}"
            )
        total = float(p[contains].sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "player", int(self.player))
        object.__setattr__(self, "p", p)


def shapley_weights_exact(n):
    """Exact per-size Shapley probabilities (s-1)! (n-s)! / n! as Fractions."""
    n = check_player_count(n)
    return [
        Fraction(factorial(s - 1) * factorial(n - s), factorial(n))
        for s in range(1, n + 1)
    ]


def banzhaf_weights_exact(n):
    """Exact per-size Banzhaf probabilities 1 / 2**(n-1) as Fractions."""
    n = check_player_count(n)
    return [Fraction(1, 1 << (n - 1))] * n


def shapley_distribution(n):
    """Size profile under which the expected marginal is the Shapley value.

    Built in exact rational arithmetic and converted to float once, so the
    normalization holds exactly before conversion.
    """
    return SizeProfile([float(w) for w in shapley_weights_exact(n)])


def banzhaf_distribution(n):
    """Uniform profile over a player's coalitions: the Banzhaf value's law."""
    return SizeProfile([float(w) for w in banzhaf_weights_exact(n)])


def distribution_for(profile, player):
    """Per-coalition distribution a size profile induces for one player."""
    n = profile.n
    masks = np.arange(1, (1 << n), dtype=np.uint32)
    contains = (masks & (1 << (player - 1))) != 0
    p = np.zeros(masks.size)
    p[contains] = profile.weights[coalition_sizes(n)[contains] - 1]
    return CoalitionDistribution(n, player, p)


def _marginals(v, player):
    """Marginal contributions of a player over all coalitions containing them."""
    masks = np.arange(1, (1 << v.n), dtype=np.uint32)
    bit = np.uint32(1 << (player - 1))
    own = masks[(masks & bit) != 0]
    without = own ^ bit
    prev = np.zeros(own.size)
    nonempty = without != 0
    prev[nonempty] = v.table[without[nonempty] - 1]
    return own, v.table[own - 1] - prev


def expected_marginal(v, player, dist):
    """E[v(S) - v(S \\ i)] for S drawn from the player's distribution."""
    if dist.n != v.n:
        raise ValueError(f"distribution is for n={dist.n} players, game has n={v.n}")
    if dist.player != player:
        raise ValueError(f"distribution belongs to player {dist.player}, not {player}")
    own, marg = _marginals(v, player)
    return float(dist.p[own - 1] @ marg)


def probabilistic_value(v, distributions):
    """Value vector of expected marginals.

    ``distributions`` is either a SizeProfile (shared by all players) or a
    sequence of per-player CoalitionDistributions in player order.
    """
    if isinstance(distributions, SizeProfile):
        dists = [distribution_for(distributions, i) for i in range(1, v.n + 1)]
    else:
        dists = list(distributions)
        if len(dists) != v.n:
            raise ValueError(f"need {v.n} distributions, got {len(dists)}")
    return np.array(
        [expected_marginal(v, i, dists[i - 1]) for i in range(1, v.n + 1)]
    )


def deviation(v, player, dist, mu):
    """Root of the expected squared gap between marginals and the estimate mu.

    As a function of mu this is minimized exactly at the expected marginal,
    where it equals the standard deviation of the marginal contribution.
    """
    if dist.n != v.n:
        raise ValueError(f"distribution is for n={dist.n} players, game has n={v.n}")
    if dist.player != player:
        raise ValueError(f"distribution belongs to player {dist.player}, not {player}")
    own, marg = _marginals(v, player)
    return float(np.sqrt(dist.p[own - 1] @ (marg - mu) ** 2))
