"""Cooperative TU games over bitmask-encoded coalitions.

Players are numbered 1..n.  A coalition is an int bitmask where bit ``i - 1``
represents player ``i``; the dense table index of a nonempty coalition is
``mask - 1``.  The empty coalition (mask 0) is never stored: every game is
extended with value 0 there.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: Hard cap on the player count; dense tables hold 2**n - 1 entries.
MAX_PLAYERS = 20


def check_player_count(n):
    """Validate a player count and return it as a plain int."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"player count must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= MAX_PLAYERS:
        raise ValueError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
    return n


def grand_coalition(n):
    """Bitmask of the coalition of all n players."""
    return (1 << check_player_count(n)) - 1


def coalition(players, n):
    """Bitmask of the nonempty coalition with the given 1-based members.

    Raises ValueError on an empty member list, an index outside 1..n, or a
    duplicate index.
    """
    n = check_player_count(n)
    members = list(players)
    if not members:
        raise ValueError("coalition must not be empty")
    mask = 0
    for i in members:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
            raise ValueError(f"player index must be an integer, got {i!r}")
        if not 1 <= i <= n:
            raise ValueError(f"player {i} out of range 1..{n}")
        bit = 1 << (int(i) - 1)
        if mask & bit:
            raise ValueError(f"duplicate player {i}")
        mask |= bit
    return mask


def coalition_members(mask):
    """Sorted 1-based player indices of a coalition bitmask."""
    mask = int(mask)
    if mask < 0:
        raise ValueError(f"invalid coalition mask {mask}")
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def coalition_size(mask):
    """Number of players in a coalition bitmask."""
    return int(mask).bit_count()


def coalition_label(mask):
    """Canonical text form of a coalition: comma-separated increasing indices."""
    return ",".join(str(i) for i in coalition_members(mask))


def all_coalitions(n):
    """Iterate over every nonempty coalition mask (1 .. 2**n - 1)."""
    return range(1, 1 << check_player_count(n))


@lru_cache(maxsize=None)
def _masks(n):
    m = np.arange(1, 1 << n, dtype=np.uint32)
    m.flags.writeable = False
    return m


@lru_cache(maxsize=None)
def coalition_sizes(n):
    """Read-only array of |S| for every nonempty coalition, in mask order."""
    sizes = np.bitwise_count(_masks(check_player_count(n))).astype(np.int64)
    sizes.flags.writeable = False
    return sizes


@dataclass(frozen=True)
class Game:
    """A TU game: one real value per nonempty coalition, v(empty) = 0.

    ``table[mask - 1]`` is the value of the coalition with bitmask ``mask``.
    Instances are immutable; the table is a read-only float64 array.
    """

    n: int
    table: np.ndarray

    def __post_init__(self):
        n = check_player_count(self.n)
        table = np.array(self.table, dtype=np.float64)
        if table.shape != ((1 << n) - 1,):
            raise ValueError(
                f"game on {n} players needs {(1 << n) - 1} coalition values, "
                f"got shape {table.shape}"
            )
        if not np.all(np.isfinite(table)):
            raise ValueError("game values must be finite")
        table.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", table)

    def value(self, mask):
        """Value of the coalition with the given bitmask; 0.0 for the empty set."""
        mask = int(mask)
        if mask == 0:
            return 0.0
        if not 1 <= mask <= grand_coalition(self.n):
            raise ValueError(f"coalition mask {mask} out of range for n={self.n}")
        return float(self.table[mask - 1])

    __getitem__ = value

    @property
    def grand_value(self):
        """v(N), the value of the grand coalition."""
        return float(self.table[-1])


def additive_game(payoffs):
    """Game induced by a payoff vector: v(S) = sum of payoffs of S's members."""
    x = np.asarray(payoffs, dtype=np.float64).ravel()
    n = check_player_count(len(x))
    masks = _masks(n)
    table = np.zeros(masks.size)
    for i in range(n):
        table[(masks & (1 << i)) != 0] += x[i]
    return Game(n, table)


def unanimity_game(T, n):
    """Game worth 1 on supersets of coalition T and 0 elsewhere."""
    n = check_player_count(n)
    T = int(T)
    if not 1 <= T <= grand_coalition(n):
        raise ValueError(f"coalition mask {T} out of range for n={n}")
    masks = _masks(n)
    return Game(n, ((masks & T) == T).astype(np.float64))


def dual_game(v):
    """Dual game v*(S) = v(N) - v(N \\ S)."""
    n = v.n
    masks = _masks(n)
    comp = np.bitwise_xor(masks, np.uint32(grand_coalition(n)))
    comp_vals = np.zeros(masks.size)
    nonempty = comp != 0
    comp_vals[nonempty] = v.table[comp[nonempty] - 1]
    return Game(n, v.grand_value - comp_vals)


def marginal_contribution(v, i, S):
    """v(S) - v(S minus player i); defined only when i is a member of S."""
    S = int(S)
    bit = 1 << (i - 1)
    if not 1 <= i <= v.n:
        raise ValueError(f"player {i} out of range 1..{v.n}")
    if not S & bit:
        raise ValueError(f"player {i} is not a member of coalition {{{coalition_label(S)}}}")
    return v.value(S) - v.value(S ^ bit)


def mobius_transform(v):
    """Inclusion-exclusion coefficients m with v(S) = sum of m(T) over T subset of S.

    Returns a plain array in the same coalition-mask order as game tables.
    Computed with the in-place subset transform, O(n * 2**n).
    """
    n = v.n
    a = np.concatenate(([0.0], v.table))
    idx_all = np.arange(a.size)
    for i in range(n):
        bit = 1 << i
        idx = idx_all[(idx_all & bit) != 0]
        a[idx] -= a[idx ^ bit]
    return a[1:]


def mobius_inverse(coefficients, n):
    """Rebuild the game whose inclusion-exclusion coefficients are given."""
    n = check_player_count(n)
    coefficients = np.asarray(coefficients, dtype=np.float64).ravel()
    if coefficients.shape != ((1 << n) - 1,):
        raise ValueError(
            f"need {(1 << n) - 1} coefficients for n={n}, got {coefficients.size}"
        )
    a = np.concatenate(([0.0], coefficients))
    idx_all = np.arange(a.size)
    for i in range(n):
        bit = 1 << i
        idx = idx_all[(idx_all & bit) != 0]
        a[idx] += a[idx ^ bit]
    return Game(n, a[1:])


def kadditive_basis(n, k):
    """Unanimity games u_T for all coalitions T with 1 <= |T| <= k.

    Ordered by (|T|, mask), so k=1 yields the per-player games in player
    order.  The returned games are linearly independent and span the space
    of games whose inclusion-exclusion coefficients vanish above size k.
    """
    n = check_player_count(n)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ValueError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    sizes = coalition_sizes(n)
    chosen = [int(m) for m in _masks(n)[sizes <= k]]
    chosen.sort(key=lambda m: (coalition_size(m), m))
    return [unanimity_game(T, n) for T in chosen]
