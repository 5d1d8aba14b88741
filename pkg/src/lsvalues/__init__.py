"""Least-squares and probabilistic values of cooperative TU games.

Games live on bitmask-encoded coalitions; values are per-player payoff
vectors obtained either as expected marginal contributions or as best
weighted least-squares approximations by simpler games under linear
constraints.  Closed forms, the generic KKT solver and direct enumeration
cross-check one another throughout.
"""

from .approx import (
    ApproximationResult,
    DiagonalWeights,
    LinearConstraints,
    MatrixWeights,
    SizeWeights,
    SubspaceBasis,
    WeightScheme,
    banzhaf_least_squares,
    build_gram,
    build_linear_term,
    efficiency_constraint,
    kadditive_subspace,
    singleton_basis,
    solve_approximation,
    sum_preservation_constraint,
)
from .compound import (
    CompoundForm,
    CompoundProblem,
    charnes_weights,
    closed_form_value,
    pd_all_sizes,
    pd_spectral,
    solve_compound,
    uniform_pq,
)
from .errors import (
    ComputationError,
    GameFormatError,
    InconsistentConstraintsError,
    NotPositiveDefiniteError,
    SingularSystemError,
    StationaryPointWarning,
)
from .estimators import (
    ExcessGapValue,
    LeastSquaresValue,
    MobiusTransformer,
    ProbabilisticValue,
    check_game_array,
)
from .excess import check_gap_weights, excess_gap, gap_problem, gap_value, uniform_gap_weights
from .gamefile import parse_game, serialize_game, serialize_table
from .games import (
    MAX_PLAYERS,
    Game,
    additive_game,
    all_coalitions,
    coalition,
    coalition_label,
    coalition_members,
    coalition_size,
    coalition_sizes,
    dual_game,
    grand_coalition,
    kadditive_basis,
    marginal_contribution,
    mobius_inverse,
    mobius_transform,
    unanimity_game,
)
from .linalg import (
    KKTSolution,
    cholesky_factor,
    consistency_check,
    is_positive_definite,
    solve_linear,
    solve_lsq,
    solve_qp,
)
from .prob import (
    CoalitionDistribution,
    SizeProfile,
    banzhaf_distribution,
    banzhaf_weights_exact,
    deviation,
    distribution_for,
    expected_marginal,
    probabilistic_value,
    shapley_distribution,
    shapley_weights_exact,
)
from .verify import banzhaf_enumeration, direct_gap_solve, run_checks, shapley_enumeration

__version__ = "0.1.0"
