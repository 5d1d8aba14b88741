"""Scikit-learn style estimators over batches of game tables.

A row of X is one game: the 2**n - 1 coalition values in mask order (the
layout of ``Game.table``).  Transformers map each row to the corresponding
per-player payoff vector, so they compose with pipelines and the rest of
the scikit-learn ecosystem.  Fitting only validates the width, resolves
the configuration and precomputes what is shared across rows; the solved
operators are linear, so there is nothing to learn from the data itself.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .approx import (
    SizeWeights,
    WeightScheme,
    efficiency_constraint,
    kadditive_subspace,
    solve_approximation,
    sum_preservation_constraint,
)
from .compound import charnes_weights
from .excess import check_gap_weights, gap_value, uniform_gap_weights
from .games import MAX_PLAYERS, Game, mobius_inverse, mobius_transform
from .prob import banzhaf_distribution, probabilistic_value, shapley_distribution, SizeProfile


def check_game_array(X):
    """Validate a batch of game tables; returns (float array, player count).

    X must be 2-d with 2**n - 1 columns for some 1 <= n <= MAX_PLAYERS and
    finite entries.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array of game tables, got ndim={X.ndim}")
    width = X.shape[1]
    n = (width + 1).bit_length() - 1
    if (1 << n) - 1 != width or not 1 <= n <= MAX_PLAYERS:
        raise ValueError(
            f"each row must hold 2**n - 1 coalition values for n <= {MAX_PLAYERS}; "
            f"got {width} columns"
        )
    if not np.all(np.isfinite(X)):
        raise ValueError("game tables must be finite")
    return X, n


def _check_fitted(estimator, X):
    if not hasattr(estimator, "n_players_"):
        raise NotFittedError(
            f"this {type(estimator).__name__} instance is not fitted yet; "
            "call fit before transform"
        )
    X, n = check_game_array(X)
    if n != estimator.n_players_:
        raise ValueError(
            f"estimator was fitted for {estimator.n_players_} players, "
            f"these tables have {n}"
        )
    return X


class LeastSquaresValue(BaseEstimator, TransformerMixin):
    """Linear value from constrained weighted least-squares approximation.

    Parameters
    ----------
    weights : "charnes", "uniform", array of per-size weights, or a WeightScheme
        "charnes" reproduces the Shapley value; "uniform" puts weight 1 on
        every coalition.
    k_additive : int
        Degree of the approximating subspace; 1 fits additive games.
    constraints : "efficiency", "sum", "none", or a tuple of these
        Linear constraints attached to the solve.

    Attributes
    ----------
    n_players_ : int
        Player count inferred from the table width at fit time.
    """

    def __init__(self, weights="charnes", k_additive=1, constraints="efficiency"):
        self.weights = weights
        self.k_additive = k_additive
        self.constraints = constraints

    def _resolve_weights(self, n):
        if isinstance(self.weights, str):
            if self.weights == "charnes":
                return charnes_weights(n)
            if self.weights == "uniform":
                return SizeWeights.uniform(n)
            raise ValueError(f"unknown weights {self.weights!r}")
        if isinstance(self.weights, WeightScheme):
            return self.weights
        return SizeWeights(self.weights)

    def _resolve_constraints(self, basis):
        spec = self.constraints
        if spec is None or spec == "none":
            names = ()
        elif isinstance(spec, str):
            names = (spec,)
        else:
            names = tuple(spec)
        out = []
        for name in names:
            if name == "efficiency":
                out.append(efficiency_constraint(basis))
            elif name == "sum":
                out.append(sum_preservation_constraint(basis))
            else:
                raise ValueError(f"unknown constraint {name!r}")
        return out

    def fit(self, X, y=None):
        X, n = check_game_array(X)
        basis = kadditive_subspace(n, self.k_additive)
        weights = self._resolve_weights(n)
        if weights.n != n:
            raise ValueError(
                f"weights are for n={weights.n} players, tables have n={n}"
            )
        constraints = self._resolve_constraints(basis)
        # Run one solve now so bad configurations (non-PD weights,
        # inconsistent constraints) fail at fit time.
        solve_approximation(Game(n, X[0]), weights, basis, constraints)
        self.n_players_ = n
        self.basis_ = basis
        self.weights_ = weights
        self.constraints_ = constraints
        return self

    def transform(self, X):
        X = _check_fitted(self, X)
        out = np.empty((X.shape[0], self.n_players_))
        for r in range(X.shape[0]):
            result = solve_approximation(
                Game(self.n_players_, X[r]), self.weights_, self.basis_, self.constraints_
            )
            out[r] = result.value
        return out


class ProbabilisticValue(BaseEstimator, TransformerMixin):
    """Expected-marginal value under a size-symmetric coalition distribution.

    Parameters
    ----------
    profile : "shapley", "banzhaf", array of per-size probabilities, or SizeProfile
    """

    def __init__(self, profile="shapley"):
        self.profile = profile

    def fit(self, X, y=None):
        X, n = check_game_array(X)
        if isinstance(self.profile, str):
            if self.profile == "shapley":
                profile = shapley_distribution(n)
            elif self.profile == "banzhaf":
                profile = banzhaf_distribution(n)
            else:
                raise ValueError(f"unknown profile {self.profile!r}")
        elif isinstance(self.profile, SizeProfile):
            profile = self.profile
        else:
            profile = SizeProfile(self.profile)
        if profile.n != n:
            raise ValueError(f"profile is for n={profile.n} players, tables have n={n}")
        self.n_players_ = n
        self.profile_ = profile
        return self

    def transform(self, X):
        X = _check_fitted(self, X)
        out = np.empty((X.shape[0], self.n_players_))
        for r in range(X.shape[0]):
            out[r] = probabilistic_value(Game(self.n_players_, X[r]), self.profile_)
        return out


class ExcessGapValue(BaseEstimator, TransformerMixin):
    """Efficient value minimizing weighted per-capita excess gaps.

    Parameters
    ----------
    weights : None or array over coalitions (mask order)
        Gap weights; None means equal weight on every proper coalition.
    """

    def __init__(self, weights=None):
        self.weights = weights

    def fit(self, X, y=None):
        X, n = check_game_array(X)
        if self.weights is None:
            m = uniform_gap_weights(n)
        else:
            m = check_gap_weights(self.weights, n)
        self.n_players_ = n
        self.weights_ = m
        return self

    def transform(self, X):
        X = _check_fitted(self, X)
        out = np.empty((X.shape[0], self.n_players_))
        for r in range(X.shape[0]):
            out[r] = gap_value(Game(self.n_players_, X[r]), self.weights_)
        return out


class MobiusTransformer(BaseEstimator, TransformerMixin):
    """Interaction (inclusion-exclusion) coefficients of each game row.

    ``inverse_transform`` rebuilds the tables, so round-tripping is the
    identity up to float arithmetic.
    """

    def fit(self, X, y=None):
        _, self.n_players_ = check_game_array(X)
        return self

    def transform(self, X):
        X = _check_fitted(self, X)
        return np.vstack(
            [mobius_transform(Game(self.n_players_, row)) for row in X]
        )

    def inverse_transform(self, X):
        X = _check_fitted(self, X)
        return np.vstack(
            [mobius_inverse(row, self.n_players_).table for row in X]
        )
