import numpy as np
import pytest

from lsvalues import (
    DiagonalWeights,
    Game,
    MatrixWeights,
    NotPositiveDefiniteError,
    SizeWeights,
    SubspaceBasis,
    additive_game,
    banzhaf_least_squares,
    build_gram,
    build_linear_term,
    coalition,
    coalition_size,
    coalition_sizes,
    efficiency_constraint,
    kadditive_subspace,
    singleton_basis,
    solve_approximation,
    sum_preservation_constraint,
    unanimity_game,
)
from _util import banzhaf_subsets, max_dev, random_game, shapley_permutations


def gram_brute_force(W, basis):
    """Literal double sum over coalition pairs."""
    k = basis.k
    K = basis.matrix.shape[1]
    Q = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            for S in range(1, K + 1):
                for T in range(1, K + 1):
                    Q[i, j] += W[S - 1, T - 1] * basis.games[i].value(S) * basis.games[j].value(T)
    return Q


class TestWeightSchemes:
    def test_size_weights_expand_by_coalition_size(self):
        w = SizeWeights([10.0, 20.0, 30.0])
        expanded = w.diagonal()
        assert np.allclose(expanded, 10.0 * (coalition_sizes(3) == 1)
                           + 20.0 * (coalition_sizes(3) == 2)
                           + 30.0 * (coalition_sizes(3) == 3))

    def test_matrix_weights_symmetrized(self):
        W = np.zeros((3, 3))
        W[0, 1] = 2.0
        mw = MatrixWeights(W)
        assert mw.matrix[0, 1] == mw.matrix[1, 0] == 1.0

    def test_matrix_weights_gated(self):
        with pytest.raises(ValueError, match="limited"):
            MatrixWeights(np.eye((1 << 11) - 1))

    def test_diagonal_length_checked(self):
        with pytest.raises(ValueError, match="2\\*\\*n - 1"):
            DiagonalWeights(np.ones(6))


class TestBasis:
    def test_dependent_games_rejected(self):
        g1 = unanimity_game(1, 2)
        g2 = Game(2, 2.0 * g1.table)
        with pytest.raises(ValueError, match="dependent"):
            SubspaceBasis.from_games([g1, g2])

    def test_mixed_player_sets_rejected(self):
        with pytest.raises(ValueError, match="player set"):
            SubspaceBasis.from_games([unanimity_game(1, 2), unanimity_game(1, 3)])

    def test_singleton_basis_shape(self):
        basis = singleton_basis(4)
        assert basis.k == 4
        assert basis.matrix.shape == (4, 15)


class TestBuildGram:
    def test_diagonal_formula_sum_over_supersets(self):
        rng = np.random.default_rng(0)
        n = 4
        alpha = rng.uniform(-1, 2, size=(1 << n) - 1)
        Q = build_gram(DiagonalWeights(alpha), singleton_basis(n))
        for i in range(n):
            for j in range(n):
                both = (1 << i) | (1 << j)
                expected = sum(alpha[S - 1] for S in range(1, 1 << n) if S & both == both)
                assert Q[i, j] == pytest.approx(expected, abs=1e-10)

    def test_uniform_ones_three_players(self):
        Q = build_gram(SizeWeights.uniform(3), singleton_basis(3))
        assert np.allclose(np.diag(Q), 4.0)
        assert np.allclose(Q[~np.eye(3, dtype=bool)], 2.0)

    def test_full_matrix_against_brute_force(self):
        rng = np.random.default_rng(1)
        for n, k in ((2, 2), (3, 3), (4, 1)):
            W = rng.uniform(-1, 1, size=((1 << n) - 1, (1 << n) - 1))
            weights = MatrixWeights(W)
            basis = kadditive_subspace(n, k)
            Q = build_gram(weights, basis)
            assert max_dev(Q, gram_brute_force(weights.matrix, basis)) <= 1e-10


class TestBuildLinearTerm:
    def test_zero_game_zero_offset(self):
        n = 3
        zero = Game(n, np.zeros(7))
        cbar = build_linear_term(SizeWeights.uniform(n), zero, singleton_basis(n))
        assert max_dev(cbar, 0.0) == 0.0

    def test_diagonal_ones_specialization(self):
        rng = np.random.default_rng(2)
        n = 3
        v = random_game(n, rng)
        cbar = build_linear_term(DiagonalWeights(np.ones(7)), v, singleton_basis(n))
        for i in range(n):
            expected = 2.0 * sum(v.value(S) for S in range(1, 8) if S & (1 << i))
            assert cbar[i] == pytest.approx(expected, abs=1e-12)

    def test_full_matrix_with_offset_brute_force(self):
        rng = np.random.default_rng(3)
        n = 3
        K = 7
        v = random_game(n, rng)
        W = MatrixWeights(rng.uniform(-1, 1, size=(K, K)))
        C = rng.uniform(-1, 1, size=(K, K))
        basis = singleton_basis(n)
        cbar = build_linear_term(W, v, basis, offset=C)
        c_vec = C @ v.table
        for i in range(n):
            expected = 0.0
            for S in range(1, K + 1):
                ctilde = c_vec[S - 1] + 2 * sum(
                    W.matrix[S - 1, T - 1] * v.value(T) for T in range(1, K + 1)
                )
                expected += ctilde * basis.games[i].value(S)
            assert cbar[i] == pytest.approx(expected, abs=1e-10)


class TestConstraints:
    def test_efficiency_on_singletons(self):
        c = efficiency_constraint(singleton_basis(3))
        assert np.allclose(c.A, [[1.0, 1.0, 1.0]])
        v = unanimity_game(coalition([1, 2], 3), 3)
        assert c.rhs(v) == pytest.approx(v.grand_value)

    def test_efficiency_on_kadditive(self):
        c = efficiency_constraint(kadditive_subspace(3, 2))
        assert np.allclose(c.A, np.ones((1, 6)))  # every unanimity game is 1 at N

    def test_sum_preservation_rows(self):
        c = sum_preservation_constraint(singleton_basis(2))
        assert np.allclose(c.A, [[2.0, 2.0]])
        assert c.rhs(unanimity_game(coalition([1, 2], 2), 2)) == pytest.approx(1.0)
        assert c.rhs(additive_game([1.0, 1.0])) == pytest.approx(4.0)


class TestSolveApproximation:
    def test_additive_game_is_fixed_point(self):
        x = np.array([0.3, -1.2, 0.4])
        v = additive_game(x)
        basis = singleton_basis(3)
        res = solve_approximation(v, DiagonalWeights(np.ones(7)), basis,
                                  efficiency_constraint(basis))
        assert max_dev(res.value, x) <= 1e-10
        assert max_dev(res.approximation.table, v.table) <= 1e-10

    def test_charnes_weights_give_shapley_on_unanimity(self):
        from lsvalues import charnes_weights

        v = unanimity_game(coalition([1, 2], 3), 3)
        basis = singleton_basis(3)
        res = solve_approximation(v, charnes_weights(3), basis, efficiency_constraint(basis))
        assert max_dev(res.value, [0.5, 0.5, 0.0]) <= 1e-12
        assert max_dev(res.value, shapley_permutations(v)) <= 1e-12

    def test_projection_idempotent_on_feasible_span_members(self):
        rng = np.random.default_rng(4)
        n = 3
        basis = kadditive_subspace(n, 2)
        coeffs = rng.uniform(-1, 1, size=basis.k)
        v = Game(n, basis.matrix.T @ coeffs)
        res = solve_approximation(v, SizeWeights.uniform(n), basis,
                                  efficiency_constraint(basis))
        assert max_dev(res.approximation.table, v.table) <= 1e-9

    def test_projection_idempotent_with_indefinite_weights(self):
        # weights (0, a, -a) keep the projected form positive definite
        rng = np.random.default_rng(5)
        x = rng.uniform(-1, 1, size=3)
        v = additive_game(x)
        basis = singleton_basis(3)
        res = solve_approximation(v, SizeWeights([0.0, 1.0, -1.0]), basis,
                                  efficiency_constraint(basis))
        assert max_dev(res.value, x) <= 1e-9

    def test_efficiency_invariant(self):
        rng = np.random.default_rng(6)
        for n in (2, 3, 4, 5):
            basis = singleton_basis(n)
            eff = efficiency_constraint(basis)
            for _ in range(10):
                v = random_game(n, rng)
                res = solve_approximation(v, SizeWeights.uniform(n), basis, eff)
                assert abs(res.approximation.grand_value - v.grand_value) <= 1e-10

    def test_kadditive_efficiency_holds_on_grand_not_on_sum(self):
        rng = np.random.default_rng(7)
        v = random_game(3, rng)
        basis = kadditive_subspace(3, 2)
        res = solve_approximation(v, SizeWeights.uniform(3), basis,
                                  efficiency_constraint(basis))
        assert abs(res.approximation.grand_value - v.grand_value) <= 1e-10
        # the per-player readout need not be efficient above degree 1
        assert abs(res.value.sum() - v.grand_value) > 1e-6

    def test_linearity_of_value(self):
        rng = np.random.default_rng(8)
        n = 4
        basis = singleton_basis(n)
        weights = DiagonalWeights(rng.uniform(0.2, 2.0, size=(1 << n) - 1))
        cons = [efficiency_constraint(basis)]

        def value(g):
            return solve_approximation(g, weights, basis, cons).value

        for _ in range(20):
            v, w = random_game(n, rng), random_game(n, rng)
            a, b = rng.uniform(-2, 2, size=2)
            mixed = Game(n, a * v.table + b * w.table)
            assert max_dev(value(mixed), a * value(v) + b * value(w)) <= 1e-8

    def test_non_pd_weights_named_error(self):
        v = random_game(3, np.random.default_rng(9))
        with pytest.raises(NotPositiveDefiniteError, match="positive definite form"):
            solve_approximation(v, SizeWeights([0.0, 0.0, 0.0]), singleton_basis(3))

    def test_default_basis_is_singleton(self):
        v = additive_game([1.0, 2.0])
        res = solve_approximation(v, SizeWeights.uniform(2))
        assert max_dev(res.value, [1.0, 2.0]) <= 1e-10

    def test_multiple_constraints_stack(self):
        rng = np.random.default_rng(10)
        n = 4
        v = random_game(n, rng)
        basis = kadditive_subspace(n, 2)
        res = solve_approximation(
            v, SizeWeights.uniform(n), basis,
            [efficiency_constraint(basis), sum_preservation_constraint(basis)],
        )
        assert abs(res.approximation.grand_value - v.grand_value) <= 1e-10
        assert abs(res.approximation.table.sum() - v.table.sum()) <= 1e-9

    def test_inconsistent_constraints_detected(self):
        # On the additive subspace, sum preservation is a multiple of
        # efficiency, so demanding both of a generic game is contradictory.
        from lsvalues import InconsistentConstraintsError

        rng = np.random.default_rng(10)
        n = 4
        v = random_game(n, rng)
        basis = singleton_basis(n)
        with pytest.raises(InconsistentConstraintsError):
            solve_approximation(
                v, SizeWeights.uniform(n), basis,
                [efficiency_constraint(basis), sum_preservation_constraint(basis)],
            )

    def test_bit_identical_reruns(self):
        v = random_game(5, np.random.default_rng(11))
        basis = singleton_basis(5)
        eff = efficiency_constraint(basis)
        first = solve_approximation(v, SizeWeights.uniform(5), basis, eff)
        second = solve_approximation(v, SizeWeights.uniform(5), basis, eff)
        assert np.array_equal(first.value, second.value)
        assert np.array_equal(first.coefficients, second.coefficients)


class TestLinearValueRoundTrip:
    """Any linear value can be produced by an (unconstrained) approximation."""

    def test_engine_embedding_reproduces_linear_map(self):
        rng = np.random.default_rng(11)
        n = 3
        K = (1 << n) - 1
        L = rng.uniform(-1, 1, size=(n, K))
        # weights select singleton residuals only; the offset retargets them
        alpha = np.zeros(K)
        offset = np.zeros((K, K))
        for j in range(n):
            idx = (1 << j) - 1
            alpha[idx] = 1.0
            offset[idx] = 2.0 * L[j]
            offset[idx, idx] -= 2.0
        basis = singleton_basis(n)
        weights = DiagonalWeights(alpha)
        for _ in range(10):
            v = random_game(n, rng)
            res = solve_approximation(v, weights, basis, offset=offset)
            assert max_dev(res.value, L @ v.table) <= 1e-10


class TestBanzhafLeastSquares:
    def test_matches_enumeration(self):
        rng = np.random.default_rng(12)
        for n in (1, 2, 3, 4, 5):
            for _ in range(5):
                v = random_game(n, rng)
                assert max_dev(banzhaf_least_squares(v), banzhaf_subsets(v)) <= 1e-10

    def test_matches_design_matrix_fit(self):
        # independent oracle: explicit design over all 2**n subsets, lstsq
        rng = np.random.default_rng(13)
        n = 4
        v = random_game(n, rng)
        rows = []
        targets = []
        for S in range(1 << n):
            rows.append([1.0] + [float((S >> i) & 1) for i in range(n)])
            targets.append(v.value(S))
        fit, *_ = np.linalg.lstsq(np.array(rows), np.array(targets), rcond=None)
        assert max_dev(banzhaf_least_squares(v), fit[1:]) <= 1e-10

    def test_additive_game_recovers_generator(self):
        x = np.array([0.7, -0.1, 0.4])
        assert max_dev(banzhaf_least_squares(additive_game(x)), x) <= 1e-10

    def test_additive_fit_without_intercept_is_banzhaf_plus_uniform_shift(self):
        # The equal-weight fit restricted to additive games (no intercept,
        # nonempty coalitions only) differs from the Banzhaf value by the
        # same constant in every component:
        #   shift = 2**(1-n) * sum v(S)  -  2**(2-n)/(n+1) * sum |S| v(S)
        rng = np.random.default_rng(14)
        for n in (2, 3, 4, 5):
            v = random_game(n, rng)
            fit = solve_approximation(v, SizeWeights.uniform(n), singleton_basis(n)).value
            bz = banzhaf_subsets(v)
            total = v.table.sum()
            weighted = float((coalition_sizes(n) * v.table).sum())
            shift = 2.0 ** (1 - n) * total - 2.0 ** (2 - n) * weighted / (n + 1)
            assert max_dev(fit, bz + shift) <= 1e-10
            if n == 2:
                assert abs(shift) > 1e-3  # the two values genuinely differ
