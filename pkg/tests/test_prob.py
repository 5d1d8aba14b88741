from fractions import Fraction
from math import comb

import numpy as np
import pytest

from lsvalues import (
    CoalitionDistribution,
    SizeProfile,
    additive_game,
    banzhaf_distribution,
    banzhaf_least_squares,
    banzhaf_weights_exact,
    coalition,
    charnes_weights,
    closed_form_value,
    deviation,
    distribution_for,
    expected_marginal,
    probabilistic_value,
    shapley_distribution,
    shapley_weights_exact,
    unanimity_game,
)
from _util import banzhaf_subsets, max_dev, random_game, shapley_permutations, shapley_weighted_sum


def u12_on3():
    return unanimity_game(coalition([1, 2], 3), 3)


class TestProfiles:
    def test_shapley_three_players(self):
        assert np.allclose(shapley_distribution(3).weights, [1 / 3, 1 / 6, 1 / 3])

    def test_shapley_small(self):
        assert np.allclose(shapley_distribution(1).weights, [1.0])
        assert np.allclose(shapley_distribution(2).weights, [0.5, 0.5])

    def test_banzhaf_flat(self):
        assert np.allclose(banzhaf_distribution(3).weights, 0.25)
        assert np.allclose(banzhaf_distribution(1).weights, [1.0])
        assert np.allclose(banzhaf_distribution(4).weights, 0.125)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_exact_normalization(self, n):
        for exact in (shapley_weights_exact(n), banzhaf_weights_exact(n)):
            total = sum(comb(n - 1, s - 1) * exact[s - 1] for s in range(1, n + 1))
            assert total == Fraction(1)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_float_normalization(self, n):
        for profile in (shapley_distribution(n), banzhaf_distribution(n)):
            total = sum(
                comb(n - 1, s - 1) * profile.weights[s - 1] for s in range(1, n + 1)
            )
            assert abs(total - 1.0) <= 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError, match="not normalized"):
            SizeProfile([0.5, 0.5, 0.5])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            SizeProfile([1.5, -0.25, 0.0])


class TestCoalitionDistribution:
    def test_induced_distribution_is_valid(self):
        dist = distribution_for(shapley_distribution(4), 2)
        assert dist.player == 2
        assert abs(dist.p.sum() - 1.0) <= 1e-12

    def test_support_enforced(self):
        p = np.zeros(7)
        p[0] = 1.0  # coalition {1} does not contain player 2
        with pytest.raises(ValueError, match="vanish"):
            CoalitionDistribution(3, 2, p)

    def test_sum_enforced(self):
        p = np.zeros(7)
        p[0] = 0.5  # only half the mass, on {1}
        with pytest.raises(ValueError, match="sum to 1"):
            CoalitionDistribution(3, 1, p)


class TestExpectedMarginal:
    def test_additive_game_any_distribution(self):
        x = np.array([0.3, -0.7, 1.1])
        v = additive_game(x)
        for profile in (shapley_distribution(3), banzhaf_distribution(3)):
            for i in (1, 2, 3):
                dist = distribution_for(profile, i)
                assert expected_marginal(v, i, dist) == pytest.approx(x[i - 1], abs=1e-12)

    def test_null_player(self):
        dist = distribution_for(shapley_distribution(3), 3)
        assert expected_marginal(u12_on3(), 3, dist) == 0.0

    def test_unanimity_banzhaf(self):
        dist = distribution_for(banzhaf_distribution(3), 1)
        assert expected_marginal(u12_on3(), 1, dist) == pytest.approx(0.5)

    def test_player_mismatch_rejected(self):
        dist = distribution_for(shapley_distribution(3), 1)
        with pytest.raises(ValueError, match="belongs to player"):
            expected_marginal(u12_on3(), 2, dist)


class TestProbabilisticValue:
    def test_unanimity_shapley_and_banzhaf(self):
        v = u12_on3()
        assert max_dev(probabilistic_value(v, shapley_distribution(3)), [0.5, 0.5, 0.0]) <= 1e-12
        assert max_dev(probabilistic_value(v, banzhaf_distribution(3)), [0.5, 0.5, 0.0]) <= 1e-12

    def test_additive_recovers_generator(self):
        x = np.array([2.0, -1.0, 0.25, 0.5])
        v = additive_game(x)
        assert max_dev(probabilistic_value(v, shapley_distribution(4)), x) <= 1e-12
        assert max_dev(probabilistic_value(v, banzhaf_distribution(4)), x) <= 1e-12

    def test_matches_permutation_definition(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 4, 5):
            v = random_game(n, rng)
            assert max_dev(probabilistic_value(v, shapley_distribution(n)),
                           shapley_permutations(v)) <= 1e-10

    def test_weighted_sum_oracle_agrees_with_permutations(self):
        # validates the fast oracle used by the acceptance suite
        rng = np.random.default_rng(1)
        for n in (2, 3, 4, 5):
            v = random_game(n, rng)
            assert max_dev(shapley_weighted_sum(v), shapley_permutations(v)) <= 1e-10

    def test_matches_banzhaf_enumeration(self):
        rng = np.random.default_rng(2)
        for n in (1, 2, 3, 4, 5):
            v = random_game(n, rng)
            assert max_dev(probabilistic_value(v, banzhaf_distribution(n)),
                           banzhaf_subsets(v)) <= 1e-10

    def test_shapley_coincides_with_charnes_least_squares(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 5, 7, 8):
            v = random_game(n, rng)
            assert max_dev(probabilistic_value(v, shapley_distribution(n)),
                           closed_form_value(v, charnes_weights(n))) <= 1e-8

    def test_banzhaf_coincides_with_least_squares_fit(self):
        rng = np.random.default_rng(4)
        for n in (2, 3, 5, 7):
            v = random_game(n, rng)
            assert max_dev(probabilistic_value(v, banzhaf_distribution(n)),
                           banzhaf_least_squares(v)) <= 1e-8

    def test_linearity_and_null_player(self):
        rng = np.random.default_rng(5)
        n = 4
        profile = shapley_distribution(n)
        from lsvalues import Game

        for _ in range(10):
            v, w = random_game(n, rng), random_game(n, rng)
            a, b = rng.uniform(-2, 2, size=2)
            mixed = Game(n, a * v.table + b * w.table)
            assert max_dev(probabilistic_value(mixed, profile),
                           a * probabilistic_value(v, profile)
                           + b * probabilistic_value(w, profile)) <= 1e-10
        # a player outside the support coalition of a unanimity game gets 0
        u = unanimity_game(coalition([1, 3], 4), 4)
        assert probabilistic_value(u, profile)[1] == 0.0

    def test_per_player_distribution_list(self):
        v = u12_on3()
        dists = [distribution_for(shapley_distribution(3), i) for i in (1, 2, 3)]
        assert max_dev(probabilistic_value(v, dists), [0.5, 0.5, 0.0]) <= 1e-12


class TestDeviation:
    def test_zero_for_additive_at_generator(self):
        x = np.array([0.5, 1.5, -2.0])
        v = additive_game(x)
        dist = distribution_for(banzhaf_distribution(3), 2)
        assert deviation(v, 2, dist, x[1]) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        # marginals of player 1 in u_{1,2} are (0, 1, 0, 1), each with p = 1/4
        dist = distribution_for(banzhaf_distribution(3), 1)
        assert deviation(u12_on3(), 1, dist, 0.5) == pytest.approx(0.5)

    def test_expected_marginal_minimizes(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            v = random_game(n, rng)
            i = int(rng.integers(1, n + 1))
            # random valid distribution for player i
            raw = rng.uniform(0.0, 1.0, size=(1 << n) - 1)
            masks = np.arange(1, 1 << n)
            raw[(masks & (1 << (i - 1))) == 0] = 0.0
            dist = CoalitionDistribution(n, i, raw / raw.sum())
            mu = expected_marginal(v, i, dist)
            base = deviation(v, i, dist, mu)
            for eps in (1e-3, 1e-1):
                assert base <= deviation(v, i, dist, mu + eps) + 1e-15
                assert base <= deviation(v, i, dist, mu - eps) + 1e-15
            # central difference of the squared deviation vanishes at mu
            h = 1e-3
            diff = (deviation(v, i, dist, mu + h) ** 2
                    - deviation(v, i, dist, mu - h) ** 2) / (2 * h)
            assert abs(diff) <= 1e-8
