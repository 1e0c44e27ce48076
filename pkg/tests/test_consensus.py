import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beliefdyn import (build_credibility_matrix, consensus_via_weights,
                       run_communication, stationary_weights)
from beliefdyn.consensus import NumericalFailure

from conftest import (EXAMPLE_MATRIX, make_population, random_population,
                      solve_stationary_3x3)

CHOSEN = np.array([0.0, 0.5, 0.8])


class TestStationaryWeights:
    def test_worked_example_against_elimination_oracle(self, example_matrix):
        oracle = solve_stationary_3x3(EXAMPLE_MATRIX)
        w = stationary_weights(example_matrix)
        np.testing.assert_allclose(w.values, oracle, atol=1e-10)
        # frozen from the oracle: (17, 57, 32) / 106
        np.testing.assert_allclose(w.values, [17 / 106, 57 / 106, 32 / 106],
                                   atol=1e-10)

    def test_left_eigenvector_residual(self, example_matrix):
        w = stationary_weights(example_matrix)
        np.testing.assert_allclose(w.values @ example_matrix.dense, w.values,
                                   atol=1e-10)
        assert abs(w.values.sum() - 1.0) < 1e-12

    def test_single_agent(self):
        pop = make_population([(0.5, 0.5)])
        mat = build_credibility_matrix(pop.groups, "explicit",
                                       explicit=np.array([[1.0]]))
        assert stationary_weights(mat).values[0] == pytest.approx(1.0)

    def test_doubly_stochastic_uniform(self):
        pop = make_population([(0.5, 0.5)] * 4)
        dense = np.array([
            [0.4, 0.3, 0.2, 0.1],
            [0.3, 0.4, 0.1, 0.2],
            [0.2, 0.1, 0.4, 0.3],
            [0.1, 0.2, 0.3, 0.4],
        ])
        mat = build_credibility_matrix(pop.groups, "explicit", explicit=dense)
        np.testing.assert_allclose(stationary_weights(mat).values, 0.25,
                                   atol=1e-10)

    def test_uniform_blocks_shortcut(self):
        pop = make_population([(0.5, 0.5)] * 5, group_sizes=[3, 2])
        mat = build_credibility_matrix(pop.groups, "equal-weights")
        w = stationary_weights(mat)
        np.testing.assert_allclose(w.values, [1 / 3, 1 / 3, 1 / 3, 0.5, 0.5])


class TestRunCommunication:
    def test_one_round_exact_arithmetic(self, example_matrix):
        # the update is a plain row-vector product; third entry is 0.31
        np.testing.assert_allclose(CHOSEN @ example_matrix.dense,
                                   [0.29, 0.70, 0.31], atol=1e-12)

    def test_convergence_to_consensus(self, example_matrix):
        consensus, rounds, final = run_communication(CHOSEN, example_matrix,
                                                     tol=1e-9)
        assert consensus[0] == pytest.approx(0.51037735849, abs=1e-8)
        assert rounds <= 50
        assert np.ptp(final) <= 1e-9

    def test_constant_vector_fixed(self, example_matrix):
        consensus, rounds, final = run_communication(
            np.array([0.3, 0.3, 0.3]), example_matrix)
        assert rounds == 0
        np.testing.assert_array_equal(final, [0.3, 0.3, 0.3])
        assert consensus[0] == 0.3

    def test_max_rounds_exceeded(self, example_matrix):
        with pytest.raises(NumericalFailure, match="residual"):
            run_communication(CHOSEN, example_matrix, tol=1e-9, max_rounds=2)

    def test_uniform_matrix_single_round(self):
        pop = make_population([(0.5, 0.5)] * 4)
        mat = build_credibility_matrix(pop.groups, "equal-weights")
        consensus, rounds, final = run_communication(
            np.array([0.0, 0.4, 0.8, 0.2]), mat)
        assert consensus[0] == pytest.approx(0.35)
        assert rounds == 1


class TestConsensusViaWeights:
    def test_worked_example_dot_product(self, example_matrix):
        w = stationary_weights(example_matrix)
        c = consensus_via_weights(CHOSEN, w)
        assert c[0] == pytest.approx(54.1 / 106, abs=1e-10)

    def test_zero_beliefs(self, example_matrix):
        w = stationary_weights(example_matrix)
        assert consensus_via_weights(np.zeros(3), w)[0] == 0.0

    def test_degenerate_single_agent_group(self):
        pop = make_population([(0.5, 0.7)])
        mat = build_credibility_matrix(pop.groups, "explicit",
                                       explicit=np.array([[1.0]]))
        w = stationary_weights(mat)
        assert consensus_via_weights(np.array([0.7]), w)[0] == pytest.approx(0.7)


class Testproperties:
    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_two_paths_agree(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 10))
        pop = random_population(rng, n)
        mat = build_credibility_matrix(pop.groups, "random-row-stochastic",
                                       seed=seed)
        beliefs = rng.uniform(0, 1, n)
        tol = 1e-9
        via_rounds, _, _ = run_communication(beliefs, mat, tol=tol)
        w = stationary_weights(mat)
        assert (w.values > 0).all()
        for idx in w.group_index_arrays:
            assert abs(w.values[idx].sum() - 1.0) < 1e-9
        via_weights = consensus_via_weights(beliefs, w)
        assert abs(via_rounds[0] - via_weights[0]) < 10 * tol

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_consensus_is_convex_combination(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        pop = random_population(rng, n)
        mat = build_credibility_matrix(pop.groups, "random-row-stochastic",
                                       seed=seed + 1)
        beliefs = rng.uniform(0, 1, n)
        c = consensus_via_weights(beliefs, stationary_weights(mat))
        assert beliefs.min() - 1e-12 <= c[0] <= beliefs.max() + 1e-12

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_groups_dynamically_independent(self, seed):
        rng = np.random.default_rng(seed)
        sizes = [int(rng.integers(2, 5)), int(rng.integers(2, 5))]
        pop = random_population(rng, sum(sizes), group_sizes=sizes)
        mat = build_credibility_matrix(pop.groups, "random-row-stochastic",
                                       seed=seed + 2)
        w = stationary_weights(mat)
        beliefs = rng.uniform(0, 1, sum(sizes))
        zeroed = beliefs.copy()
        zeroed[sizes[0]:] = 0.0  # wipe the second group's beliefs
        full = consensus_via_weights(beliefs, w)
        cut = consensus_via_weights(zeroed, w)
        assert full[0] == cut[0]
