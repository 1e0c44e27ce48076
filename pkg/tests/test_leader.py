import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beliefdyn import (GroupProfile, ModelParams, TargetSet,
                       effective_credibility, equilibrium_return,
                       optimal_target_set, verify_local_optimality)
from beliefdyn.leader import equal_size_rule_reference

NO_COST = ModelParams(chi=0.4, comm_cost=0.0)


def profiles_of(sizes, phis):
    return [GroupProfile(id=i, size=s, phi_max=p)
            for i, (s, p) in enumerate(zip(sizes, phis))]


def random_instance(rng, max_groups=8):
    k = int(rng.integers(1, max_groups + 1))
    sizes = [int(rng.integers(1, 40)) for _ in range(k)]
    phis = [float(rng.uniform(0.02, 0.98)) for _ in range(k)]
    return profiles_of(sizes, phis)


class TestEffectiveCredibility:
    def test_empty_target(self):
        assert effective_credibility(0.7, 0, 100) == 0.7

    def test_full_clipping(self):
        assert effective_credibility(0.7, 100, 100) == 0.0

    def test_direct_value(self):
        assert effective_credibility(0.7, 50, 100) == pytest.approx(0.2)

    def test_requires_k_at_least_target(self):
        with pytest.raises(ValueError):
            effective_credibility(0.7, 101, 100)


class TestEquilibriumReturn:
    def test_empty_set(self):
        profiles = profiles_of([10, 10], [0.5, 0.5])
        assert equilibrium_return(TargetSet.of(()), profiles, NO_COST) == 0.0

    def test_single_group_quarter_population(self):
        profiles = profiles_of([25], [0.5])
        val = equilibrium_return(TargetSet.of([0]), profiles, NO_COST,
                                 k_total=100)
        assert val == pytest.approx(0.5 * 25 - 625 / 100)  # 6.25

    def test_two_groups_cross_terms(self):
        profiles = profiles_of([10, 10], [0.5, 0.5])
        val = equilibrium_return(TargetSet.of([0, 1]), profiles, NO_COST,
                                 k_total=100)
        assert val == pytest.approx(0.5 * 20 - 400 / 100)  # 6.0

    def test_cost_scales_with_set_size(self):
        profiles = profiles_of([10, 10], [0.9, 0.9])
        costly = ModelParams(chi=0.4, comm_cost=0.25)
        free = equilibrium_return(TargetSet.of([0, 1]), profiles, NO_COST)
        paid = equilibrium_return(TargetSet.of([0, 1]), profiles, costly)
        assert paid == pytest.approx(free - 0.5)


class TestOptimalTargetSet:
    def test_ten_by_ten_tie(self):
        profiles = profiles_of([10] * 10, [0.5] * 10)
        best, value, alternates = optimal_target_set(profiles, NO_COST,
                                                     "brute-force")
        assert value == pytest.approx(6.0)
        winners = [best] + alternates
        sizes = {t.total_size(profiles) for t in winners}
        assert sizes == {20, 30}

    def test_single_positive_option(self):
        profiles = profiles_of([25], [0.5])
        best, value, _ = optimal_target_set(profiles, NO_COST, "brute-force",
                                            k_total=100)
        assert best.groups == (0,)
        assert value == pytest.approx(6.25)

    def test_all_negative_returns_empty(self):
        profiles = profiles_of([90], [0.5])
        best, value, _ = optimal_target_set(profiles, NO_COST, "brute-force",
                                            k_total=100)
        assert best.groups == ()
        assert value == 0.0

    def test_brute_force_cap(self):
        profiles = profiles_of([1] * 21, [0.5] * 21)
        with pytest.raises(ValueError, match="capped"):
            optimal_target_set(profiles, NO_COST, "brute-force")

    def test_closed_form_requires_homogeneous(self):
        profiles = profiles_of([10, 10], [0.5, 0.6])
        with pytest.raises(ValueError, match="phi_max"):
            optimal_target_set(profiles, NO_COST, "closed-form-homogeneous")

    def test_closed_form_matches_brute_force_when_representable(self):
        # phi*K/2 = 0.6*100/2 = 30, representable with three groups of 10
        profiles = profiles_of([10] * 10, [0.6] * 10)
        bf_set, bf_val, _ = optimal_target_set(profiles, NO_COST, "brute-force")
        cf_set, cf_val, _ = optimal_target_set(profiles, NO_COST,
                                               "closed-form-homogeneous")
        assert cf_set.total_size(profiles) == 30
        assert bf_set.total_size(profiles) == 30
        assert cf_val == pytest.approx(bf_val)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_brute_beats_greedy_beats_zero(self, seed):
        rng = np.random.default_rng(seed)
        profiles = random_instance(rng)
        _, bf_val, _ = optimal_target_set(profiles, NO_COST, "brute-force")
        _, gr_val, _ = optimal_target_set(profiles, NO_COST, "greedy")
        assert bf_val + 1e-12 >= gr_val >= 0.0


class TestVerifyLocalOptimality:
    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_brute_force_optimum_passes(self, seed):
        rng = np.random.default_rng(seed)
        profiles = random_instance(rng)
        best, _, _ = optimal_target_set(profiles, NO_COST, "brute-force")
        rep = verify_local_optimality(best, profiles)
        assert rep.ok, rep.violations

    def test_swapped_pair_flagged(self):
        # clearly separated instance: optimum targets the high-phi group,
        # and the low-phi group cannot even pay for itself
        profiles = profiles_of([10, 10], [0.9, 0.05])
        best, _, _ = optimal_target_set(profiles, NO_COST, "brute-force",
                                        k_total=100)
        assert best.groups == (0,)
        swapped = TargetSet.of([1])
        rep = verify_local_optimality(swapped, profiles, k_total=100)
        assert len(rep.violations) == 2
        assert any("omitted group 0" in v for v in rep.violations)
        assert any("included group 1" in v for v in rep.violations)

    def test_empty_set_checks_only_omissions(self):
        profiles = profiles_of([90], [0.5])
        best, _, _ = optimal_target_set(profiles, NO_COST, "brute-force",
                                        k_total=100)
        rep = verify_local_optimality(best, profiles, k_total=100)
        assert rep.ok

    def test_cost_comparative_statics(self):
        # the |S| penalty is linear: larger costs never enlarge optimal sets
        rng = np.random.default_rng(42)
        for _ in range(10):
            profiles = random_instance(rng, max_groups=6)
            prev_card = None
            for cost in [0.0, 0.05, 0.2, 0.5, 1.0, 3.0]:
                params = ModelParams(chi=0.4, comm_cost=cost)
                best, val, alternates = optimal_target_set(
                    profiles, params, "brute-force")
                card = max(len(t.groups) for t in [best] + alternates)
                if prev_card is not None:
                    assert card <= prev_card
                prev_card = card


class TestEqualSizeRuleDiagnostic:
    def test_reports_discrepancy_on_interacting_instance(self):
        # the heuristic targets every group with phi > |g|/K and ignores the
        # cross-group dilution, so it over-targets here
        profiles = profiles_of([20] * 5, [0.5] * 5)
        diag = equal_size_rule_reference(profiles, NO_COST)
        assert diag["equal_sizes"]
        assert len(diag["heuristic_set"].groups) == 5
        assert not diag["agrees_with_optimum"]
        assert diag["optimal_return"] > diag["heuristic_return"]

    def test_single_group_agrees(self):
        profiles = profiles_of([25], [0.5])
        diag = equal_size_rule_reference(profiles, NO_COST, k_total=100)
        assert diag["agrees_with_optimum"]
