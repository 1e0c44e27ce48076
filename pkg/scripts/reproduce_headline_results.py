#!/usr/bin/env python3
"""Run the headline scenarios end to end and print a summary table:
the worked three-agent example, the restricted-information equilibrium,
the mean-field limits, the large-population Monte Carlo, the leader's
target-set tie, and the periodic two-agent fixture.
"""

import numpy as np

from beliefdyn import (Agent, DistributionSpec, ModelParams, Population,
                       Scenario, SocialGroup, build_credibility_matrix,
                       generate_population, iterate_meanfield, run,
                       stationary_weights, DICTATOR, DIVERSE)
from beliefdyn.leader import GroupProfile, optimal_target_set
from beliefdyn.pwlmap import analyze_dynamics, build_map


def worked_example():
    pairs = [(0.1, 0.2), (0.9, 0.5), (0.9, 0.8)]
    agents = tuple(Agent(id=i, group=0, sigma=s, phi_leader=p)
                   for i, (s, p) in enumerate(pairs))
    pop = Population(agents=agents,
                     groups=(SocialGroup(id=0, members=(0, 1, 2)),))
    mat = build_credibility_matrix(pop.groups, "explicit", explicit=np.array([
        [0.1, 0.4, 0.5], [0.1, 0.6, 0.3], [0.3, 0.5, 0.2]]))
    sc = Scenario(population=pop, params=ModelParams(chi=0.4), matrix=mat,
                  regime=DICTATOR, horizon=5000)
    traj = run(sc, conv_tol=1e-13)
    first = traj.records[0]
    print(f"worked example  : c_0 = {first.group_consensus[0]:.4f}, "
          f"limit = {traj.records[-1].group_consensus[0]:.6f} "
          f"({traj.terminal.kind} after {len(traj.records)} periods)")


def meanfield_limits():
    for x in (0.1, 0.25, 0.4):
        limit, traj = iterate_meanfield(0.0, x, tol=1e-12)
        print(f"mean-field      : X = {x:<4} -> limit {limit:.9f} "
              f"(residual vs 1-X: {abs(limit - (1 - x)):.1e}, "
              f"{len(traj) - 1} iterations)")


def monte_carlo():
    pop = generate_population(100_000, 1, DistributionSpec.uniform(),
                              DistributionSpec.uniform(), seed=0)
    mat = build_credibility_matrix(pop.groups, "equal-weights")
    sc = Scenario(population=pop, params=ModelParams(chi=0.25), matrix=mat,
                  regime=DIVERSE, horizon=200)
    traj = run(sc, conv_tol=0.0, record_decisions=False)
    c200 = traj.records[-1].group_consensus[0]
    print(f"monte carlo     : n = 100000, X = 0.25 -> c_200 = {c200:.6f} "
          f"(exact-expectation fixed point {np.sqrt(3) - 1:.6f})")


def leader_tie():
    profiles = [GroupProfile(id=i, size=10, phi_max=0.5) for i in range(10)]
    best, value, alternates = optimal_target_set(
        profiles, ModelParams(chi=0.4, comm_cost=0.0), "brute-force")
    sizes = sorted({t.total_size(profiles) for t in [best] + alternates})
    print(f"leader tie      : optimal total sizes {sizes}, return {value:g} "
          f"({1 + len(alternates)} maximisers)")


def periodic_fixture():
    agents = [Agent(id=0, group=0, sigma=0.9, phi_leader=0.1),
              Agent(id=1, group=0, sigma=0.6, phi_leader=0.05)]
    pwl = build_map(agents, np.array([0.5, 0.5]), 0.4)
    rep = analyze_dynamics(pwl, 0.0)
    print(f"periodic fixture: {rep.outcome}, period {rep.period_length}, "
          f"orbit in [{rep.orbit.min():.6f}, {rep.orbit.max():.6f}], "
          f"labels {rep.labels}")


if __name__ == "__main__":
    worked_example()
    meanfield_limits()
    monte_carlo()
    leader_tie()
    periodic_fixture()
