"""Utilitarian-belief dynamics on group-structured social networks.

Agents pick which signal to sample by maximising instrumental plus
psychological utility, then reach within-group consensus by repeated
weighted averaging.  The package simulates the dynamics, analyses the
finite-population consensus update as a piecewise-linear interval map,
computes the mean-field limit, and optimises the leader's target set.
"""

__version__ = "0.1.0"

from .core import (Agent, CredibilityMatrix, DistributionSpec, ModelParams,
                   Population, Scenario, SocialGroup, build_credibility_matrix,
                   generate_population, validate_scenario, DICTATOR, DIVERSE)
from .consensus import (StationaryWeights, consensus_via_weights,
                        run_communication, stationary_weights)
from .decisions import (Choice, Decision, choose_dictator, choose_diverse,
                        expected_utility)
from .simulate import PeriodRecord, Terminal, Trajectory, run, step_period
from .analysis import (iterate_meanfield, meanfield_map,
                       sampling_probabilities, shannon_entropy)
from .leader import (GroupProfile, TargetSet, effective_credibility,
                     equilibrium_return, optimal_target_set,
                     verify_local_optimality)
from .pwlmap import (AgentClassification, PiecewiseLinearMap, analyze_dynamics,
                     build_map, classify_agents, classify_periodic,
                     find_fixed_points)
