import numpy as np
import pytest

from beliefdyn import (Agent, ModelParams, Population, Scenario, SocialGroup,
                       build_credibility_matrix, DICTATOR, DIVERSE)

# Worked three-agent example: preference pairs, explicit interaction matrix.
EXAMPLE_AGENTS = ((0.1, 0.2), (0.9, 0.5), (0.9, 0.8))
EXAMPLE_MATRIX = np.array([
    [0.1, 0.4, 0.5],
    [0.1, 0.6, 0.3],
    [0.3, 0.5, 0.2],
])
EXAMPLE_X = 0.4

# Frozen regression fixture with an attracting cycle: two agents whose map
# has no in-piece fixed point, so the consensus climbs through the leader
# pieces and collapses once past the switch threshold near 0.778.
PERIODIC_AGENTS = ((0.9, 0.1), (0.6, 0.05))
PERIODIC_X = 0.4
PERIODIC_WEIGHTS = (0.5, 0.5)


def make_population(pairs, group_sizes=None):
    if group_sizes is None:
        group_sizes = [len(pairs)]
    agents, groups, start = [], [], 0
    for gi, size in enumerate(group_sizes):
        members = tuple(range(start, start + size))
        groups.append(SocialGroup(id=gi, members=members))
        for aid in members:
            s, p = pairs[aid]
            agents.append(Agent(id=aid, group=gi, sigma=s, phi_leader=p))
        start += size
    return Population(agents=tuple(agents), groups=tuple(groups))


@pytest.fixture
def example_population():
    return make_population(EXAMPLE_AGENTS)


@pytest.fixture
def example_matrix(example_population):
    return build_credibility_matrix(example_population.groups, "explicit",
                                    explicit=EXAMPLE_MATRIX)


@pytest.fixture
def example_scenario(example_population, example_matrix):
    return Scenario(population=example_population,
                    params=ModelParams(chi=EXAMPLE_X),
                    matrix=example_matrix,
                    regime=DICTATOR, horizon=5000)


def solve_stationary_3x3(matrix: np.ndarray) -> np.ndarray:
    """Independent oracle: omega Phi = omega, sum omega = 1 by elimination."""
    n = matrix.shape[0]
    system = np.vstack([(matrix.T - np.eye(n))[: n - 1], np.ones(n)])
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    return np.linalg.solve(system, rhs)


def random_population(rng, n, group_sizes=None):
    pairs = [(float(s), float(p))
             for s, p in zip(rng.uniform(0.01, 0.99, n),
                             rng.uniform(0.01, 0.99, n))]
    return make_population(pairs, group_sizes)


def random_scenario(rng, n, regime=DIVERSE, x=None, group_sizes=None,
                    horizon=5000):
    pop = random_population(rng, n, group_sizes)
    matrix = build_credibility_matrix(
        pop.groups, "random-row-stochastic", seed=int(rng.integers(2**31)))
    x = float(rng.uniform(0.05, 0.45)) if x is None else x
    return Scenario(population=pop, params=ModelParams(chi=x), matrix=matrix,
                    regime=regime, horizon=horizon)


def dictator_limit_oracle(sigma, phi, weights, x, periods=20_000):
    """Direct transcription of the threshold dynamics: track who ever
    adopts, return the largest credibility among them (exactly)."""
    sigma, phi, weights = map(np.asarray, (sigma, phi, weights))
    c = 0.0
    ever = np.zeros(len(sigma), dtype=bool)
    for _ in range(periods):
        adopt = (phi > c) & (sigma * phi > 2 * x * (phi - c))
        ever |= adopt
        c_next = float(weights[adopt] @ phi[adopt] + c * weights[~adopt].sum())
        if c_next == c:
            break
        c = c_next
    return float(phi[ever].max()) if ever.any() else 0.0
