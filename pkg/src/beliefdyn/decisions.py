"""Per-agent, per-period signal-sampling choice by utility maximisation.

An agent weighing punishment X and psychological weight sigma compares, at
prior consensus c:

    stick to prior        belief c              utility X - 2Xc
    sample leader (s=1)   belief phi + (1-phi)c utility X - 2X*belief + sigma*phi
    sample policymaker    belief phi*c          utility X - 2X*belief - sigma*(1-phi)

In the restricted-information (dictator) regime only {leader, stick} exist
and re-adoption anchors on the zero prior, so the adopted belief is phi
itself.  All threshold rules below are the closed-form argmax of these
utilities; indifference resolves with the weak inequality on the
policymaker side and strict on the leader side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Agent, ModelParams, DICTATOR, DIVERSE


class Choice(enum.IntEnum):
    SAMPLE_POLICYMAKER = 0
    STICK_TO_PRIOR = 1
    SAMPLE_LEADER = 2


@dataclass(frozen=True)
class Decision:
    choice: Choice
    chosen_belief: float

    @property
    def act_probability(self) -> float:
        """Probability of acting on the hate belief this period."""
        return self.chosen_belief


def chosen_belief(choice: Choice, phi: float, c_prev: float,
                  regime: str = DIVERSE) -> float:
    if choice is Choice.STICK_TO_PRIOR:
        return c_prev
    if choice is Choice.SAMPLE_POLICYMAKER:
        if regime == DICTATOR:
            raise ValueError("policymaker signal unavailable in dictator regime")
        return phi * c_prev
    if regime == DICTATOR:
        return phi  # re-adoption anchors on the zero prior
    return phi + (1.0 - phi) * c_prev


def expected_utility(choice: Choice, agent: Agent, c_prev: float,
                     params: ModelParams, regime: str = DIVERSE) -> float:
    """X - 2X*belief plus the sigma-weighted psychological term."""
    x = params.chi
    mu = chosen_belief(choice, agent.phi_leader, c_prev, regime)
    if choice is Choice.SAMPLE_LEADER:
        v = agent.phi_leader
    elif choice is Choice.SAMPLE_POLICYMAKER:
        v = -(1.0 - agent.phi_leader)
    else:
        v = 0.0
    return x - 2.0 * x * mu + agent.sigma * v


def choose_dictator(agent: Agent, c_prev: float, params: ModelParams,
                    is_period_zero: bool = False) -> Decision:
    """Restricted information: adopt the leader's signal or hold the prior.

    Period 0 has prior 0, where the adoption condition reduces to
    sigma > 2X; afterwards adoption needs phi above the running consensus
    and sigma > 2X(phi - c)/phi.
    """
    c = 0.0 if is_period_zero else c_prev
    x, phi = params.chi, agent.phi_leader
    if phi > c and agent.sigma * phi > 2.0 * x * (phi - c):
        return Decision(Choice.SAMPLE_LEADER, phi)
    return Decision(Choice.STICK_TO_PRIOR, c)


def choose_diverse(agent: Agent, c_prev: float, params: ModelParams) -> Decision:
    """Three-way choice among policymaker signal, prior, and leader signal.

    Below the half-way consensus the decision bands in sigma are
    [0, 2Xc] -> policymaker, (2Xc, 2X(1-c)] -> stick, above -> leader.
    Past one half nobody sticks: the single threshold
    2X(c + phi - 2 phi c) splits policymaker from leader.
    """
    x, phi, sig = params.chi, agent.phi_leader, agent.sigma
    c = c_prev
    if c <= 0.5:
        if sig <= 2.0 * x * c:
            return Decision(Choice.SAMPLE_POLICYMAKER, phi * c)
        if sig <= 2.0 * x * (1.0 - c):
            return Decision(Choice.STICK_TO_PRIOR, c)
        return Decision(Choice.SAMPLE_LEADER, phi + (1.0 - phi) * c)
    if sig <= 2.0 * x * (c + phi - 2.0 * phi * c):
        return Decision(Choice.SAMPLE_POLICYMAKER, phi * c)
    return Decision(Choice.SAMPLE_LEADER, phi + (1.0 - phi) * c)


def available_choices(regime: str) -> tuple:
    if regime == DICTATOR:
        return (Choice.STICK_TO_PRIOR, Choice.SAMPLE_LEADER)
    return (Choice.SAMPLE_POLICYMAKER, Choice.STICK_TO_PRIOR, Choice.SAMPLE_LEADER)


# Vectorised twins of the scalar rules, used by the period stepper so that
# 1e5-agent populations stay inside numpy.  Property tests pin these to the
# scalar versions.

def decide_diverse_bulk(sigma: np.ndarray, phi: np.ndarray, c_prev: float,
                        x: float):
    """Returns (choice codes, chosen beliefs) for a whole population."""
    if c_prev <= 0.5:
        pol = sigma <= 2.0 * x * c_prev
        lead = sigma > 2.0 * x * (1.0 - c_prev)
    else:
        pol = sigma <= 2.0 * x * (c_prev + phi - 2.0 * phi * c_prev)
        lead = ~pol
    choices = np.full(sigma.shape, int(Choice.STICK_TO_PRIOR), dtype=np.int8)
    choices[pol] = int(Choice.SAMPLE_POLICYMAKER)
    choices[lead] = int(Choice.SAMPLE_LEADER)
    beliefs = np.where(pol, phi * c_prev,
                       np.where(lead, phi + (1.0 - phi) * c_prev, c_prev))
    return choices, beliefs


def decide_dictator_bulk(sigma: np.ndarray, phi: np.ndarray, c_prev: float,
                         x: float):
    lead = (phi > c_prev) & (sigma * phi > 2.0 * x * (phi - c_prev))
    choices = np.where(lead, int(Choice.SAMPLE_LEADER),
                       int(Choice.STICK_TO_PRIOR)).astype(np.int8)
    beliefs = np.where(lead, phi, c_prev)
    return choices, beliefs
