"""Period-level orchestration: decisions, communication to consensus,
trajectory recording, and polarization accounting.

Each period every non-scapegoat agent picks a signal given the previous
group consensus, then within-group averaging collapses the chosen beliefs
to the stationary-weight dot product.  Scapegoat-group agents hold belief 0
throughout and never decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Scenario, DICTATOR
from .consensus import StationaryWeights, stationary_weights
from .decisions import Choice, decide_dictator_bulk, decide_diverse_bulk
from .pwlmap import detect_value_cycle


@dataclass(frozen=True, eq=False)
class PeriodRecord:
    period: int
    group_consensus: np.ndarray          # one value per group, in group order
    fractions: tuple                     # per group: (f_policymaker, f_stick, f_leader)
    choices: Optional[np.ndarray] = None       # per-agent Choice codes
    chosen_beliefs: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Terminal:
    kind: str                            # "converged" | "horizon-exhausted" | "periodic"
    consensus: Optional[np.ndarray] = None
    period_length: Optional[int] = None


@dataclass(frozen=True)
class Trajectory:
    records: list
    terminal: Terminal

    def consensus_series(self, group_index: int = 0) -> np.ndarray:
        return np.array([r.group_consensus[group_index] for r in self.records])


def weighted_fractions(choices: np.ndarray, weights: StationaryWeights,
                       group_index: int) -> tuple:
    """Stationary-weight mass of each decision within one group."""
    idx = weights.group_index_arrays[group_index]
    w = weights.values[idx]
    ch = choices[idx]
    f_pol = float(w[ch == int(Choice.SAMPLE_POLICYMAKER)].sum())
    f_stick = float(w[ch == int(Choice.STICK_TO_PRIOR)].sum())
    f_lead = float(w[ch == int(Choice.SAMPLE_LEADER)].sum())
    return (f_pol, f_stick, f_lead)


def step_period(prev_consensus: np.ndarray, scenario: Scenario, period: int,
                weights: Optional[StationaryWeights] = None,
                record_decisions: bool = True) -> PeriodRecord:
    """Run one period: decide, communicate, record."""
    pop = scenario.population
    if weights is None:
        weights = stationary_weights(scenario.matrix)
    x = scenario.params.chi
    sigma = pop.sigma_array()
    phi = pop.phi_array()

    choices = np.full(pop.n, int(Choice.STICK_TO_PRIOR), dtype=np.int8)
    beliefs = np.zeros(pop.n)
    for gi, group in enumerate(pop.groups):
        idx = weights.group_index_arrays[gi]
        if group.is_scapegoat:
            beliefs[idx] = 0.0
            continue
        c_prev = float(prev_consensus[gi])
        if scenario.regime == DICTATOR:
            ch, mu = decide_dictator_bulk(sigma[idx], phi[idx], c_prev, x)
        else:
            ch, mu = decide_diverse_bulk(sigma[idx], phi[idx], c_prev, x)
        choices[idx] = ch
        beliefs[idx] = mu

    # convex combination of [0,1] beliefs; clip the last-ulp float overshoot
    consensus = np.clip(np.array([
        float(weights.values[weights.group_index_arrays[gi]]
              @ beliefs[weights.group_index_arrays[gi]])
        for gi in range(len(pop.groups))
    ]), 0.0, 1.0)
    fractions = tuple(weighted_fractions(choices, weights, gi)
                      for gi in range(len(pop.groups)))
    return PeriodRecord(
        period=period, group_consensus=consensus, fractions=fractions,
        choices=choices if record_decisions else None,
        chosen_beliefs=beliefs if record_decisions else None)


def polarization_fractions(record: PeriodRecord) -> tuple:
    """Per-group (f_policymaker, f_stick, f_leader) of a recorded period."""
    return record.fractions


def run(scenario: Scenario, conv_tol: float = 1e-9,
        record_decisions: bool = True, cycle_cap: int = 64) -> Trajectory:
    """Iterate periods until the consensus settles, cycles, or the horizon ends.

    Convergence means every group moved less than conv_tol since the last
    period.  Cycle detection uses the same value-revisit criterion as the
    interval-map analyzer so the two paths cannot disagree.
    """
    weights = stationary_weights(scenario.matrix)
    n_groups = len(scenario.population.groups)
    prev = np.zeros(n_groups)
    records = []
    history = []  # per-period group-consensus vectors

    for period in range(scenario.horizon):
        rec = step_period(prev, scenario, period, weights=weights,
                          record_decisions=record_decisions)
        records.append(rec)
        history.append(rec.group_consensus)
        if conv_tol > 0 and np.abs(rec.group_consensus - prev).max() < conv_tol:
            return Trajectory(records, Terminal("converged",
                                                consensus=rec.group_consensus))
        if conv_tol > 0 and len(history) >= 4:
            # a cycle must repeat in every group at once; only the tail
            # can matter for periods up to the cap
            spread = np.array(history[-2 * cycle_cap:])
            p = detect_value_cycle(spread, tol=conv_tol, max_period=cycle_cap)
            if p is not None and p >= 2:
                return Trajectory(records, Terminal("periodic", period_length=p))
        prev = rec.group_consensus
    return Trajectory(records, Terminal("horizon-exhausted",
                                        consensus=records[-1].group_consensus))
