"""Mean-field consensus map under iid uniform preferences, and the entropy
of the policymaker's treatment-outcome distribution.

With sigma and phi drawn iid U(0,1) and the population taken to infinity,
the consensus update collapses to a closed form: quadratic below one half,
affine above, with unique fixed point 1 - X for X < 1/2.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .core import Agent


def meanfield_map(c: float, x: float) -> float:
    """One step of the infinite-population consensus update.

    Lower branch (c <= 1/2):  -2Xc^2 + (2X + 1/2)c + 1/2 - X
    Upper branch (c > 1/2):   c/2 + (1 - X)/2

    For x >= 1/2 no signal is ever sampled from c = 0, so the origin maps
    to itself exactly.
    """
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"c={c} outside [0, 1]")
    if x >= 0.5 and c == 0.0:
        return 0.0
    if c <= 0.5:
        return -2.0 * x * c * c + (2.0 * x + 0.5) * c + 0.5 - x
    return 0.5 * c + (1.0 - x) / 2.0


class MeanFieldDiverged(RuntimeError):
    """Fixed-point iteration hit the cap; carries the last two values."""

    def __init__(self, last: float, prev: float, iterations: int):
        super().__init__(f"no convergence after {iterations} iterations "
                         f"(last {last}, previous {prev})")
        self.last = last
        self.prev = prev
        self.iterations = iterations


def iterate_meanfield(c0: float, x: float, tol: float = 1e-12,
                      max_iter: int = 500):
    """Iterate the mean-field map from c0 until successive values differ by
    less than tol.  Returns (limit, trajectory including c0)."""
    if not (0.0 <= c0 <= 1.0):
        raise ValueError(f"c0={c0} outside [0, 1]")
    c = float(c0)
    traj = [c]
    for _ in range(max_iter):
        c_next = meanfield_map(c, x)
        traj.append(c_next)
        if abs(c_next - c) < tol:
            return c_next, traj
        c = c_next
    raise MeanFieldDiverged(traj[-1], traj[-2], max_iter)


def sampling_probabilities(agents: Union[int, Sequence], c: float,
                           x: float) -> np.ndarray:
    """Per-agent probability that a random-sigma agent takes the
    policymaker's signal at consensus c.

    Below one half the threshold 2Xc does not involve phi, so an integer
    agent count suffices; above one half each agent's phi enters and agents
    (or raw phi values) must be supplied.
    """
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"c={c} outside [0, 1]")
    if isinstance(agents, (int, np.integer)):
        if c > 0.5:
            raise ValueError("above c=1/2 the probabilities depend on phi; "
                             "pass agents or phi values, not a count")
        return np.full(int(agents), min(max(2.0 * x * c, 0.0), 1.0))
    phi = np.array([a.phi_leader if isinstance(a, Agent) else float(a)
                    for a in agents])
    if c <= 0.5:
        p = np.full(phi.shape, 2.0 * x * c)
    else:
        p = 2.0 * x * (phi + c - 2.0 * phi * c)
    return np.clip(p, 0.0, 1.0)


def shannon_entropy(p) -> float:
    """Entropy of p normalised to a distribution, natural log, 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    if (p < 0).any():
        raise ValueError("probabilities must be nonnegative")
    total = p.sum()
    if total <= 0:
        raise ValueError("need at least one positive entry")
    q = p / total
    nz = q[q > 0]
    return float(-(nz * np.log(nz)).sum())


def max_entropy(n: int) -> float:
    """Upper bound ln n, attained only by the uniform distribution."""
    return math.log(n)
