"""Within-period communication: repeated row-vector multiplication by the
credibility matrix, stationary influence weights, and per-group consensus.

Each group block is an irreducible aperiodic stochastic matrix, so repeated
averaging drives every group to a common value: the dot product of the
block's stationary left eigenvector with the chosen beliefs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CredibilityMatrix

POWER_TOL = 1e-12
POWER_CAP = 1_000_000


class NumericalFailure(RuntimeError):
    """Power iteration failed to converge: an invalid matrix slipped through."""


@dataclass(frozen=True, eq=False)
class StationaryWeights:
    """Full-length weight vector, normalised to sum 1 within each group block.

    group_index_arrays holds the member indices of each group as ready-made
    integer arrays so per-period dot products stay cheap for large n.
    """

    values: np.ndarray
    group_index_arrays: tuple

    def group_values(self, group_index: int) -> np.ndarray:
        return self.values[self.group_index_arrays[group_index]]


def _index_arrays(group_members) -> tuple:
    return tuple(np.asarray(members, dtype=np.intp) for members in group_members)


def stationary_weights(matrix: CredibilityMatrix) -> StationaryWeights:
    """Left eigenvector at eigenvalue 1 per block, by power iteration.

    Starts from the uniform vector (deterministic), stops when successive
    iterates differ by less than POWER_TOL in max norm.
    """
    idx_arrays = _index_arrays(matrix.group_members)
    values = np.zeros(matrix.n)
    for gi, idx in enumerate(idx_arrays):
        m = len(idx)
        if matrix.is_uniform:
            values[idx] = 1.0 / m  # uniform blocks are doubly stochastic
            continue
        block = matrix.block(gi)
        w = np.full(m, 1.0 / m)
        for _ in range(POWER_CAP):
            w_next = w @ block
            w_next /= w_next.sum()
            if np.abs(w_next - w).max() < POWER_TOL:
                w = w_next
                break
            w = w_next
        else:
            raise NumericalFailure(
                f"power iteration did not converge on group block {gi}")
        values[idx] = w
    return StationaryWeights(values=values, group_index_arrays=idx_arrays)


def run_communication(chosen: np.ndarray, matrix: CredibilityMatrix,
                      tol: float = 1e-9, max_rounds: int = 10_000):
    """Average repeatedly (each agent over their own weight row) until the
    within-group spread falls below tol.

    Returns (consensus per group, rounds used, final belief vector).  The
    consensus is the midpoint of the residual spread.  Raises
    NumericalFailure carrying the residual spread if max_rounds is hit.
    """
    v = np.asarray(chosen, dtype=float).copy()
    if v.shape != (matrix.n,):
        raise ValueError(f"belief vector length {v.shape} != ({matrix.n},)")
    idx_arrays = _index_arrays(matrix.group_members)

    def spreads(vec):
        return [float(np.ptp(vec[idx])) for idx in idx_arrays]

    if matrix.is_uniform:
        # one round of uniform averaging lands exactly on the block mean
        out = v.copy()
        rounds = 0
        if max(spreads(v)) > tol:
            for idx in idx_arrays:
                out[idx] = v[idx].mean()
            rounds = 1
        consensus = np.array([(out[idx].max() + out[idx].min()) / 2
                              for idx in idx_arrays])
        return consensus, rounds, out

    rounds = 0
    while max(spreads(v)) > tol:
        if rounds >= max_rounds:
            raise NumericalFailure(
                f"no consensus after {max_rounds} rounds; residual spreads "
                f"{[f'{s:.3g}' for s in spreads(v)]}")
        v = matrix.dense @ v
        rounds += 1
    consensus = np.array([(v[idx].max() + v[idx].min()) / 2
                          for idx in idx_arrays])
    return consensus, rounds, v


def consensus_via_weights(chosen: np.ndarray, weights: StationaryWeights) -> np.ndarray:
    """Per-group dot product of stationary weights with chosen beliefs."""
    chosen = np.asarray(chosen, dtype=float)
    if chosen.shape != weights.values.shape:
        raise ValueError("belief vector length does not match weights")
    return np.array([
        float(weights.values[idx] @ chosen[idx])
        for idx in weights.group_index_arrays
    ])
