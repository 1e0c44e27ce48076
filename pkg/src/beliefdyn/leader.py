"""Leader's target-set optimisation at equilibrium.

Targeting more people dilutes credibility: each targeted agent's phi drops
by N_S/K where N_S is the targeted head count and K the whole majority.
At equilibrium every targeted group's consensus sits at its top credibility
phi_g, so the return of a target set S is

    R(S) = sum_{g in S} phi_g |g|  -  N_S^2 / K  -  |S| * cost.

The quadratic penalty couples groups (adding one group hurts all others),
which is why the naive per-group rule misfires and subset search matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import ModelParams

BRUTE_FORCE_GROUP_CAP = 20


@dataclass(frozen=True)
class GroupProfile:
    id: int
    size: int
    phi_max: float

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"group {self.id}: size must be >= 1")
        if not (0.0 < self.phi_max < 1.0):
            raise ValueError(f"group {self.id}: phi_max outside (0, 1)")


@dataclass(frozen=True)
class TargetSet:
    groups: tuple  # group ids, sorted

    @classmethod
    def of(cls, ids) -> "TargetSet":
        return cls(groups=tuple(sorted(ids)))

    def total_size(self, profiles: Sequence[GroupProfile]) -> int:
        sizes = {p.id: p.size for p in profiles}
        return sum(sizes[g] for g in self.groups)


def _k_total(profiles: Sequence[GroupProfile], k_total: Optional[int]) -> int:
    k = sum(p.size for p in profiles) if k_total is None else int(k_total)
    if k < 1:
        raise ValueError("majority population must be positive")
    return k


def effective_credibility(phi: float, n_targeted: int, k_total: int) -> float:
    """Credibility after dilution: max(0, phi - N_S/K)."""
    if k_total < n_targeted:
        raise ValueError(f"K={k_total} smaller than targeted size {n_targeted}")
    return max(0.0, phi - n_targeted / k_total)


def equilibrium_return(target: TargetSet, profiles: Sequence[GroupProfile],
                       params: ModelParams,
                       k_total: Optional[int] = None) -> float:
    """R(S) with the cross terms kept (the N_S^2 form)."""
    k = _k_total(profiles, k_total)
    by_id = {p.id: p for p in profiles}
    missing = [g for g in target.groups if g not in by_id]
    if missing:
        raise ValueError(f"profiles missing groups {missing}")
    n_s = sum(by_id[g].size for g in target.groups)
    gross = sum(by_id[g].phi_max * by_id[g].size for g in target.groups)
    return gross - n_s * n_s / k - len(target.groups) * params.comm_cost


def optimal_target_set(profiles: Sequence[GroupProfile], params: ModelParams,
                       method: str = "brute-force",
                       k_total: Optional[int] = None):
    """Maximise the equilibrium return over subsets of the majority groups.

    Returns (best TargetSet, best return, alternates) where alternates also
    attain the maximum (brute force reports every maximiser; the other
    methods report none).  The empty set with return 0 is always feasible.
    """
    k = _k_total(profiles, k_total)
    if method == "brute-force":
        if len(profiles) > BRUTE_FORCE_GROUP_CAP:
            raise ValueError(
                f"brute force capped at {BRUTE_FORCE_GROUP_CAP} groups")
        return _brute_force(profiles, params, k)
    if method == "greedy":
        return _greedy(profiles, params, k)
    if method == "closed-form-homogeneous":
        phis = {p.phi_max for p in profiles}
        if len(phis) != 1:
            raise ValueError("closed form requires all phi_max equal")
        return _closed_form(profiles, params, k, phis.pop())
    raise ValueError(f"unknown method {method!r}")


def _brute_force(profiles, params, k):
    ids = [p.id for p in profiles]
    best, best_sets = 0.0, [TargetSet.of(())]
    tol = 1e-12
    for r in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            ts = TargetSet.of(combo)
            val = equilibrium_return(ts, profiles, params, k)
            if val > best + tol:
                best, best_sets = val, [ts]
            elif abs(val - best) <= tol:
                best_sets.append(ts)
    return best_sets[0], best, best_sets[1:]


def _greedy(profiles, params, k):
    remaining = {p.id for p in profiles}
    chosen = []
    current = 0.0
    while remaining:
        gains = []
        for g in sorted(remaining):
            val = equilibrium_return(TargetSet.of(chosen + [g]), profiles,
                                     params, k)
            gains.append((val - current, g))
        gain, g = max(gains)
        if gain <= 0:
            break
        chosen.append(g)
        remaining.discard(g)
        current += gain
    ts = TargetSet.of(chosen)
    return ts, equilibrium_return(ts, profiles, params, k), []


def _closed_form(profiles, params, k, phi):
    """All phi equal: return depends on total size only, peaking at phi*K/2.
    Picks the representable total size nearest the peak (fewest groups on
    ties, to keep the cost term minimal), reconstructed by subset-sum."""
    target_n = phi * k / 2.0
    # reachable[total size] = fewest groups realising it, with a back-pointer
    reachable = {0: (0, None, None)}
    for p in profiles:
        for size, (count, _, _) in list(reachable.items()):
            cand = size + p.size
            if cand not in reachable or reachable[cand][0] > count + 1:
                reachable[cand] = (count + 1, size, p.id)
    best_n = min(reachable, key=lambda n: (abs(n - target_n), reachable[n][0]))
    ids = []
    n = best_n
    while n != 0:
        _, prev, gid = reachable[n]
        ids.append(gid)
        n = prev
    ts = TargetSet.of(ids)
    return ts, equilibrium_return(ts, profiles, params, k), []


@dataclass
class OptimalityReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_local_optimality(target: TargetSet,
                            profiles: Sequence[GroupProfile],
                            k_total: Optional[int] = None) -> OptimalityReport:
    """Marginal-gain check at zero cost, with weak inequalities to admit ties.

    Every omitted group m must satisfy  phi_m <= |g_m|/K + 2 N_S/K  (adding
    it cannot raise the return) and every included group s must satisfy
    phi_s >= |g_s|/K + 2 (N_S - |g_s|)/K  (dropping it cannot either).
    """
    k = _k_total(profiles, k_total)
    by_id = {p.id: p for p in profiles}
    n_s = sum(by_id[g].size for g in target.groups)
    included = set(target.groups)
    rep = OptimalityReport()
    tol = 1e-12
    for p in profiles:
        if p.id in included:
            bound = p.size / k + 2.0 * (n_s - p.size) / k
            if p.phi_max < bound - tol:
                rep.violations.append(
                    f"included group {p.id}: phi {p.phi_max:.6g} < "
                    f"drop threshold {bound:.6g}")
        else:
            bound = p.size / k + 2.0 * n_s / k
            if p.phi_max > bound + tol:
                rep.violations.append(
                    f"omitted group {p.id}: phi {p.phi_max:.6g} > "
                    f"add threshold {bound:.6g}")
    return rep


def equal_size_rule_reference(profiles: Sequence[GroupProfile],
                              params: ModelParams,
                              k_total: Optional[int] = None) -> dict:
    """Diagnostic only: the equal-size heuristic 'target every group with
    phi_g > |g|/K' ignores the quadratic interaction between groups, so it
    is reported next to the exact optimum together with a discrepancy flag.
    """
    k = _k_total(profiles, k_total)
    sizes = {p.size for p in profiles}
    heuristic = TargetSet.of(p.id for p in profiles if p.phi_max > p.size / k)
    best, best_val, _ = optimal_target_set(profiles, params, "brute-force", k)
    return {
        "equal_sizes": len(sizes) == 1,
        "heuristic_set": heuristic,
        "heuristic_return": equilibrium_return(heuristic, profiles, params, k),
        "optimal_set": best,
        "optimal_return": best_val,
        "agrees_with_optimum": set(heuristic.groups) == set(best.groups),
    }
