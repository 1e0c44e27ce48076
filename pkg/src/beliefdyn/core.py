"""Domain types, validation, and seeded generation of populations and
credibility matrices.

Agents carry a preference pair (sigma, phi_leader) and belong to exactly one
social group.  Interaction weights form a row-stochastic block-diagonal
matrix: communication never crosses group boundaries.  Everything here is
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

DICTATOR = "dictator"
DIVERSE = "diverse"

# leader / policymaker signal values: the leader claims the hate state with
# certainty, the policymaker signal is the limit of an almost-zero signal.
S_LEADER = 1.0
S_POLICYMAKER = 0.0


@dataclass(frozen=True)
class ModelParams:
    """Global model constants: punishment magnitude and per-group message cost."""

    chi: float
    comm_cost: float = 0.0

    def __post_init__(self):
        if not self.chi > 0:
            raise ValueError(f"chi must be > 0, got {self.chi}")
        if self.comm_cost < 0:
            raise ValueError(f"comm_cost must be >= 0, got {self.comm_cost}")


@dataclass(frozen=True)
class Agent:
    """One decision-maker: psychological-utility weight sigma and leader
    credibility phi_leader, both strictly inside (0, 1)."""

    id: int
    group: int
    sigma: float
    phi_leader: float


@dataclass(frozen=True)
class SocialGroup:
    id: int
    members: tuple  # agent ids, ordered
    is_scapegoat: bool = False

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Population:
    agents: tuple
    groups: tuple

    @property
    def n(self) -> int:
        return len(self.agents)

    def _cached(self, key: str, build) -> np.ndarray:
        # memo on the frozen instance: agents never change, and the period
        # stepper asks for these arrays every period
        arr = self.__dict__.get(key)
        if arr is None:
            arr = build()
            object.__setattr__(self, key, arr)
        return arr

    def sigma_array(self) -> np.ndarray:
        return self._cached("_sigma",
                            lambda: np.array([a.sigma for a in self.agents]))

    def phi_array(self) -> np.ndarray:
        return self._cached("_phi",
                            lambda: np.array([a.phi_leader
                                              for a in self.agents]))

    def group_members(self) -> tuple:
        """Agent index tuples per group, in group order (ids == indices)."""
        return tuple(tuple(g.members) for g in self.groups)


class CredibilityMatrix:
    """Row-stochastic interaction weights, block-diagonal by social group.

    Entry (i, j) is the weight agent i places on agent j when averaging.
    Either holds an explicit dense n x n array, or (dense=None) represents
    implicit within-group equal weights 1/|G|, which is what large
    populations use so the matrix never needs materialising.
    """

    def __init__(self, n: int, group_members: Sequence[Sequence[int]],
                 dense: Optional[np.ndarray] = None):
        self.n = n
        self.group_members = tuple(tuple(m) for m in group_members)
        if dense is not None:
            dense = np.asarray(dense, dtype=float)
            if dense.shape != (n, n):
                raise ValueError(f"matrix shape {dense.shape} != ({n}, {n})")
        self.dense = dense

    @property
    def is_uniform(self) -> bool:
        return self.dense is None

    def entry(self, i: int, j: int) -> float:
        if self.dense is not None:
            return float(self.dense[i, j])
        for members in self.group_members:
            if i in members:
                return 1.0 / len(members) if j in members else 0.0
        return 0.0

    def block(self, group_index: int) -> np.ndarray:
        members = list(self.group_members[group_index])
        if self.dense is not None:
            return self.dense[np.ix_(members, members)]
        m = len(members)
        return np.full((m, m), 1.0 / m)


@dataclass(frozen=True)
class DistributionSpec:
    """How to draw a per-agent parameter: iid U(0,1) on the open interval,
    an explicit list, or a constant."""

    kind: str  # "iid-uniform-open-unit" | "explicit-list" | "constant"
    value: Optional[float] = None
    values: Optional[tuple] = None

    @classmethod
    def uniform(cls) -> "DistributionSpec":
        return cls(kind="iid-uniform-open-unit")

    @classmethod
    def constant(cls, value: float) -> "DistributionSpec":
        return cls(kind="constant", value=value)

    @classmethod
    def explicit(cls, values) -> "DistributionSpec":
        return cls(kind="explicit-list", values=tuple(float(v) for v in values))

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "iid-uniform-open-unit":
            out = rng.random(n)
            # open interval: redraw the measure-zero exact endpoints
            bad = (out <= 0.0) | (out >= 1.0)
            while bad.any():
                out[bad] = rng.random(int(bad.sum()))
                bad = (out <= 0.0) | (out >= 1.0)
            return out
        if self.kind == "constant":
            if self.value is None:
                raise ValueError("constant spec needs a value")
            return np.full(n, float(self.value))
        if self.kind == "explicit-list":
            if self.values is None or len(self.values) != n:
                raise ValueError(
                    f"explicit-list spec needs exactly {n} values, got "
                    f"{0 if self.values is None else len(self.values)}")
            return np.array(self.values, dtype=float)
        raise ValueError(f"unknown distribution kind {self.kind!r}")


@dataclass(frozen=True)
class Scenario:
    """Complete experiment description; validate with validate_scenario."""

    population: Population
    params: ModelParams
    matrix: CredibilityMatrix
    regime: str  # DICTATOR | DIVERSE
    horizon: int
    comm_tolerance: float = 1e-9
    seed: int = 0


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str):
        self.violations.append(message)


_ROW_SUM_TOL = 1e-9


def _block_strongly_connected(block: np.ndarray) -> bool:
    """Reachability check on the support graph of one group block."""
    m = block.shape[0]
    support = block > 0
    for start in range(m):
        seen = np.zeros(m, dtype=bool)
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for u in np.nonzero(support[v])[0]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        if not seen.all():
            return False
    return True


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """Check every domain invariant; violations are data, never exceptions."""
    rep = ValidationReport()
    pop = scenario.population
    n = pop.n

    seen = {}
    for g in pop.groups:
        for aid in g.members:
            if aid in seen:
                rep.add(f"agent {aid} appears in groups {seen[aid]} and {g.id}")
            seen[aid] = g.id
    for a in pop.agents:
        if a.id not in seen:
            rep.add(f"agent {a.id} belongs to no group")

    for a in pop.agents:
        if not (0.0 < a.sigma < 1.0):
            rep.add(f"agent {a.id}: sigma {a.sigma} outside (0, 1)")
        if not (0.0 < a.phi_leader < 1.0):
            rep.add(f"agent {a.id}: phi_leader {a.phi_leader} outside (0, 1)")
        if seen.get(a.id) is not None and a.group != seen[a.id]:
            rep.add(f"agent {a.id}: group field {a.group} != membership {seen[a.id]}")

    if scenario.regime not in (DICTATOR, DIVERSE):
        rep.add(f"unknown regime {scenario.regime!r}")
    if scenario.horizon < 1:
        rep.add(f"horizon {scenario.horizon} < 1")

    mat = scenario.matrix
    if mat.n != n:
        rep.add(f"matrix dimension {mat.n} != agent count {n}")
        return rep
    if mat.group_members != pop.group_members():
        rep.add("matrix block structure does not match population groups")

    if mat.dense is not None:
        W = mat.dense
        if (W < 0).any():
            i, j = np.argwhere(W < 0)[0]
            rep.add(f"negative weight at ({i}, {j})")
        sums = W.sum(axis=1)
        for i in np.nonzero(np.abs(sums - 1.0) > _ROW_SUM_TOL)[0]:
            rep.add(f"row {i} not stochastic (sums to {sums[i]:.12g})")
        group_of = {}
        for g in pop.groups:
            for aid in g.members:
                group_of[aid] = g.id
        cross = np.argwhere(W != 0)
        for i, j in cross:
            if group_of.get(int(i)) != group_of.get(int(j)):
                rep.add(f"cross-group credibility at ({i}, {j})")
                break
        for i in range(n):
            if W[i, i] <= 0:
                rep.add(f"diagonal entry ({i}, {i}) not positive")
        for gi, members in enumerate(mat.group_members):
            block = W[np.ix_(list(members), list(members))]
            if not _block_strongly_connected(block):
                rep.add(f"group block {pop.groups[gi].id} not strongly connected")
    return rep


def generate_population(n: int, k_groups: int,
                        sigma_spec: DistributionSpec,
                        phi_spec: DistributionSpec,
                        seed: int,
                        group_sizes: Optional[Sequence[int]] = None,
                        scapegoat_size: int = 0) -> Population:
    """Deterministically generate agents and groups for a given seed.

    Agents are dealt to the k majority groups round-robin unless explicit
    group_sizes are given.  An optional scapegoat group (never targeted,
    holds belief 0 throughout) is appended after the majority groups.
    """
    if n < 1 or k_groups < 1:
        raise ValueError("need n >= 1 and k_groups >= 1")
    if n < k_groups:
        raise ValueError(f"n={n} < k_groups={k_groups}")
    if group_sizes is not None:
        if len(group_sizes) != k_groups or sum(group_sizes) != n:
            raise ValueError("group_sizes must have k_groups entries summing to n")

    rng = np.random.default_rng(seed)
    total = n + scapegoat_size
    sigma = sigma_spec.draw(total, rng)
    phi = phi_spec.draw(total, rng)

    if group_sizes is None:
        member_lists = [list(range(g, n, k_groups)) for g in range(k_groups)]
    else:
        member_lists, start = [], 0
        for size in group_sizes:
            member_lists.append(list(range(start, start + size)))
            start += size
    if scapegoat_size > 0:
        member_lists.append(list(range(n, total)))

    agents, groups = [], []
    for gi, members in enumerate(member_lists):
        scape = scapegoat_size > 0 and gi == k_groups
        groups.append(SocialGroup(id=gi, members=tuple(members), is_scapegoat=scape))
        for aid in members:
            agents.append(Agent(id=aid, group=gi, sigma=float(sigma[aid]),
                                phi_leader=float(phi[aid])))
    agents.sort(key=lambda a: a.id)
    return Population(agents=tuple(agents), groups=tuple(groups))


def build_credibility_matrix(groups: Sequence[SocialGroup], generator: str,
                             seed: int = 0,
                             explicit: Optional[np.ndarray] = None,
                             self_weight_floor: float = 0.05) -> CredibilityMatrix:
    """Build a block credibility matrix for the given groups.

    generator: "explicit" (array supplied, constraints enforced eagerly),
    "equal-weights" (implicit uniform blocks), or "random-row-stochastic"
    (positive in-group weights, rows normalised, diagonal floored at
    self_weight_floor which guarantees aperiodicity).
    """
    member_lists = [tuple(g.members) for g in groups]
    n = sum(len(m) for m in member_lists)

    if generator == "equal-weights":
        return CredibilityMatrix(n=n, group_members=member_lists, dense=None)

    if generator == "explicit":
        if explicit is None:
            raise ValueError("explicit generator needs a matrix")
        mat = CredibilityMatrix(n=n, group_members=member_lists,
                                dense=np.asarray(explicit, dtype=float))
        pop = Population(
            agents=tuple(Agent(id=aid, group=g.id, sigma=0.5, phi_leader=0.5)
                         for g in groups for aid in g.members),
            groups=tuple(groups))
        probe = Scenario(population=pop, params=ModelParams(chi=0.4),
                         matrix=mat, regime=DICTATOR, horizon=1)
        rep = validate_scenario(probe)
        matrix_faults = [v for v in rep.violations
                         if "sigma" not in v and "phi_leader" not in v]
        if matrix_faults:
            raise ValueError("invalid explicit matrix: " + "; ".join(matrix_faults))
        return mat

    if generator == "random-row-stochastic":
        rng = np.random.default_rng(seed)
        W = np.zeros((n, n))
        for members in member_lists:
            idx = list(members)
            m = len(idx)
            block = rng.random((m, m)) + 1e-12  # strictly positive
            block /= block.sum(axis=1, keepdims=True)
            for r in range(m):
                if block[r, r] < self_weight_floor:
                    off = 1.0 - block[r, r]
                    block[r, :] *= (1.0 - self_weight_floor) / off
                    block[r, r] = self_weight_floor
            W[np.ix_(idx, idx)] = block
        return CredibilityMatrix(n=n, group_members=member_lists, dense=W)

    raise ValueError(f"unknown generator {generator!r}")
