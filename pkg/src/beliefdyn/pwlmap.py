"""The finite-population consensus update as a piecewise-linear interval map.

For a single group with fixed stationary weights, next period's consensus is
an affine function of the current one between breakpoints where some agent's
utility-maximising choice flips.  This module classifies agents by how their
choice moves with the consensus, assembles the affine pieces, finds fixed
points, iterates orbits, and labels agents in the periodic regime.

Region below one half: breakpoints come from agents switching away from the
prior (to the policymaker at sigma/(2X), to the leader at 1 - sigma/(2X)).
Region above one half: nobody holds the prior; switches between the two
signals happen at (sigma/(2X) - phi)/(1 - 2 phi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Agent
from .decisions import Choice

# lower-region classes
ALWAYS_LEADER_LOW = "A"     # sigma > 2X: samples the leader at every c <= 1/2
STICK_TO_POLICYMAKER = "B"  # sigma <= X: prior, then policymaker past t
STICK_TO_LEADER = "D"       # X < sigma <= 2X: prior, then leader past t
# upper-region classes
ALWAYS_POLICYMAKER = "R"
ALWAYS_LEADER = "U"
LEADER_TO_POLICYMAKER = "W"
POLICYMAKER_TO_LEADER = "Y"

LABEL_FOLLOWER = "follower"
LABEL_RESISTANT = "resistant"
LABEL_OSCILLATOR = "oscillator"
LABEL_STICKER = "sticker"

_CHOICE_LABEL = {
    int(Choice.SAMPLE_POLICYMAKER): LABEL_RESISTANT,
    int(Choice.STICK_TO_PRIOR): LABEL_STICKER,
    int(Choice.SAMPLE_LEADER): LABEL_FOLLOWER,
}


@dataclass(frozen=True)
class AgentClassification:
    sigma: np.ndarray
    phi: np.ndarray
    lower_class: tuple       # per agent: "A" | "B" | "D"
    lower_threshold: tuple   # switch value of c in [0, 1/2], None for "A"
    upper_class: tuple       # per agent: "R" | "U" | "W" | "Y"
    upper_threshold: tuple   # switch value of c in (1/2, 1], None for "R"/"U"

    @property
    def n(self) -> int:
        return len(self.lower_class)


@dataclass(frozen=True)
class Breakpoint:
    value: float
    sources: tuple  # (agent index, class) pairs; () for the region boundary


@dataclass(frozen=True, eq=False)
class AffinePiece:
    lo: float
    hi: float               # piece covers (lo, hi]; the first piece includes 0
    slope: float
    intercept: float
    choices: np.ndarray     # per-agent Choice codes, constant on the interior

    @property
    def degenerate(self) -> bool:
        """All-stick piece: the identity map, every point fixed."""
        return self.slope == 1.0 and self.intercept == 0.0

    def __call__(self, c: float) -> float:
        return self.slope * c + self.intercept


@dataclass(frozen=True)
class FixedPoint:
    c_star: Optional[float]   # None when the whole piece is fixed
    piece_index: int
    stable: bool
    whole_piece: bool = False


@dataclass(frozen=True, eq=False)
class PiecewiseLinearMap:
    pieces: tuple
    breakpoints: tuple
    weights: np.ndarray
    x: float

    def piece_index(self, c: float) -> int:
        if not (0.0 <= c <= 1.0):
            raise ValueError(f"c={c} outside [0, 1]")
        his = [p.hi for p in self.pieces]
        return int(np.searchsorted(his, c, side="left"))

    def __call__(self, c: float) -> float:
        # the exact map never leaves [0, 1]; trim the last-ulp float spill
        # from pieces whose slope and intercept sum to exactly one
        return min(max(self.pieces[self.piece_index(c)](c), 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class DynamicsReport:
    outcome: str                       # "fixed-point" | "periodic" | "undetermined"
    labels: Optional[tuple]
    iterations: int
    fixed_point: Optional[float] = None
    piece_index: Optional[int] = None
    orbit: Optional[np.ndarray] = None
    period_length: Optional[int] = None


def classify_agents(agents: Sequence[Agent], x: float) -> AgentClassification:
    """Assign every agent its switching class and threshold in both regions.

    Valid for any x > 0; when x >= 1/2 the always-leader lower class is
    simply empty and the first piece of the map degenerates to the identity.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    sigma = np.array([a.sigma for a in agents])
    phi = np.array([a.phi_leader for a in agents])
    lower_class, lower_t, upper_class, upper_t = [], [], [], []
    for s, p in zip(sigma, phi):
        if s > 2 * x:
            lower_class.append(ALWAYS_LEADER_LOW)
            lower_t.append(None)
        elif s <= x:
            lower_class.append(STICK_TO_POLICYMAKER)
            lower_t.append(s / (2 * x))
        else:
            lower_class.append(STICK_TO_LEADER)
            lower_t.append(1.0 - s / (2 * x))

        if p == 0.5:
            # threshold is the constant X: no switch above one half
            if s <= x:
                upper_class.append(ALWAYS_POLICYMAKER)
            else:
                upper_class.append(ALWAYS_LEADER)
            upper_t.append(None)
        elif p < 0.5:
            if s <= x:
                upper_class.append(ALWAYS_POLICYMAKER)
                upper_t.append(None)
            elif s > 2 * x * (1 - p):
                upper_class.append(ALWAYS_LEADER)
                upper_t.append(None)
            else:
                upper_class.append(LEADER_TO_POLICYMAKER)
                upper_t.append((s / (2 * x) - p) / (1 - 2 * p))
        else:
            if s <= 2 * x * (1 - p):
                upper_class.append(ALWAYS_POLICYMAKER)
                upper_t.append(None)
            elif s > x:
                upper_class.append(ALWAYS_LEADER)
                upper_t.append(None)
            else:
                upper_class.append(POLICYMAKER_TO_LEADER)
                upper_t.append((s / (2 * x) - p) / (1 - 2 * p))
    return AgentClassification(
        sigma=sigma, phi=phi,
        lower_class=tuple(lower_class), lower_threshold=tuple(lower_t),
        upper_class=tuple(upper_class), upper_threshold=tuple(upper_t))


def _piece_choices(cls: AgentClassification, mid: float) -> np.ndarray:
    """Every agent's decision on the piece whose interior contains mid."""
    out = np.empty(cls.n, dtype=np.int8)
    for i in range(cls.n):
        if mid <= 0.5:
            kind, t = cls.lower_class[i], cls.lower_threshold[i]
            if kind == ALWAYS_LEADER_LOW:
                out[i] = int(Choice.SAMPLE_LEADER)
            elif kind == STICK_TO_POLICYMAKER:
                out[i] = (int(Choice.STICK_TO_PRIOR) if mid < t
                          else int(Choice.SAMPLE_POLICYMAKER))
            else:
                out[i] = (int(Choice.STICK_TO_PRIOR) if mid < t
                          else int(Choice.SAMPLE_LEADER))
        else:
            kind, t = cls.upper_class[i], cls.upper_threshold[i]
            if kind == ALWAYS_POLICYMAKER:
                out[i] = int(Choice.SAMPLE_POLICYMAKER)
            elif kind == ALWAYS_LEADER:
                out[i] = int(Choice.SAMPLE_LEADER)
            elif kind == LEADER_TO_POLICYMAKER:
                out[i] = (int(Choice.SAMPLE_LEADER) if mid < t
                          else int(Choice.SAMPLE_POLICYMAKER))
            else:
                out[i] = (int(Choice.SAMPLE_POLICYMAKER) if mid < t
                          else int(Choice.SAMPLE_LEADER))
    return out


def build_map(agents: Sequence[Agent], weights, x: float) -> PiecewiseLinearMap:
    """Assemble the sorted affine pieces of the consensus update over [0, 1].

    weights: positive per-agent stationary weights summing to 1 (an ndarray,
    or anything exposing .values).
    """
    w = np.asarray(getattr(weights, "values", weights), dtype=float)
    if w.shape != (len(agents),):
        raise ValueError("weights length does not match agents")
    cls = classify_agents(agents, x)

    raw = []  # (threshold, agent index, class)
    for i in range(cls.n):
        t = cls.lower_threshold[i]
        if t is not None and 0.0 < t <= 0.5:
            raw.append((t, i, cls.lower_class[i]))
        t = cls.upper_threshold[i]
        if t is not None and 0.5 < t < 1.0:
            raw.append((t, i, cls.upper_class[i]))
    by_value = {}
    for t, i, kind in raw:
        by_value.setdefault(t, []).append((i, kind))
    by_value.setdefault(0.5, [])  # region boundary
    breakpoints = tuple(Breakpoint(value=v, sources=tuple(by_value[v]))
                        for v in sorted(by_value))

    edges = [0.0] + [b.value for b in breakpoints] + [1.0]
    pieces = []
    phi = cls.phi
    for lo, hi in zip(edges[:-1], edges[1:]):
        choices = _piece_choices(cls, (lo + hi) / 2.0)
        pol = choices == int(Choice.SAMPLE_POLICYMAKER)
        stick = choices == int(Choice.STICK_TO_PRIOR)
        lead = choices == int(Choice.SAMPLE_LEADER)
        if stick.all():
            # everyone keeps the prior: exactly the identity, float dust
            # in the weight sum must not leak into the degenerate piece
            slope, intercept = 1.0, 0.0
        else:
            slope = float((w[pol] * phi[pol]).sum() + w[stick].sum()
                          + (w[lead] * (1.0 - phi[lead])).sum())
            slope = min(slope, 1.0)  # true value is < 1; trim weight dust
            intercept = float((w[lead] * phi[lead]).sum())
        pieces.append(AffinePiece(lo=lo, hi=hi, slope=slope,
                                  intercept=intercept, choices=choices))
    return PiecewiseLinearMap(pieces=tuple(pieces), breakpoints=breakpoints,
                              weights=w, x=x)


def find_fixed_points(pwl: PiecewiseLinearMap) -> list:
    """Candidate gamma/(1 - beta) per piece, kept iff inside the piece.

    Degenerate all-stick pieces are reported whole: every point is fixed.
    """
    out = []
    for m, piece in enumerate(pwl.pieces):
        if piece.degenerate:
            out.append(FixedPoint(c_star=None, piece_index=m, stable=True,
                                  whole_piece=True))
            continue
        if piece.slope >= 1.0:
            continue  # slope 1 with nonzero intercept cannot occur
        cand = piece.intercept / (1.0 - piece.slope)
        # a piece where everyone samples the leader has its fixed point at
        # exactly 1; snap the last-ulp division error back onto the domain
        if 1.0 < cand < 1.0 + 1e-9:
            cand = 1.0
        if -1e-9 < cand < 0.0:
            cand = 0.0
        lo_ok = cand >= 0.0 if m == 0 else cand > piece.lo
        if lo_ok and cand <= piece.hi:
            out.append(FixedPoint(c_star=cand, piece_index=m, stable=True))
    return out


def detect_value_cycle(values, tol: float, max_period: int = 64):
    """Smallest period p such that the last 2p entries repeat within tol.

    values may be a sequence of scalars or of per-group vectors.  Returns
    None when no period up to max_period fits.  p == 1 means the sequence
    has settled; genuine cycles report p >= 2.
    """
    arr = np.asarray(values, dtype=float)
    k = arr.shape[0]
    for p in range(1, max_period + 1):
        if k < 2 * p:
            return None
        recent = arr[k - 2 * p:]
        if np.abs(recent[p:] - recent[:p]).max() < tol:
            return p
    return None


def _labels_from_choice_sets(choice_rows: np.ndarray) -> tuple:
    """choice_rows: (#orbit points, n) decision codes -> per-agent label."""
    labels = []
    for col in choice_rows.T:
        kinds = set(int(v) for v in col)
        if len(kinds) > 1:
            labels.append(LABEL_OSCILLATOR)
        else:
            labels.append(_CHOICE_LABEL[kinds.pop()])
    return tuple(labels)


def analyze_dynamics(pwl: PiecewiseLinearMap, c0: float,
                     max_iter: int = 10_000, tol: float = 1e-9) -> DynamicsReport:
    """Iterate the map from c0 and classify the long-run behaviour.

    Fixed point: the trajectory settles inside a piece containing its own
    affine fixed point (reported exactly as gamma/(1-beta)).  Periodic: the
    value sequence revisits itself with a stable repeating piece pattern;
    the orbit is then refined by composing the affine maps along the cycle,
    which is a contraction, so the reported orbit is the unique attractor.
    """
    if not (0.0 <= c0 <= 1.0):
        raise ValueError(f"c0={c0} outside [0, 1]")
    c = float(c0)
    values = [c]
    piece_seq = []
    for step in range(max_iter):
        m = pwl.piece_index(c)
        piece = pwl.pieces[m]
        piece_seq.append(m)
        c_next = min(max(piece(c), 0.0), 1.0)
        values.append(c_next)

        if piece.degenerate and c_next == c:
            return DynamicsReport(
                outcome="fixed-point", fixed_point=c, piece_index=m,
                labels=_labels_from_choice_sets(piece.choices[None, :]),
                iterations=step + 1)
        if abs(c_next - c) < tol:
            cand = piece.intercept / (1.0 - piece.slope)
            if 1.0 < cand < 1.0 + 1e-9:
                cand = 1.0
            if -1e-9 < cand < 0.0:
                cand = 0.0
            in_piece = (cand >= piece.lo if m == 0 else cand > piece.lo) \
                and cand <= piece.hi
            if in_piece:
                return DynamicsReport(
                    outcome="fixed-point", fixed_point=cand, piece_index=m,
                    labels=_labels_from_choice_sets(piece.choices[None, :]),
                    iterations=step + 1)
        if len(piece_seq) >= 4:
            p = detect_value_cycle(values[-128:], tol=tol, max_period=64)
            if p is not None and p >= 2 and len(piece_seq) >= 2 * p:
                pattern = piece_seq[-p:]
                if pattern == piece_seq[-2 * p:-p] and len(set(pattern)) > 1:
                    orbit = _refine_orbit(pwl, pattern)
                    rows = np.stack([pwl.pieces[pwl.piece_index(v)].choices
                                     for v in orbit])
                    return DynamicsReport(
                        outcome="periodic", orbit=orbit, period_length=p,
                        labels=_labels_from_choice_sets(rows),
                        iterations=step + 1)
        c = c_next
    return DynamicsReport(outcome="undetermined", labels=None,
                          iterations=max_iter)


def _refine_orbit(pwl: PiecewiseLinearMap, pattern: list) -> np.ndarray:
    """Exact attracting orbit of the affine composition along a piece cycle."""
    slope, intercept = 1.0, 0.0
    for m in pattern:
        piece = pwl.pieces[m]
        slope = piece.slope * slope
        intercept = piece.slope * intercept + piece.intercept
    v = intercept / (1.0 - slope)
    orbit = [v]
    for m in pattern[:-1]:
        v = min(max(pwl.pieces[m](v), 0.0), 1.0)
        orbit.append(v)
    return np.array(orbit)


def classify_periodic(cls: AgentClassification, x: float,
                      p0: float, p1: float) -> tuple:
    """Long-run label per agent when the consensus cycles with extremes
    p0 < p1 (case split on where the extremes sit relative to one half).

    Thresholds are evaluated at the orbit extremes; past one half the
    signal-switch threshold moves with the consensus, rising for phi below
    one half and falling above it, so the binding extreme flips with phi.
    """
    if not (0.0 < p0 < p1 <= 1.0):
        raise ValueError(f"need 0 < p0 < p1 <= 1, got ({p0}, {p1})")
    sigma, phi = cls.sigma, cls.phi

    def tau(c, p):
        return 2.0 * x * (c + p - 2.0 * p * c)

    labels = []
    for s, p in zip(sigma, phi):
        if p1 <= 0.5:
            if s <= 2 * x * p0:
                labels.append(LABEL_RESISTANT)
            elif s <= 2 * x * p1:
                labels.append(LABEL_OSCILLATOR)       # prior <-> policymaker
            elif s <= 2 * x * (1 - p1):
                labels.append(LABEL_STICKER)
            elif s <= 2 * x * (1 - p0):
                labels.append(LABEL_OSCILLATOR)       # prior <-> leader
            else:
                labels.append(LABEL_FOLLOWER)
        elif p0 <= 0.5:
            if s <= min(2 * x * p0, tau(p1, p)):
                labels.append(LABEL_RESISTANT)
            elif s > max(2 * x * (1 - p0), tau(p1, p)):
                labels.append(LABEL_FOLLOWER)
            else:
                labels.append(LABEL_OSCILLATOR)
        else:
            lo_t, hi_t = sorted((tau(p0, p), tau(p1, p)))
            if s <= lo_t:
                labels.append(LABEL_RESISTANT)
            elif s > hi_t:
                labels.append(LABEL_FOLLOWER)
            else:
                labels.append(LABEL_OSCILLATOR)       # leader <-> policymaker
    return tuple(labels)


def map_to_dict(pwl: PiecewiseLinearMap, fixed_points=None) -> dict:
    """JSON-ready description: pieces sorted by lower bound, breakpoints
    with provenance, and any fixed points (for cobweb rendering)."""
    if fixed_points is None:
        fixed_points = find_fixed_points(pwl)
    return {
        "x": pwl.x,
        "pieces": [
            {"lo": p.lo, "hi": p.hi, "slope": p.slope,
             "intercept": p.intercept, "degenerate": p.degenerate}
            for p in pwl.pieces
        ],
        "breakpoints": [
            {"c": b.value,
             "sources": [{"agent": i, "class": kind} for i, kind in b.sources]}
            for b in pwl.breakpoints
        ],
        "fixed_points": [
            {"c": fp.c_star, "piece": fp.piece_index, "stable": fp.stable,
             "whole_piece": fp.whole_piece}
            for fp in fixed_points
        ],
    }
