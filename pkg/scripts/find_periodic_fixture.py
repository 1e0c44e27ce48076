#!/usr/bin/env python3
"""Randomized search for small populations whose consensus map has no
in-piece fixed point, so the trajectory settles into a genuine cycle.

This is the search that produced the frozen two-agent regression fixture
(sigma, phi) = (0.9, 0.1), (0.6, 0.05) at X = 0.4: every found instance is
printed with its period and orbit extremes so new fixtures can be frozen.
"""

import argparse

import numpy as np

from beliefdyn import Agent
from beliefdyn.pwlmap import analyze_dynamics, build_map, find_fixed_points


def search(trials: int, seed: int, n_max: int):
    rng = np.random.default_rng(seed)
    found = 0
    for trial in range(trials):
        n = int(rng.integers(2, n_max + 1))
        sigma = rng.uniform(0.01, 0.99, n)
        phi = rng.uniform(0.01, 0.99, n)
        w = rng.dirichlet(np.ones(n))
        x = float(rng.uniform(0.05, 0.49))
        agents = [Agent(id=i, group=0, sigma=float(s), phi_leader=float(p))
                  for i, (s, p) in enumerate(zip(sigma, phi))]
        pwl = build_map(agents, w, x)
        rep = analyze_dynamics(pwl, 0.0, max_iter=5000)
        if rep.outcome != "periodic":
            continue
        found += 1
        print(f"trial {trial}: n={n} x={x:.6f} period={rep.period_length} "
              f"orbit=[{rep.orbit.min():.6f}, {rep.orbit.max():.6f}] "
              f"in_piece_fps={len(find_fixed_points(pwl))}")
        print(f"  sigma={list(np.round(sigma, 6))}")
        print(f"  phi={list(np.round(phi, 6))}")
        print(f"  weights={list(np.round(w, 6))}")
        print(f"  labels={rep.labels}")
    print(f"\n{found} periodic instance(s) in {trials} trials")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-max", type=int, default=6)
    args = ap.parse_args()
    search(args.trials, args.seed, args.n_max)
