#!/usr/bin/env python3
"""Seeded random sweeps of the structural inequalities: pullback and functional
stability, the relaxed triangle inequality on diamond-free posets, shift-oracle
agreement on grids, and the erosion-neighborhood sandwich."""

import argparse
import random
from fractions import Fraction

from hipm.erosion import d_en
from hipm.exactlin import GF2
from hipm.height import INF, abs_diff_inf, c_rho, distortion, ext_add, from_phi, pullback_rho, rho_diag
from hipm.interleave import distance, shift_oracle_distance
from hipm.pmod import pullback_module
from hipm.poset import FinitePoset, OrderMap
from hipm.randgen import random_forest_poset, random_module, random_phi


def sweep_pullback(rng, trials):
    bad = 0
    for _ in range(trials):
        p = random_forest_poset(rng, 6)
        rho = from_phi(random_phi(rng, p))
        m, n = (random_module(rng, p, GF2, 2) for _ in range(2))
        d = distance(rho, m, n).distance
        size = rng.randint(1, len(p))
        sub = sorted(rng.sample(range(len(p)), size))
        els = [p.elements[i] for i in sub]
        q = FinitePoset.from_covers(
            els, [(els[i], els[j]) for i in range(size) for j in range(size)
                  if i != j and p.leq[sub[i], sub[j]]])
        f = OrderMap(q, p, {e: e for e in els})
        dq = distance(pullback_rho(f, rho), pullback_module(f, m), pullback_module(f, n)).distance
        bad += not (dq <= d)
    return bad


def sweep_functional(rng, trials):
    bad = 0
    for _ in range(trials):
        p = random_forest_poset(rng, 5)
        r1, r2 = from_phi(random_phi(rng, p)), from_phi(random_phi(rng, p))
        m, n = (random_module(rng, p, GF2, 2) for _ in range(2))
        d1, d2 = distance(r1, m, n).distance, distance(r2, m, n).distance
        bad += not (abs_diff_inf(d1, d2) <= distortion(r1, r2))
    return bad


def sweep_triangle(rng, trials):
    bad = 0
    for _ in range(trials):
        p = random_forest_poset(rng, 5)
        rho = from_phi(random_phi(rng, p))
        c = c_rho(rho).value
        m, x, n = (random_module(rng, p, GF2, 2) for _ in range(3))
        lhs = distance(rho, m, n).distance
        rhs = ext_add(ext_add(distance(rho, m, x).distance,
                              distance(rho, x, n).distance), c)
        bad += not (lhs <= rhs)
    return bad


def sweep_oracle(rng, trials):
    g = FinitePoset.grid([3, 3])
    rho = rho_diag(g)
    bad = 0
    for _ in range(trials):
        m, n = (random_module(rng, g, GF2, 2) for _ in range(2))
        bad += distance(rho, m, n).distance != shift_oracle_distance(m, n)
    return bad


def sweep_en_sandwich(rng, trials):
    bad = undecided = 0
    for _ in range(trials):
        p = random_forest_poset(rng, 4)
        rho = from_phi(random_phi(rng, p, max_step=2))
        c = c_rho(rho).value
        m, n = (random_module(rng, p, GF2, 1) for _ in range(2))
        den = d_en(rho, m, n, budget=20000)
        dd = distance(rho, m, n)
        if not (den.decided and dd.decided):
            undecided += 1
            continue
        if den.distance is INF:
            bad += dd.distance is not INF
        else:
            bad += not (den.distance <= dd.distance <= ext_add(2 * den.distance, c))
    return bad, undecided


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=30)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print(f"pullback stability violations:   {sweep_pullback(rng, args.trials)}/{args.trials}")
    print(f"functional stability violations: {sweep_functional(rng, args.trials)}/{args.trials}")
    print(f"relaxed triangle violations:     {sweep_triangle(rng, args.trials)}/{args.trials}")
    print(f"shift-oracle disagreements:      {sweep_oracle(rng, args.trials)}/{args.trials}")
    bad, und = sweep_en_sandwich(rng, args.trials)
    print(f"erosion sandwich violations:     {bad}/{args.trials} ({und} undecided)")


if __name__ == "__main__":
    main()
